"""Parametric PML absorption profiles sigma(tau).

tau is the normalized depth into the layer: 0 at the interface with the
physical domain, 1 at the Dirichlet wall. Four closed families are
supported, each with sigma(0) = 0 and sigma'(0) = 0:

    power   sigma = |S| tau^p
    rplus   sigma = (|a2| tau^2 + ... + |ap| tau^p) / (1 + tau)
    rminus  sigma = (|a2| tau^2 + |ap| tau^p) / (1 - tau)
    legacy  sigma = |S| tau^3 / (1 + tau^2)

Coefficients are always used through their absolute values, so an
unconstrained optimizer can move them freely; reported optima are the
absolute values.

Text syntax (used by the CLI):

    power:p=<int>,S=<float>
    rplus:p=<int>,a=[<float>,...]        (p - 1 values, a2 first)
    rminus:p=<int>,a2=<float>,ap=<float> (ap omitted when p = 2)
    legacy:S=<float>
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pml_select.errors import DomainError, LengthMismatch, ProfileSyntaxError

LEGACY_POWER = 3


class Family(str, Enum):
    POWER = "power"
    RATIONAL_PLUS = "rplus"
    RATIONAL_MINUS = "rminus"
    LEGACY = "legacy"


def _check_order(p) -> int:
    if isinstance(p, bool) or int(p) != p or p < 2:
        raise DomainError(f"profile order p must be an integer >= 2, got {p!r}")
    return int(p)


def _check_finite(name: str, value) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"coefficient {name} must be finite, got {value}")
    return value


# ==================== PROFILE FAMILIES ====================

@dataclass(frozen=True)
class Power:
    S: float
    p: int

    family = Family.POWER

    def __post_init__(self):
        object.__setattr__(self, "S", _check_finite("S", self.S))
        object.__setattr__(self, "p", _check_order(self.p))

    def coefficients(self) -> tuple[float, ...]:
        return (self.S,)

    def _evaluate(self, tau: NDArray[np.float64]) -> NDArray[np.float64]:
        return abs(self.S) * tau ** self.p


@dataclass(frozen=True)
class RationalPlus:
    coeffs: tuple[float, ...]
    p: int

    family = Family.RATIONAL_PLUS

    def __post_init__(self):
        p = _check_order(self.p)
        coeffs = tuple(
            _check_finite(f"a{k}", c) for k, c in enumerate(self.coeffs, start=2)
        )
        if len(coeffs) != p - 1:
            raise LengthMismatch(
                f"rplus with p={p} needs {p - 1} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "p", p)

    def coefficients(self) -> tuple[float, ...]:
        return self.coeffs

    def _evaluate(self, tau: NDArray[np.float64]) -> NDArray[np.float64]:
        numerator = np.zeros_like(tau)
        for k, c in enumerate(self.coeffs, start=2):
            numerator = numerator + abs(c) * tau ** k
        return numerator / (1.0 + tau)


@dataclass(frozen=True)
class RationalMinus:
    a2: float
    ap: float
    p: int

    family = Family.RATIONAL_MINUS

    def __post_init__(self):
        p = _check_order(self.p)
        a2 = _check_finite("a2", self.a2)
        ap = _check_finite("ap", self.ap)
        if p == 2 and ap != 0.0:
            raise LengthMismatch("rminus with p=2 has the single coefficient a2")
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "ap", ap)
        object.__setattr__(self, "p", p)

    def coefficients(self) -> tuple[float, ...]:
        if self.p == 2:
            return (self.a2,)
        return (self.a2, self.ap)

    def _evaluate(self, tau: NDArray[np.float64]) -> NDArray[np.float64]:
        numerator = abs(self.a2) * tau ** 2
        if self.p > 2:
            numerator = numerator + abs(self.ap) * tau ** self.p
        return numerator / (1.0 - tau)


@dataclass(frozen=True)
class Legacy:
    S: float

    family = Family.LEGACY
    p = LEGACY_POWER

    def __post_init__(self):
        object.__setattr__(self, "S", _check_finite("S", self.S))

    def coefficients(self) -> tuple[float, ...]:
        return (self.S,)

    def _evaluate(self, tau: NDArray[np.float64]) -> NDArray[np.float64]:
        return abs(self.S) * tau ** 3 / (1.0 + tau * tau)


ProfileClass = Union[Power, RationalPlus, RationalMinus, Legacy]


# ==================== EVALUATION ====================

def sigma(profile: ProfileClass, tau: ArrayLike):
    """Evaluate sigma at normalized depth(s) tau.

    tau must lie in [0, 1], or in [0, 1) for the rminus family whose
    denominator vanishes at the wall. Scalars give a float, arrays an array.

    Raises:
        DomainError: if any tau lies outside the allowed range.
    """
    t = np.asarray(tau, dtype=np.float64)
    upper_open = profile.family is Family.RATIONAL_MINUS
    if t.size:
        too_high = np.any(t >= 1.0) if upper_open else np.any(t > 1.0)
        if np.any(~np.isfinite(t)) or np.any(t < 0.0) or too_high:
            bound = "[0, 1)" if upper_open else "[0, 1]"
            raise DomainError(
                f"tau outside {bound} for {profile.family.value} profile: {tau!r}"
            )
    values = profile._evaluate(t)
    if values.ndim == 0:
        return float(values)
    return values


def tau_of(x_offset: float, layer_thickness: float) -> float:
    """Normalized depth of a point at signed offset x - H (<= 0) from the interface."""
    if not layer_thickness > 0.0:
        raise DomainError(f"layer thickness must be positive, got {layer_thickness}")
    if not -layer_thickness <= x_offset <= 0.0:
        raise DomainError(
            f"offset {x_offset} lies outside the layer [-{layer_thickness}, 0]"
        )
    return abs(x_offset) / layer_thickness


# ==================== COEFFICIENT VECTORS ====================

@dataclass(frozen=True)
class CoefficientVector:
    """Flat coefficient list plus the family/order it parameterizes."""

    values: tuple[float, ...]
    family: Family
    p: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "family", Family(self.family))
        expected = vector_length(self.family, self.p)
        if len(self.values) != expected:
            raise LengthMismatch(
                f"{self.family.value} with p={self.p} takes {expected} "
                f"coefficient(s), got {len(self.values)}"
            )

    def absolute(self) -> CoefficientVector:
        return CoefficientVector(
            tuple(abs(v) for v in self.values), self.family, self.p
        )

    def as_array(self) -> NDArray[np.float64]:
        return np.array(self.values, dtype=np.float64)


def vector_length(family: Family, p: int) -> int:
    family = Family(family)
    if family is Family.RATIONAL_PLUS:
        return _check_order(p) - 1
    if family is Family.RATIONAL_MINUS:
        return 1 if _check_order(p) == 2 else 2
    if family is Family.LEGACY:
        return 1
    _check_order(p)
    return 1


def to_vector(profile: ProfileClass) -> CoefficientVector:
    return CoefficientVector(profile.coefficients(), profile.family, profile.p)


def from_vector(vector: CoefficientVector) -> ProfileClass:
    values = vector.values
    if vector.family is Family.POWER:
        return Power(S=values[0], p=vector.p)
    if vector.family is Family.RATIONAL_PLUS:
        return RationalPlus(coeffs=values, p=vector.p)
    if vector.family is Family.RATIONAL_MINUS:
        ap = values[1] if vector.p > 2 else 0.0
        return RationalMinus(a2=values[0], ap=ap, p=vector.p)
    return Legacy(S=values[0])


def from_values(family: Family, p: int, values) -> ProfileClass:
    """Shortcut for ``from_vector(CoefficientVector(values, family, p))``."""
    return from_vector(CoefficientVector(tuple(values), Family(family), p))


# ==================== TEXT SYNTAX ====================

_FIELD = re.compile(r"\s*([A-Za-z][A-Za-z0-9]*)\s*=\s*(\[[^\[\]]*\]|[^,\[\]]*)\s*(?:,|$)")

_KEYS = {
    Family.POWER: ({"p", "S"}, set()),
    Family.RATIONAL_PLUS: ({"p", "a"}, set()),
    Family.RATIONAL_MINUS: ({"p", "a2"}, {"ap"}),
    Family.LEGACY: ({"S"}, set()),
}


def _split_fields(text: str, body: str) -> dict[str, str]:
    fields: dict[str, str] = {}
    pos = 0
    while pos < len(body):
        match = _FIELD.match(body, pos)
        if not match or match.end() == pos:
            token = body[pos:].split(",", 1)[0] or body[pos:]
            raise ProfileSyntaxError(text, token.strip(), "expected key=value")
        key, value = match.group(1), match.group(2).strip()
        if key in fields:
            raise ProfileSyntaxError(text, key, "duplicate key")
        fields[key] = value
        pos = match.end()
    return fields


def _parse_int(text: str, key: str, raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise ProfileSyntaxError(text, raw, f"{key} must be an integer") from None
    if value < 2:
        raise ProfileSyntaxError(text, raw, f"{key} must be >= 2")
    return value


def _parse_float(text: str, key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ProfileSyntaxError(text, raw, f"{key} must be a number") from None
    if not math.isfinite(value):
        raise ProfileSyntaxError(text, raw, f"{key} must be finite")
    return value


def parse_profile(text: str) -> ProfileClass:
    """Parse the CLI profile syntax.

    Raises:
        ProfileSyntaxError: naming the offending token.
    """
    name, sep, body = text.strip().partition(":")
    if not sep:
        raise ProfileSyntaxError(text, text, "missing ':' after family name")
    try:
        family = Family(name.strip())
    except ValueError:
        raise ProfileSyntaxError(text, name, "unknown profile family") from None

    fields = _split_fields(text, body)
    required, optional = _KEYS[family]
    for key in fields:
        if key not in required | optional:
            raise ProfileSyntaxError(text, key, "unexpected key")
    for key in sorted(required - fields.keys()):
        raise ProfileSyntaxError(text, key, "missing key")

    if family is Family.LEGACY:
        return Legacy(S=_parse_float(text, "S", fields["S"]))

    p = _parse_int(text, "p", fields["p"])
    if family is Family.POWER:
        return Power(S=_parse_float(text, "S", fields["S"]), p=p)

    if family is Family.RATIONAL_PLUS:
        raw = fields["a"]
        if not (raw.startswith("[") and raw.endswith("]")):
            raise ProfileSyntaxError(text, raw, "a must be a bracketed list")
        items = [item.strip() for item in raw[1:-1].split(",")]
        if items == [""]:
            items = []
        coeffs = tuple(_parse_float(text, "a", item) for item in items)
        if len(coeffs) != p - 1:
            raise ProfileSyntaxError(
                text, raw, f"a needs {p - 1} values for p={p}, got {len(coeffs)}"
            )
        return RationalPlus(coeffs=coeffs, p=p)

    a2 = _parse_float(text, "a2", fields["a2"])
    if p == 2:
        if "ap" in fields:
            raise ProfileSyntaxError(text, "ap", "p=2 takes only a2")
        return RationalMinus(a2=a2, ap=0.0, p=2)
    if "ap" not in fields:
        raise ProfileSyntaxError(text, "ap", "missing key")
    return RationalMinus(a2=a2, ap=_parse_float(text, "ap", fields["ap"]), p=p)


def format_profile(profile: ProfileClass) -> str:
    """Inverse of :func:`parse_profile`."""
    if isinstance(profile, Power):
        return f"power:p={profile.p},S={profile.S!r}"
    if isinstance(profile, RationalPlus):
        coeffs = ",".join(repr(c) for c in profile.coeffs)
        return f"rplus:p={profile.p},a=[{coeffs}]"
    if isinstance(profile, RationalMinus):
        if profile.p == 2:
            return f"rminus:p=2,a2={profile.a2!r}"
        return f"rminus:p={profile.p},a2={profile.a2!r},ap={profile.ap!r}"
    return f"legacy:S={profile.S!r}"
