"""Published optima and baseline used for comparison runs.

Values are for lambda0 = 1 um, n0 = 1, h = 0.05 um, m = 5. Iteration
counts marked ``capped`` stopped on the 2000-evaluation limit.
"""

from __future__ import annotations

from dataclasses import dataclass

from pml_select.errors import DomainError
from pml_select.profiles import Family, Power, ProfileClass, from_values


@dataclass(frozen=True)
class PublishedRow:
    family: Family
    p: int
    coefficients: tuple[float, ...]
    iterations: int
    avg_R: float
    capped: bool = False

    @property
    def profile(self) -> ProfileClass:
        return from_values(self.family, self.p, self.coefficients)


BASELINE = Power(S=100.4, p=3)
BASELINE_AVG_R = 0.013


def _rplus(p, coefficients, iterations, avg_R, capped=False):
    return PublishedRow(Family.RATIONAL_PLUS, p, tuple(coefficients), iterations, avg_R, capped)


def _rminus(p, coefficients, iterations, avg_R):
    return PublishedRow(Family.RATIONAL_MINUS, p, tuple(coefficients), iterations, avg_R)


RATIONAL_PLUS_OPTIMA = {
    row.p: row
    for row in (
        _rplus(2, [74.2], 21, 0.019),
        _rplus(3, [38.2, 108.7], 103, 0.0131),
        _rplus(4, [57.1, 0, 222.9], 419, 0.009),
        _rplus(5, [61.8, 0, 2.4, 509.7], 637, 0.0058),
        _rplus(6, [59.3, 0, 29, 48.8, 947.8], 1209, 0.0044, capped=True),
        _rplus(7, [49.9, 16.2, 51.0, 24.2, 11.1, 1358], 741, 0.0039),
        _rplus(8, [39.8, 35.7, 36.3, 9.8, 12.4, 46.2, 1615.4], 959, 0.0035),
        _rplus(9, [39.2, 33, 40.1, 62.7, 64.1, 13.1, 14.9, 2326], 1246, 0.0034, capped=True),
        _rplus(10, [40.9, 21.5, 35.6, 16.4, 18.9, 23.6, 1.1, 17.5, 2685.3], 1279, 0.0031),
        _rplus(11, [44, 17.5, 38.3, 22.7, 20.4, 28.7, 1.1, 32.3, 44.8, 3487.2], 715, 0.0031),
        _rplus(12, [45.5, 5.1, 61.2, 26.9, 2.6, 47.2, 52.5, 81, 75.6, 84.2, 2519.2], 1370, 0.0031, capped=True),
    )
}

RATIONAL_MINUS_OPTIMA = {
    row.p: row
    for row in (
        _rminus(2, [24.9], 21, 0.0057),
        _rminus(3, [0.0019, 28.4], 44, 0.0084),
        _rminus(4, [22.5, 14.5], 109, 0.0053),
        _rminus(5, [23.6, 35.9], 91, 0.0047),
        _rminus(6, [24.4, 76.2], 136, 0.0042),
        _rminus(7, [24.3, 113], 157, 0.0038),
        _rminus(8, [23.3, 121.3], 150, 0.0037),
        _rminus(9, [23.5, 195], 116, 0.0037),
        _rminus(10, [23.2, 180.1], 101, 0.0038),
        _rminus(11, [23.5, 221.6], 124, 0.0039),
        _rminus(12, [23.5, 223.4], 133, 0.0041),
    )
}

PUBLISHED = {
    Family.RATIONAL_PLUS: RATIONAL_PLUS_OPTIMA,
    Family.RATIONAL_MINUS: RATIONAL_MINUS_OPTIMA,
}


def published_row(family: Family, p: int) -> PublishedRow:
    try:
        return PUBLISHED[Family(family)][p]
    except KeyError:
        raise DomainError(f"no published optimum for {Family(family).value} p={p}") from None


def published_profile(family: Family, p: int) -> ProfileClass:
    return published_row(family, p).profile


def comparison_profiles() -> list[ProfileClass]:
    """Baseline plus the best published rplus and two rminus optima."""
    return [
        BASELINE,
        published_profile(Family.RATIONAL_PLUS, 10),
        published_profile(Family.RATIONAL_MINUS, 5),
        published_profile(Family.RATIONAL_MINUS, 8),
    ]
