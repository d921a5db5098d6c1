import sys

from pml_select.cli import main

if __name__ == "__main__":
    sys.exit(main())
