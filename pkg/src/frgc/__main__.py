"""Allow `python -m frgc`."""

import sys

from frgc.cli import main

if __name__ == "__main__":
    sys.exit(main())
