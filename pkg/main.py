import sys

from src.smectic_bps.cli import main

if __name__ == "__main__":
    sys.exit(main())
