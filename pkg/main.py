import sys

from conicqed.cli import main

if __name__ == "__main__":
    sys.exit(main())
