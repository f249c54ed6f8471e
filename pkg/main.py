import sys

from heatkernel.cli import main

if __name__ == "__main__":
    sys.exit(main())
