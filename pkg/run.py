import sys

from precoder.cli import main

# `python run.py <command> ...` is the same as the `precoder` console script
if __name__ == "__main__":
    sys.exit(main())
