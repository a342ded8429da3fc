"""Entry point for the certifier: python -m soft_torus"""

import sys

from soft_torus.cli import main

if __name__ == "__main__":
    sys.exit(main())
