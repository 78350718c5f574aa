"""Allow ``python -m finsler_lab``."""

import sys

from finsler_lab.cli import main

sys.exit(main())
