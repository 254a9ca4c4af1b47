"""Run the command-line interface with ``python -m poncelet_bundles``."""

import sys

from poncelet_bundles.cli import main

sys.exit(main())
