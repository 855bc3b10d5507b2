"""Module entry point: python -m pmcwnet."""

import sys

from .cli import main

sys.exit(main())
