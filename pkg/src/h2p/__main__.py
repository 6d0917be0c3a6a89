"""Allow ``python -m h2p``."""
import sys

from .cli import main

sys.exit(main())
