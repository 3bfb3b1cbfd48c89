import sys

from mubforge.cli import main

sys.exit(main())
