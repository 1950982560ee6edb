import sys

from qpolar.cli import main

sys.exit(main())
