import sys

from spectrim.cli import main

sys.exit(main())
