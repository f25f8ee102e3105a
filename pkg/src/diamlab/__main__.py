import sys

from diamlab.cli import main

sys.exit(main())
