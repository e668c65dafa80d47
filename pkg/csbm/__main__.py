import sys

from csbm.cli import main

sys.exit(main())
