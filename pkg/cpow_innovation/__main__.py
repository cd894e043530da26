import sys

from cpow_innovation.cli import main

sys.exit(main())
