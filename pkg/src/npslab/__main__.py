import sys

from npslab.cli import main

sys.exit(main())
