import sys

from feynclock.cli import main

sys.exit(main())
