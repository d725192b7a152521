import sys

from convstab.cli import main

sys.exit(main())
