import sys

from kcwalk.cli import main

sys.exit(main())
