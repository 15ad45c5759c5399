import sys

from armac.harness.cli import main

sys.exit(main())
