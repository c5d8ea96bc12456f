import sys

from symgames.cli import main

sys.exit(main())
