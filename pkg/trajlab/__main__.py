import sys

from trajlab._cli import main

sys.exit(main())
