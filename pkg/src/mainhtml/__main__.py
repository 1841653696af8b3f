import sys

from mainhtml.cli import main

sys.exit(main())
