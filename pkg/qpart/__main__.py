import sys

from qpart.main import main

sys.exit(main())
