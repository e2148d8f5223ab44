import sys

from batchlab.cli import main

sys.exit(main())
