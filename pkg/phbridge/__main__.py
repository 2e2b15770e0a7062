import sys

from phbridge.main import main

sys.exit(main())
