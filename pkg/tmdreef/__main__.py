import sys

from tmdreef.main import main

sys.exit(main())
