import sys

from .case_runner import main

sys.exit(main())
