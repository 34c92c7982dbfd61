#!/usr/bin/env python3
"""Run the full acceptance suite and print the pass/fail table.

Equivalent to `cone-lab reproduce --format table`; kept as a script so the
suite can be launched without installing the entry point.
"""

import sys

from conelab.cli import main

if __name__ == "__main__":
    sys.exit(main(["reproduce", "--format", "table", *sys.argv[1:]]))
