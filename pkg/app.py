"""
thinfilm-lab launcher.
Runs the command-line interface from a source checkout without installing the package.
"""

import sys

sys.path.append("src")

from thinfilm_lab.lab.cli import main  # noqa: E402

if __name__ == "__main__":
    main()
