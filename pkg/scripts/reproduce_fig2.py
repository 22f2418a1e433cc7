"""Small-noise synchronisation experiment: mean d_theta curves for several delta.

    python3 scripts/reproduce_fig2.py --config configs/fig2.json
"""

import sys

from vicsek_mean.cli import main

if __name__ == "__main__":
    sys.exit(main(["reproduce-fig2", *sys.argv[1:]]))
