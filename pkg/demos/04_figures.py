"""Regenerate the four figure datasets (CSV, SVG and metadata) into ./figures.

Run: python3 demos/04_figures.py [output-dir]
"""

import sys
import time

from xmetrology import sweep

out = sys.argv[1] if len(sys.argv) > 1 else "figures"
for fig in sweep.FIGURE_IDS:
    t0 = time.perf_counter()
    paths = sweep.run_figure(fig, out)
    rows = len(paths["result"].rows)
    print(f"{fig}: {rows} rows -> {paths['csv']} and {paths['svg']} ({time.perf_counter() - t0:.2f} s)")

# fig2-fig4 default to q = 0.9; pass q=(...) to run_figure for another value.
res = sweep.run_figure("fig2", out, q=(0.6,))["result"]
print("fig2 at q = 0.6, QFI of psi+ at beta = 0.5 for p = 0, 0.5, 1:")
col = res.column("qfi", 1, 0.5)
print("  ", [round(float(col[i]), 5) for i in (0, 50, 100)])
