"""Write the curve data behind the kt plots into ./figure_data (or a given directory)."""

import sys
from pathlib import Path

from noisytele.cli import SweepConfig, emit_figure_data, render_rows, run_sweep

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("figure_data")

for fig in (2, 3, 4):
    for path in emit_figure_data(fig, out):
        print("wrote", path)

# a short sweep straight to stdout
cfg = SweepConfig("xz", 0.4, 0.48, 0.02)
print()
print(render_rows(run_sweep(cfg), cfg.outputs), end="")
