#!/usr/bin/env python3
"""Step-convergence study for parallel transport.

Transports w0 = (1, 0, 0) along the x-axis with the single nonzero symbol
G[1][1][1] = 1, whose exact solution is w1(t) = exp(-t), and prints the
error against the closed form for a doubling sequence of step counts.
The observed order should sit at 4.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

_SRC = Path(__file__).resolve().parents[1] / "src"
if _SRC.is_dir() and str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

from frenetlift.expr import CurveSpec
from frenetlift.lifts import Connection, parallel_transport


def run() -> None:
    line = CurveSpec.from_strings("t", "0", "0", 0.0, 1.0, "x_axis")
    G = Connection.from_entries({(1, 1, 1): 1.0})
    exact = math.exp(-1.0)
    print(f"{'steps':>6}  {'w1(1)':>22}  {'abs error':>12}  {'order':>6}")
    prev = None
    for steps in (25, 50, 100, 200, 400, 800):
        w = parallel_transport(G, line, (1.0, 0.0, 0.0), 1.0, steps)
        err = abs(w[0] - exact)
        order = math.log2(prev / err) if prev and err > 0 else float("nan")
        print(f"{steps:>6}  {w[0]:>22.17f}  {err:>12.3e}  {order:>6.2f}")
        prev = err


if __name__ == "__main__":
    run()
