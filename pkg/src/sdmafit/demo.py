"""Built-in benchmark target: a kinked curve with mixed curvature.

The curve y = max(-6x - 6, x^4 - 3x^2) on [-2, 2] joins a steep line to a
double-well quartic at a non-differentiable point and swings through
convex and concave stretches, which is exactly the regime the soft
difference class exists for. Values change sign, so the samples are taken
as already-log data and fit directly.
"""

from __future__ import annotations

import numpy as np

from .dataset import DataSet, sample_grid_2d

DEMO_LO = -2.0
DEMO_HI = 2.0
DEMO_COUNT = 101


def demo_target(x: float) -> float:
    """Benchmark curve value at one point."""
    return float(np.maximum(-6.0 * x - 6.0, x ** 4 - 3.0 * x ** 2))


def demo_dataset(count: int = DEMO_COUNT) -> DataSet:
    """Sample the benchmark curve on an even grid over [-2, 2]."""
    return sample_grid_2d(demo_target, DEMO_LO, DEMO_HI, count)
