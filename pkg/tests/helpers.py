"""Random profile factories shared by the tests."""

from __future__ import annotations

import numpy as np


def random_plane_profile(rng: np.random.Generator) -> str:
    """A smooth curvature profile: constant plus trigonometric and linear terms."""
    c = rng.uniform(-1.0, 1.0, 4)
    w = rng.uniform(0.5, 2.0)
    return f"{c[0]:.6f} + {c[1]:.6f}*sin({w:.6f}*t) + {c[2]:.6f}*t + {c[3]:.6f}*cos(t)^2"
