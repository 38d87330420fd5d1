"""Helpers shared by the dynamics and acceptance tests."""

import numpy as np

from blacksoliton.expansion import orthogonal_projection, rescale_to_dR
from blacksoliton.randomfields import BumpParams, bump_jet


def perturbed_soliton(grid, seed, delta, R=10.0, center_box=5.0,
                      widths=(1.0, 2.5)):
    """Soliton plus an orthogonally projected bump field at distance delta.

    Bump centers stay within |c| <= center_box: in a large enough box no
    radiation then reaches the pinned walls inside the observation window.
    """
    rng = np.random.default_rng(seed)

    def draw():
        n = int(rng.integers(3, 9))
        return BumpParams(centers=rng.uniform(-center_box, center_box, n),
                          widths=rng.uniform(widths[0], widths[1], n),
                          amps=rng.uniform(-1.0, 1.0, n))

    u, v = bump_jet(grid, draw()), bump_jet(grid, draw())
    u, v = orthogonal_projection(grid, u, v)
    _, _, triple = rescale_to_dR(grid, u, v, delta, R)
    return triple.field(grid).f.astype(complex)
