import numpy as np
import pytest

from twistbench import FiberGrid, SpacetimeModel, TimeProfile, TrigPolynomial, TwistedFunction


def unit_torus(dim, m, curved=False):
    coeffs = None
    if curved:
        def G0(*coords):
            return 1.0 + 0.2 * np.cos(2.0 * np.pi * coords[0])

        coeffs = [G0] + [None] * (dim - 1)
    return FiberGrid(dim, (1.0,) * dim, (m,) * dim, metric_coeffs=coeffs)


def ripple(grid, coeff=1.0, phase=0.0):
    wave = (1,) + (0,) * (grid.dim - 1)
    return TrigPolynomial.from_specs(
        [{"coeff": coeff, "wavevec": wave, "phase": phase}], grid.periods
    )


def random_trig_field(grid, seed, amplitude=0.4, max_mode=1, n_modes=3):
    rng = np.random.default_rng(seed)
    modes = []
    for _ in range(n_modes):
        wavevec = tuple(int(k) for k in rng.integers(-max_mode, max_mode + 1, grid.dim))
        if all(k == 0 for k in wavevec):
            wavevec = (1,) + (0,) * (grid.dim - 1)
        modes.append(
            {
                "coeff": float(rng.uniform(-amplitude, amplitude)),
                "wavevec": wavevec,
                "phase": float(rng.uniform(0.0, 2.0 * np.pi)),
            }
        )
    return TrigPolynomial.from_specs(modes, grid.periods).value(*grid.coords)


@pytest.fixture
def grid1d():
    return unit_torus(1, 128)


@pytest.fixture
def grid2d():
    return unit_torus(2, 32)


def flat_grw_model(dim=1, m=128, interval=(-1.0, 1.0)):
    """Minkowski-like model: f identically one."""
    grid = unit_torus(dim, m)
    twist = TwistedFunction("pure_time", g=TimeProfile("constant", {"c": 1.0}))
    return SpacetimeModel(interval, grid, twist)
