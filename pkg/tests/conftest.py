import random

import pytest

from quartic_hecke.gaussint import GaussInt, enumerate_primary


@pytest.fixture
def rng():
    return random.Random(20240917)


def random_primary(rng, max_norm, odd_only=True):
    """A uniformly chosen primary element with norm ≤ max_norm (rejection sampling)."""
    r = int(max_norm ** 0.5)
    while True:
        z = GaussInt(rng.randint(-r, r), rng.randint(-r, r))
        n = z.norm()
        if 0 < n <= max_norm and z.re % 2 == 1 and z.im % 2 == 0 and (z.re + z.im) % 4 == 1:
            return z


def primaries(X, cond="lam3", squarefree=False):
    return list(enumerate_primary(X, cond, squarefree))
