import numpy as np
import pytest


def random_spd(rng, D, spread=1.0):
    Q, _ = np.linalg.qr(rng.standard_normal((D, D)))
    lam = np.exp(rng.uniform(-spread, spread, D))
    S = (Q * lam) @ Q.T
    return 0.5 * (S + S.T)


def random_sym(rng, D, scale=1.0):
    G = rng.standard_normal((D, D))
    return scale * 0.5 * (G + G.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
