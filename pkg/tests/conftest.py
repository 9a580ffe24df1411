from pathlib import Path

import numpy as np
import pytest

from stigmagame import ModelParams, piecewise_linear_cdf, uniform

REPO_ROOT = Path(__file__).resolve().parent.parent
PAPER_CFG = REPO_ROOT / "paper.cfg"


@pytest.fixture(scope="session")
def paper_params() -> ModelParams:
    return ModelParams(
        theta_L=0.2,
        theta_H=0.8,
        v=1.0,
        c=0.55,
        c_h=1.0,
        z=2.5,
        u=0.1,
        dist_beta=uniform(0.0, 1.0),
        dist_y=uniform(0.0, 2.0),
        tau_hat=0.5,
    )


def random_valid_params(rng: np.random.Generator, piecewise_y: bool = False) -> ModelParams:
    """Draw parameters satisfying the testing-participation and
    continuation-gap assumptions by construction."""
    theta_L = rng.uniform(0.05, 0.45)
    theta_H = rng.uniform(theta_L + 0.1, 0.95)
    v = rng.uniform(0.5, 2.0)
    lo, hi = theta_L * v, theta_H * v
    c = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo))
    net = theta_H * v - c
    c_h = net / (theta_H - theta_L) * rng.uniform(1.05, 3.0)
    u = rng.uniform(0.01, 0.5)
    z = rng.uniform(0.5, 4.0)
    y_hi = rng.uniform(0.5, 3.0)
    if piecewise_y:
        xs = [0.0]
        for step in rng.uniform(0.1, 1.0, size=3):
            xs.append(xs[-1] + step)
        scale = y_hi / xs[-1]
        xs = [x * scale for x in xs]
        weights = rng.uniform(0.1, 1.0, size=3)
        total = float(np.sum(weights))
        ps = [0.0]
        for w in weights:
            ps.append(ps[-1] + w / total)
        ps[-1] = 1.0
        dist_y = piecewise_linear_cdf(list(zip(xs, ps)))
    else:
        dist_y = uniform(0.0, y_hi)
    return ModelParams(
        theta_L=theta_L,
        theta_H=theta_H,
        v=v,
        c=c,
        c_h=c_h,
        z=z,
        u=u,
        dist_beta=uniform(0.0, 1.0),
        dist_y=dist_y,
        tau_hat=0.0,
    )
