"""Random parameter draws satisfying both model assumptions."""

import numpy as np

from truncelb import ModelParams, NoBifurcation, p_bar


def random_params(rng, *, psi_ge_mxpi=False, need_p_bar=True, max_tries=10_000):
    """Draw sigma, beta, lambda, m_* around common calibrations and psi
    strictly inside the interval the two assumptions leave open."""
    for _ in range(max_tries):
        sigma = rng.uniform(0.5, 3.0)
        beta = rng.uniform(0.95, 0.995)
        lam = rng.uniform(0.02, 0.5)
        m_xx = rng.uniform(0.6, 1.0)
        m_xpi = rng.uniform(0.5, 1.0)
        m_pipi = rng.uniform(0.5, 1.0)
        hi = m_xpi / (beta * m_pipi)
        lo = m_xpi + (1 - m_xx) * (beta * m_pipi - 1) / (lam * sigma)
        lo = max(lo, m_xpi if psi_ge_mxpi else 1e-3)
        if hi - lo < 1e-3:
            continue
        psi = rng.uniform(lo + 1e-4 * (hi - lo), hi - 1e-4 * (hi - lo))
        params = ModelParams(sigma, beta, psi, lam, m_xx, m_xpi, m_pipi)
        if need_p_bar:
            try:
                p_bar(params)
            except NoBifurcation:
                continue
        return params
    raise RuntimeError("could not draw valid parameters")


def rng_for(seed):
    return np.random.default_rng(seed)
