"""Vectorised path simulation over one chunk of paths.

The loop runs steps outermost and paths innermost so that each block of random
words is consumed contiguously. Arithmetic follows :func:`heston_is.model.step`
term by term, so a path produced here matches the scalar reference to rounding.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from .model import HestonParams, Scheme
from .rng import chunk_bitgen, inv_norm, raw_to_normal, raw_to_uniform

STEP_BLOCK = 32


@numba.njit(cache=True, nogil=True)
def _advance(raw, x, v, int_v, int_sw, dt, kappa, theta, sigma, rho, rho_bar, x_drift, milstein):
    sq = math.sqrt(dt)
    mil = 0.25 * sigma * sigma
    for i in range(raw.shape[0]):
        for j in range(x.size):
            dw1 = inv_norm(raw_to_uniform(raw[i, 0, j])) * sq
            dw2 = inv_norm(raw_to_uniform(raw[i, 1, j])) * sq
            vv = v[j]
            vp = vv if vv > 0.0 else 0.0
            sv = math.sqrt(vp)
            int_v[j] += vp * dt
            int_sw[j] += sv * dw2
            x[j] = x[j] + x_drift * vp * dt + sv * (rho * dw1 + rho_bar * dw2)
            vv = vv + kappa * (theta - vp) * dt + sigma * sv * dw1
            if milstein:
                vv += mil * (dw1 * dw1 - dt)
            v[j] = vv if vv > 0.0 else 0.0


def chunk_raw_blocks(bitgen: np.random.Philox, n_paths: int, n_steps: int):
    """Yield uint64 arrays of shape (steps_in_block, 2, n_paths) covering all steps."""
    for s0 in range(0, n_steps, STEP_BLOCK):
        nb = min(STEP_BLOCK, n_steps - s0)
        yield bitgen.random_raw(nb * 2 * n_paths).reshape(nb, 2, n_paths)


def simulate_chunk(
    params: HestonParams,
    s0: float,
    maturity: float,
    n_steps: int,
    scheme: Scheme,
    hbar: float,
    seed: int,
    stream: int,
    chunk: int,
    n_paths: int,
):
    """Simulate ``n_paths`` paths of one chunk.

    Returns ``(x_T, int_v_dt, int_sqrtv_dw2)`` arrays, with ``x`` the log price.
    """
    bitgen = chunk_bitgen(seed, stream, chunk)
    x = np.full(n_paths, math.log(s0))
    v = np.full(n_paths, float(params.v0))
    int_v = np.zeros(n_paths)
    int_sw = np.zeros(n_paths)
    dt = maturity / n_steps
    for raw in chunk_raw_blocks(bitgen, n_paths, n_steps):
        _advance(
            raw, x, v, int_v, int_sw, dt,
            float(params.kappa), float(params.theta), float(params.sigma),
            float(params.rho), params.rho_bar, -0.5 - float(hbar),
            scheme is Scheme.MILSTEIN,
        )
    return x, int_v, int_sw


def chunk_path_normals(seed: int, stream: int, chunk: int, n_paths: int, n_steps: int, path: int):
    """Standard normals consumed by one path of a chunk, ordered dW1, dW2 per step."""
    bitgen = chunk_bitgen(seed, stream, chunk)
    out = []
    for raw in chunk_raw_blocks(bitgen, n_paths, n_steps):
        z = raw_to_normal(np.ascontiguousarray(raw[:, :, path]))
        out.append(z.ravel())
    return np.concatenate(out)
