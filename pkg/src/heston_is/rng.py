"""Counter-based random streams and inverse-CDF normal generation.

Each work chunk draws from its own Philox stream keyed by (seed, stream, chunk),
so results do not depend on how chunks are scheduled across threads. Raw 64-bit
words are mapped to the open unit interval and then to normals with Wichura's
AS241 (PPND16) rational approximation, compiled with numba so that it fuses into
the simulation loop.
"""

from __future__ import annotations

import math

import numba
import numpy as np

_U53 = 1.0 / 9007199254740992.0


def chunk_bitgen(seed: int, stream: int, chunk: int) -> np.random.Philox:
    """Philox generator for one (seed, stream, chunk) triple."""
    return np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(chunk))))


@numba.njit(cache=True, nogil=True, inline="always")
def inv_norm(p):
    """Standard normal quantile, AS241 PPND16 (relative error ~1e-16)."""
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q*q
        num = (((((((2.5090809287301226727e3*r + 3.3430575583588128105e4)*r + 6.7265770927008700853e4)*r + 4.5921953931549871457e4)*r + 1.3731693765509461125e4)*r + 1.9715909503065514427e3)*r + 1.3314166789178437745e2)*r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3*r + 2.8729085735721942674e4)*r + 3.9307895800092710610e4)*r + 2.1213794301586595867e4)*r + 5.3941960214247511077e3)*r + 6.8718700749205790830e2)*r + 4.2313330701600911252e1)*r + 1.0)
        return q*num/den
    r = p if q < 0 else 1.0-p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        num = (((((((7.74545014278341407640e-4*r + 2.27238449892691845833e-2)*r + 2.41780725177450611770e-1)*r + 1.27045825245236838258e0)*r + 3.64784832476320460504e0)*r + 5.76949722146069140550e0)*r + 4.63033784615654529590e0)*r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9*r + 5.47593808499534494600e-4)*r + 1.51986665636164571966e-2)*r + 1.48103976427480074590e-1)*r + 6.89767334985100004550e-1)*r + 1.67638483018380384940e0)*r + 2.05319162663775882187e0)*r + 1.0)
    else:
        r -= 5.0
        num = (((((((2.01033439929228813265e-7*r + 2.71155556874348757815e-5)*r + 1.24266094738807843860e-3)*r + 2.65321895265761230930e-2)*r + 2.96560571828504891230e-1)*r + 1.78482653991729133580e0)*r + 5.46378491116411436990e0)*r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15*r + 1.42151175831644588870e-7)*r + 1.84631831751005468180e-5)*r + 7.86869131145613259100e-4)*r + 1.48753612908506148525e-2)*r + 1.36929880922735805310e-1)*r + 5.99832206555887937690e-1)*r + 1.0)
    v = num/den
    return -v if q < 0 else v

@numba.njit(cache=True, nogil=True, inline="always")
def raw_to_uniform(word):
    """Top 53 bits of a uint64, centred in its cell: always strictly inside (0, 1)."""
    return ((word >> np.uint64(11)) + 0.5) * _U53


@numba.njit(cache=True, nogil=True)
def raw_to_normal(raw):
    """Vectorised map from uint64 words to standard normals."""
    flat = raw.ravel()
    out = np.empty(flat.size)
    for i in range(flat.size):
        out[i] = inv_norm(raw_to_uniform(flat[i]))
    return out.reshape(raw.shape)


@numba.njit(cache=True, nogil=True)
def _inv_norm_array(p):
    out = np.empty(p.size)
    for i in range(p.size):
        out[i] = inv_norm(p[i])
    return out


def norm_ppf(p) -> np.ndarray:
    """Standard normal quantile of an array of probabilities in (0, 1)."""
    p = np.asarray(p, dtype=float)
    return _inv_norm_array(p.ravel()).reshape(p.shape)


__all__ = ["chunk_bitgen", "inv_norm", "norm_ppf", "raw_to_normal", "raw_to_uniform"]
