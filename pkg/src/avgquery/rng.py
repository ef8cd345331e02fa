"""Seeded random streams and an arbitrary-size hypergeometric sampler.

Generator: numpy ``PCG64``. Stream ``k`` of seed ``s`` is ``PCG64(s XOR k)``
(the integer goes through numpy's ``SeedSequence``), so trial ``k`` of an
experiment draws the same numbers whatever order trials are run in.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1

# Below this many draws the sampler simulates the draws one by one with
# integer-only comparisons.
SEQUENTIAL_LIMIT = 64
# Log-factorial differences switch from lgamma to a Stirling difference above this.
_LGAMMA_EXACT_BELOW = 1 << 24

_D1 = 1.7155277699214135  # 2*sqrt(2/e)
_D2 = 0.8989161620588988  # 3 - 2*sqrt(3/e)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64((int(seed) ^ int(stream)) & MASK64))


def _lgamma_shift(x: float, d: float) -> float:
    """``lgamma(x + d) - lgamma(x)`` for large ``x`` without cancellation."""
    y = x + d
    out = (x - 0.5) * math.log1p(d / x) + d * math.log(y) - d
    out += 1.0 / (12.0 * y) - 1.0 / (12.0 * x)
    out -= 1.0 / (360.0 * y ** 3) - 1.0 / (360.0 * x ** 3)
    return out


def log_factorial_diff(a: int, b: int) -> float:
    """``ln(a!) - ln(b!)``, accurate when ``a`` and ``b`` are huge but close."""
    if a == b:
        return 0.0
    if min(a, b) < _LGAMMA_EXACT_BELOW:
        return math.lgamma(a + 1) - math.lgamma(b + 1)
    return _lgamma_shift(float(b + 1), float(a - b))


def _sequential(rng: np.random.Generator, good: int, bad: int, sample: int) -> int:
    hits = 0
    remaining = good + bad
    for _ in range(sample):
        if int(rng.integers(remaining)) < good:
            hits += 1
            good -= 1
        remaining -= 1
    return hits


def _hrua(rng: np.random.Generator, good: int, bad: int, sample: int) -> int:
    # Ratio-of-uniforms with the Stadlober (1989) hat; `sample` <= popsize/2 here.
    popsize = good + bad
    mingb, maxgb = min(good, bad), max(good, bad)
    p = mingb / popsize
    q = maxgb / popsize
    mu = sample * p
    a = mu + 0.5
    var = (popsize - sample) * sample * p * q / (popsize - 1)
    c = math.sqrt(var + 0.5)
    h = _D1 * c + _D2
    mode = ((sample + 1) * (mingb + 1)) // (popsize + 2)
    b = min(min(sample, mingb) + 1, math.floor(a + 16 * c))
    while True:
        u = rng.random()
        v = rng.random()
        if u == 0.0:
            continue
        x = a + h * (v - 0.5) / u
        if x < 0.0 or x >= b:
            continue
        k = int(math.floor(x))
        # log(pmf(mode) / pmf(k))
        t = (log_factorial_diff(k, mode)
             + log_factorial_diff(mingb - k, mingb - mode)
             + log_factorial_diff(sample - k, sample - mode)
             + log_factorial_diff(maxgb - sample + k, maxgb - sample + mode))
        t = -t
        if u * (4.0 - u) - 3.0 <= t:
            break
        if u * (u - t) >= 1.0:
            continue
        if 2.0 * math.log(u) <= t:
            break
    if good > bad:
        k = sample - k
    return k


def hypergeometric(rng: np.random.Generator, good: int, bad: int, sample: int) -> int:
    """Number of ``good`` items among ``sample`` drawn without replacement.

    Python integers throughout, so populations far beyond 2^63 are fine.
    """
    good, bad, sample = int(good), int(bad), int(sample)
    if good < 0 or bad < 0 or not 0 <= sample <= good + bad:
        raise ValueError(f"invalid hypergeometric parameters ({good}, {bad}, {sample})")
    popsize = good + bad
    if sample == 0 or good == 0:
        return 0
    if bad == 0:
        return sample
    flipped = sample > popsize - sample
    drawn = popsize - sample if flipped else sample
    if drawn <= SEQUENTIAL_LIMIT:
        k = _sequential(rng, good, bad, drawn)
    else:
        k = _hrua(rng, good, bad, drawn)
    return good - k if flipped else k
