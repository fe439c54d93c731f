"""Space-filling point sets in the half-open unit cube.

Every generator returns an ``(n, d)`` float array with coordinates in
``[0, 1)``. Randomised kinds (Random, LHS, Jittered, the remainder of Grid)
draw from the generator built by :func:`oneshot.seeding.as_generator`;
Halton, Hammersley and Sobol are deterministic.

Radical-inverse sequences start at index 1 (Halton, Sobol) so that no point
sits on the origin. Hammersley keeps index 0, whose radical-inverse
coordinates are 0; callers clamp before any inverse-CDF.
"""
from __future__ import annotations

import enum
import functools
import itertools
import math
from importlib import resources

import numpy as np

from .seeding import as_generator

__all__ = [
    "Base",
    "first_primes",
    "radix_inverse",
    "halton",
    "hammersley",
    "sobol",
    "latin_hypercube",
    "grid",
    "jittered",
    "gen_base",
    "scramble",
    "random_shift",
    "SOBOL_MAX_DIM",
    "check_unit_sample",
]


class Base(str, enum.Enum):
    RANDOM = "Random"
    GRID = "Grid"
    LHS = "LHS"
    JITTERED = "Jittered"
    HALTON = "Halton"
    HAMMERSLEY = "Hammersley"
    SOBOL = "Sobol"

    @property
    def radical_inverse(self) -> bool:
        return self in (Base.HALTON, Base.HAMMERSLEY)

    @property
    def randomized(self) -> bool:
        return self in (Base.RANDOM, Base.LHS, Base.JITTERED, Base.GRID)


def check_unit_sample(points) -> np.ndarray:
    """Validate an ``(n, d)`` array of unit-cube coordinates and return it."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError(f"expected an (n, d) array, got shape {points.shape}")
    if points.shape[0] < 1 or points.shape[1] < 1:
        raise ValueError(f"empty sample of shape {points.shape}")
    if not (np.all(points >= 0.0) and np.all(points < 1.0)):
        raise ValueError("sample coordinates must lie in [0, 1)")
    return points


def _check_size(n, d):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")


@functools.lru_cache(maxsize=None)
def _primes_upto(limit: int) -> tuple:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return tuple(int(p) for p in np.flatnonzero(sieve))


def first_primes(count: int) -> list[int]:
    """The ``count`` smallest primes, ascending."""
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return []
    # p_k < k (ln k + ln ln k) for k >= 6
    limit = 15 if count < 6 else int(count * (math.log(count) + math.log(math.log(count)))) + 1
    return list(_primes_upto(limit)[:count])


def _digits_needed(kmax: int, p: int) -> int:
    m = 1
    reach = p
    while reach <= kmax:
        reach *= p
        m += 1
    return m


def _radix_inverse_array(k, p, perm=None) -> np.ndarray:
    """Digit reversal of the integers ``k`` in base ``p``.

    The reversed digits are accumulated as one integer and divided by
    ``p**m`` once, so each value carries a single rounding.
    """
    k = np.asarray(k, dtype=np.int64)
    if k.size == 0:
        return np.zeros(k.shape)
    m = _digits_needed(int(k.max()), p)
    if p**m >= 2**62:
        # integer accumulation would overflow; fall back to float sums
        return _radix_inverse_float(k, p, perm)
    rev = np.zeros_like(k)
    rem = k.copy()
    for _ in range(m):
        digit = rem % p
        if perm is not None:
            digit = perm[digit]
        rev = rev * p + digit
        rem //= p
    return rev / float(p**m)


def _radix_inverse_float(k, p, perm=None):
    out = np.zeros(k.shape)
    rem = k.copy()
    scale = 1.0 / p
    while np.any(rem > 0):
        digit = rem % p
        if perm is not None:
            digit = perm[digit]
        out += digit * scale
        scale /= p
        rem //= p
    return out


def radix_inverse(k: int, p: int) -> float:
    """Base-``p`` radical inverse of a non-negative integer ``k``.

    >>> radix_inverse(1, 2)
    0.5
    >>> radix_inverse(6, 2)
    0.375
    """
    if p < 2:
        raise ValueError(f"base must be >= 2, got {p}")
    if k < 0:
        raise ValueError(f"index must be non-negative, got {k}")
    return float(_radix_inverse_array(np.array([k]), p)[0])


def _resolve_primes(d, primes):
    if primes is None:
        return first_primes(d)
    primes = [int(p) for p in primes]
    if len(primes) < d:
        raise ValueError(f"need {d} bases, got {len(primes)}")
    primes = primes[:d]
    if any(p < 2 for p in primes):
        raise ValueError("bases must be >= 2")
    for a, b in itertools.combinations(primes, 2):
        if math.gcd(a, b) != 1:
            raise ValueError(f"bases {a} and {b} are not coprime")
    return primes


def halton(n: int, d: int, primes=None, perms=None) -> np.ndarray:
    """Halton points for indices ``1..n``; ``perms`` holds optional digit permutations per base."""
    _check_size(n, d)
    primes = _resolve_primes(d, primes)
    idx = np.arange(1, n + 1, dtype=np.int64)
    cols = [
        _radix_inverse_array(idx, p, None if perms is None else perms[j])
        for j, p in enumerate(primes)
    ]
    return np.column_stack(cols)


def hammersley(n: int, d: int, primes=None, perms=None) -> np.ndarray:
    """Hammersley point set: ``(i + 1/2)/n`` then radical inverses of ``i`` for ``i < n``."""
    _check_size(n, d)
    primes = _resolve_primes(d - 1, primes)
    idx = np.arange(n, dtype=np.int64)
    cols = [(idx + 0.5) / n]
    cols += [
        _radix_inverse_array(idx, p, None if perms is None else perms[j])
        for j, p in enumerate(primes)
    ]
    return np.column_stack(cols)


# ---------------------------------------------------------------------------
# Sobol

_SOBOL_BITS = 32


@functools.lru_cache(maxsize=1)
def _sobol_table():
    text = resources.files("oneshot").joinpath("data/sobol_directions.txt").read_text()
    rows = []
    max_dim = None
    for line in text.splitlines():
        if line.startswith("#"):
            if "max_dimension" in line:
                max_dim = int(line.split()[-1])
            continue
        if not line.strip():
            continue
        fields = [int(t) for t in line.split()]
        dim, s, a = fields[:3]
        m = fields[3:]
        if len(m) != s:
            raise ValueError(f"malformed direction row for dimension {dim}")
        rows.append((s, a, m))
    if max_dim is None:
        max_dim = len(rows) + 1
    return max_dim, rows


SOBOL_MAX_DIM = _sobol_table()[0]


def _direction_integers(s, a, m_init, bits=_SOBOL_BITS):
    m = list(m_init)
    for k in range(s, bits):
        new = m[k - s] ^ (m[k - s] << s)
        for i in range(1, s):
            if (a >> (s - 1 - i)) & 1:
                new ^= m[k - i] << i
        m.append(new)
    return np.array([m[k] << (bits - 1 - k) for k in range(bits)], dtype=np.uint64)


@functools.lru_cache(maxsize=None)
def _sobol_directions(d: int) -> np.ndarray:
    _, rows = _sobol_table()
    dirs = [np.array([1 << (_SOBOL_BITS - 1 - k) for k in range(_SOBOL_BITS)], dtype=np.uint64)]
    for s, a, m in rows[: d - 1]:
        dirs.append(_direction_integers(s, a, m))
    return np.stack(dirs)


def sobol(n: int, d: int) -> np.ndarray:
    """Sobol points (Gray-code order) for indices ``1..n``."""
    _check_size(n, d)
    if d > SOBOL_MAX_DIM:
        raise ValueError(f"Sobol supports d <= {SOBOL_MAX_DIM}, got {d}")
    if n >= 2**_SOBOL_BITS:
        raise ValueError(f"Sobol supports n < 2**{_SOBOL_BITS}")
    v = _sobol_directions(d)
    idx = np.arange(1, n + 1, dtype=np.uint64)
    gray = idx ^ (idx >> np.uint64(1))
    acc = np.zeros((n, d), dtype=np.uint64)
    for bit in range(int(n).bit_length()):
        on = ((gray >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        acc[on] ^= v[:, bit]
    return acc.astype(float) / 2.0**_SOBOL_BITS


# ---------------------------------------------------------------------------
# randomized designs


def latin_hypercube(n: int, d: int, seed=None) -> np.ndarray:
    """Latin hypercube sample: one point per stratum ``[i/n, (i+1)/n)`` in every column."""
    _check_size(n, d)
    rng = as_generator(seed)
    strata = rng.permuted(np.tile(np.arange(n), (d, 1)), axis=1).T
    x = (strata + rng.random((n, d))) / n
    return _pin_to_cells(x, strata, n)


def _pin_to_cells(x, cells, k):
    # rounding in (i + r)/k can land on the next cell's lower edge
    bad = np.floor(x * k) != cells
    while np.any(bad):
        x[bad] = np.nextafter(x[bad], -np.inf)
        bad = np.floor(x * k) != cells
    return x


def _largest_root(n, d):
    k = max(1, int(round(n ** (1.0 / d))))
    while k**d > n:
        k -= 1
    while (k + 1) ** d <= n:
        k += 1
    return k


def _cell_indices(k, d):
    return np.array(list(itertools.product(range(k), repeat=d)), dtype=np.int64).reshape(-1, d)


def grid(n: int, d: int, seed=None) -> np.ndarray:
    """Centres of the ``k**d`` cells (largest ``k`` with ``k**d <= n``), padded with uniform points."""
    _check_size(n, d)
    rng = as_generator(seed)
    k = _largest_root(n, d)
    centres = (_cell_indices(k, d) + 0.5) / k
    extra = rng.random((n - k**d, d))
    return np.vstack([centres, extra])


def jittered(n: int, d: int, seed=None) -> np.ndarray:
    """One uniform point per cell of the ``k**d`` grid, padded with uniform points."""
    _check_size(n, d)
    rng = as_generator(seed)
    k = _largest_root(n, d)
    cells = _cell_indices(k, d)
    pts = _pin_to_cells((cells + rng.random(cells.shape)) / k, cells, k)
    extra = rng.random((n - k**d, d))
    return np.vstack([pts, extra])


def gen_base(kind, n: int, d: int, seed=None, primes=None) -> np.ndarray:
    """Dispatch to the generator for ``kind`` (a :class:`Base` or its name)."""
    kind = Base(kind)
    _check_size(n, d)
    if kind is Base.RANDOM:
        return as_generator(seed).random((n, d))
    if kind is Base.GRID:
        return grid(n, d, seed)
    if kind is Base.LHS:
        return latin_hypercube(n, d, seed)
    if kind is Base.JITTERED:
        return jittered(n, d, seed)
    if kind is Base.HALTON:
        return halton(n, d, primes)
    if kind is Base.HAMMERSLEY:
        return hammersley(n, d, primes)
    return sobol(n, d)


def digit_permutations(primes, seed=None) -> list[np.ndarray]:
    """One uniform permutation of ``{0..p-1}`` per base, each fixing 0."""
    rng = as_generator(seed)
    perms = []
    for p in primes:
        perm = np.zeros(p, dtype=np.int64)
        perm[1:] = 1 + rng.permutation(p - 1)
        perms.append(perm)
    return perms


def scramble(kind, n: int, d: int, seed=None, primes=None, perms=None) -> np.ndarray:
    """Scrambled Halton or Hammersley.

    A random digit permutation fixing 0 is drawn per base and applied to
    every digit of every index before reversal. Fixing 0 keeps the expansions
    finite, so base 2 is never altered. ``perms`` overrides the random draw.
    """
    kind = Base(kind)
    if not kind.radical_inverse:
        raise ValueError(f"scrambling applies to Halton and Hammersley only, not {kind.value}")
    nbases = d if kind is Base.HALTON else d - 1
    primes = _resolve_primes(nbases, primes) if nbases > 0 else []
    if perms is None:
        perms = digit_permutations(primes, seed)
    fn = halton if kind is Base.HALTON else hammersley
    return fn(n, d, primes, perms)


def random_shift(sample, seed=None, shift=None) -> np.ndarray:
    """Add one uniform vector to every point, modulo 1."""
    sample = np.asarray(sample, dtype=float)
    if shift is None:
        shift = as_generator(seed).random(sample.shape[1])
    out = np.mod(sample + np.asarray(shift, dtype=float), 1.0)
    # x + v can round up to exactly 1.0 before the modulo; fold it back
    out[out >= 1.0] = 0.0
    return out
