"""Sample quality measures and Monte-Carlo checks of dispersion bounds.

Bound checks return a :class:`BoundCheckReport`; a check passes when the
empirical estimate is at most the theoretical bound plus three standard
errors. Every check is a pure function of its parameters and seed.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .methods import generate, parse_method_spec
from .seeding import stream
from .sequences import Base, jittered, latin_hypercube, scramble

EXACT_MAX_DIM = 3
EXACT_MAX_POINTS = 256
MC_MIN_BOXES = 100_000


@dataclass(frozen=True)
class BoundCheckReport:
    name: str
    params: dict
    estimate: float
    stderr: float
    bound: float
    passed: bool | None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.stderr >= 0:
            raise ValueError("stderr must be non-negative")

    def to_line(self) -> str:
        """One JSON object on a single line."""
        return json.dumps(asdict(self), sort_keys=True, allow_nan=False)

    @classmethod
    def from_line(cls, line: str) -> "BoundCheckReport":
        return cls(**json.loads(line))


def _judge(estimate, stderr, bound):
    return bool(estimate <= bound + 3.0 * stderr)


@dataclass(frozen=True)
class DiscrepancyEstimate:
    value: float
    method: str
    boxes: int


def min_distance(x_star, sample) -> float:
    """Euclidean distance from ``x_star`` to the nearest point of ``sample``."""
    sample = np.atleast_2d(np.asarray(sample, dtype=float))
    x_star = np.asarray(x_star, dtype=float).ravel()
    if sample.shape[0] == 0:
        raise ValueError("empty sample")
    if sample.shape[1] != x_star.size:
        raise ValueError(f"dimension mismatch: point has {x_star.size}, sample has {sample.shape[1]}")
    diff = sample - x_star
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", diff, diff))))


def _min_distances(probes, sample):
    # ||p - x||^2 = |p|^2 + |x|^2 - 2 p.x, clipped against cancellation
    sq = (probes**2).sum(1)[:, None] + (sample**2).sum(1)[None, :] - 2.0 * probes @ sample.T
    return np.sqrt(np.maximum(sq.min(axis=1), 0.0))


def probe_points(count: int, d: int, seed=0) -> np.ndarray:
    """Scrambled-Hammersley probe set over the unit cube."""
    return scramble(Base.HAMMERSLEY, count, d, seed)


def stochastic_dispersion(sampler, n: int, d: int, replicas: int = 30, probes: int = 512,
                          seed: int = 0):
    """Max over probe points of the mean (over fresh samples) nearest-point distance.

    Returns ``(estimate, stderr)``; the stderr is the replica standard error
    at the maximising probe.
    """
    if replicas < 30:
        raise ValueError("stochastic dispersion needs at least 30 replicas")
    if probes < 100:
        raise ValueError("stochastic dispersion needs at least 100 probes")
    spec = parse_method_spec(sampler) if isinstance(sampler, str) else sampler
    grid = probe_points(probes, d, stream(seed, "probes"))
    dist = np.empty((replicas, probes))
    for r in range(replicas):
        sample = generate(spec, n, d, stream(seed, "dispersion", r))
        dist[r] = _min_distances(grid, sample)
    mean = dist.mean(axis=0)
    worst = int(np.argmax(mean))
    stderr = float(dist[:, worst].std(ddof=1) / math.sqrt(replicas))
    return float(mean[worst]), stderr


# ---------------------------------------------------------------------------
# star discrepancy


def _exact_star_discrepancy(x):
    n, d = x.shape
    grids = [np.unique(np.append(x[:, j], 1.0)) for j in range(d)]
    idx = [np.searchsorted(grids[j], x[:, j]) for j in range(d)]
    tail_shape = tuple(len(g) for g in grids[1:])
    tail_vol = np.ones(tail_shape)
    for j, g in enumerate(grids[1:]):
        tail_vol = tail_vol * g.reshape((1,) * j + (-1,) + (1,) * (d - 2 - j))
    drop_last = tuple(slice(0, -1) for _ in tail_shape)
    best = 0.0
    # sweep the first axis; closed[c] counts points with x <= corner, open_ with x < corner
    closed = np.zeros(tail_shape, dtype=np.int64)
    for i0, b0 in enumerate(grids[0]):
        open_ = np.pad(closed, [(1, 0)] * len(tail_shape))[drop_last] if tail_shape else closed
        sel = idx[0] == i0
        if tail_shape:
            slab = np.zeros(tail_shape, dtype=np.int64)
            np.add.at(slab, tuple(ix[sel] for ix in idx[1:]), 1)
        else:
            slab = np.array(np.count_nonzero(sel))
        for axis in range(slab.ndim):
            slab = np.cumsum(slab, axis=axis)
        closed = closed + slab
        vol = b0 * tail_vol
        best = max(best, float(np.max(vol - open_ / n)), float(np.max(closed / n - vol)))
    return best, int(len(grids[0]) * np.prod(tail_shape))


def _mc_star_discrepancy(x, boxes, rng, chunk=2048):
    n, d = x.shape
    best = 0.0
    done = 0
    while done < boxes:
        m = min(chunk, boxes - done)
        corners = rng.random((m, d))
        inside = np.ones((m, n), dtype=bool)
        for j in range(d):
            inside &= x[None, :, j] < corners[:, None, j]
        frac = inside.sum(axis=1) / n
        vol = corners.prod(axis=1)
        best = max(best, float(np.max(np.abs(vol - frac))))
        done += m
    return best


def star_discrepancy(sample, method: str = "auto", boxes: int = MC_MIN_BOXES, seed=0) -> DiscrepancyEstimate:
    """L-infinity star discrepancy over origin-anchored boxes.

    ``"exact"`` enumerates every box whose upper corner lies on the grid of
    sample coordinates (``d <= 3``, ``n <= 256``). ``"mc"`` takes the worst of
    ``boxes`` random anchored boxes, which is a lower bound on the exact value.
    """
    x = np.atleast_2d(np.asarray(sample, dtype=float))
    n, d = x.shape
    small = d <= EXACT_MAX_DIM and n <= EXACT_MAX_POINTS
    if method == "auto":
        method = "exact" if small else "mc"
    if method == "exact":
        if not small:
            raise ValueError(
                f"exact discrepancy limited to d <= {EXACT_MAX_DIM} and n <= {EXACT_MAX_POINTS}"
            )
        value, count = _exact_star_discrepancy(x)
        return DiscrepancyEstimate(value, "exact", count)
    if method == "mc":
        if boxes < MC_MIN_BOXES:
            raise ValueError(f"Monte-Carlo discrepancy needs at least {MC_MIN_BOXES} boxes")
        rng = np.random.default_rng(seed)
        return DiscrepancyEstimate(_mc_star_discrepancy(x, boxes, rng), "mc", boxes)
    raise ValueError(f"unknown discrepancy method {method!r}")


# ---------------------------------------------------------------------------
# bound checks


def _is_power_of_two(k):
    return isinstance(k, (int, np.integer)) and k >= 1 and (k & (k - 1)) == 0


def lhs_corner_bound(n: int, m: int, d: int) -> float:
    """Upper bound on the probability that LHS(n) misses ``[0, m/n]^d``."""
    alpha = m / n ** (1.0 - 1.0 / d)
    base = 1.0 - alpha ** (d - 1) / n ** (1.0 - 1.0 / d)
    return max(base, 0.0) ** (alpha * n ** (1.0 - 1.0 / d))


def check_lhs_corner_bound(n: int, m: int, d: int, replicas: int = 10_000, seed: int = 0) -> BoundCheckReport:
    """Frequency with which an LHS sample has no point in the corner box ``[0, m/n]^d``."""
    if not (_is_power_of_two(n) and _is_power_of_two(m)):
        raise ValueError(f"n and m must be powers of two, got n={n}, m={m}")
    if m > n:
        raise ValueError("need m <= n")
    if d < 1 or replicas < 1:
        raise ValueError("need d >= 1 and replicas >= 1")
    edge = m / n
    misses = 0
    for r in range(replicas):
        x = latin_hypercube(n, d, stream(seed, "lhs-corner", r))
        if not np.any(np.all(x <= edge, axis=1)):
            misses += 1
    p = misses / replicas
    stderr = math.sqrt(p * (1.0 - p) / replicas)
    bound = lhs_corner_bound(n, m, d)
    return BoundCheckReport(
        "lhs_corner", dict(n=n, m=m, d=d, replicas=replicas, seed=seed,
                           alpha=m / n ** (1.0 - 1.0 / d)),
        p, stderr, bound, _judge(p, stderr, bound), dict(misses=misses),
    )


def unit_ball_volume(d: int) -> float:
    """Volume of the Euclidean unit ball in ``d`` dimensions."""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def projected_jittered_bound(n: int, d_proj: int, delta: float) -> float:
    return 2.0 ** (1.0 + 1.0 / d_proj) * math.log(1.0 / delta) ** (1.0 / d_proj) / (
        unit_ball_volume(d_proj) * n
    ) ** (1.0 / d_proj)


def _quantile_stderr(values, q):
    """Half-width of the one-sigma binomial order-statistic interval around the ``q`` quantile."""
    v = np.sort(values)
    r = v.size
    half = math.sqrt(r * q * (1.0 - q))
    lo = int(max(0, math.floor(r * q - half)))
    hi = int(min(r - 1, math.ceil(r * q + half)))
    return float((v[hi] - v[lo]) / 2.0)


def check_projected_jittered(n: int, d: int, d_proj: int, delta: float, replicas: int = 10_000,
                             seed: int = 0) -> BoundCheckReport:
    """``1 - delta`` quantile of the distance from a random probe to jittered points seen on ``d_proj`` axes."""
    k = round(n ** (1.0 / d))
    if k**d != n:
        k = next((c for c in (k - 1, k + 1) if c >= 1 and c**d == n), None)
        if k is None:
            raise ValueError(f"n={n} is not a perfect {d}-th power")
    if not 1 <= d_proj <= d:
        raise ValueError(f"need 1 <= d_proj <= d, got {d_proj}")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    dist = np.empty(replicas)
    for r in range(replicas):
        rng = stream(seed, "jittered", r)
        x = jittered(n, d, rng)[:, :d_proj]
        probe = rng.random(d_proj)
        dist[r] = min_distance(probe, x)
    q = 1.0 - delta
    est = float(np.quantile(dist, q))
    stderr = _quantile_stderr(dist, q)
    bound = projected_jittered_bound(n, d_proj, delta)
    return BoundCheckReport(
        "projected_jittered", dict(n=n, d=d, d_proj=d_proj, delta=delta, replicas=replicas, seed=seed),
        est, stderr, bound, _judge(est, stderr, bound),
        dict(ball_volume=unit_ball_volume(d_proj)),
    )


def middle_point_threshold(d: int) -> float:
    """Sample size beyond which the middle-point theorem no longer claims anything (o(1) terms dropped)."""
    return 0.5 * (0.5 * math.exp(0.5)) ** (-d / 2.0)


def check_middle_point_theorem(n: int, d: int, replicas: int = 1000, seed: int = 0) -> BoundCheckReport:
    """Median norm of a Gaussian optimum against the median distance to ``n`` Gaussian points.

    ``estimate`` is the median of ``||x*||``, ``bound`` the median of
    ``min_i ||x_i - x*||``. The claim is that the former is the smaller one.
    Out of its regime (``n`` above :func:`middle_point_threshold`) the check
    only reports and ``passed`` is None.
    """
    if n < 1 or d < 1 or replicas < 1:
        raise ValueError("need n, d, replicas >= 1")
    norms = np.empty(replicas)
    nearest = np.empty(replicas)
    for r in range(replicas):
        rng = stream(seed, "middle-point", r)
        x_star = rng.standard_normal(d)
        pts = rng.standard_normal((n, d))
        norms[r] = np.linalg.norm(x_star)
        nearest[r] = min_distance(x_star, pts)
    est = float(np.median(norms))
    bound = float(np.median(nearest))
    stderr = math.hypot(_quantile_stderr(norms, 0.5), _quantile_stderr(nearest, 0.5))
    in_regime = n < middle_point_threshold(d)
    return BoundCheckReport(
        "middle_point", dict(n=n, d=d, replicas=replicas, seed=seed),
        est, stderr, bound, _judge(est, stderr, bound) if in_regime else None,
        dict(median_sq_norm_over_d=float(np.median(norms**2)) / d,
             median_sq_norm=float(np.median(norms**2)),
             strictly_greater=bool(bound > est), in_regime=bool(in_regime)),
    )


def default_checks(replicas: int | None = None, seed: int = 0) -> list[BoundCheckReport]:
    """One report per bound: LHS corner box, projected jittered dispersion, middle point."""
    return [
        check_lhs_corner_bound(64, 4, 3, replicas or 10_000, seed),
        check_projected_jittered(81, 4, 2, 0.1, replicas or 10_000, seed),
        check_middle_point_theorem(30, 100, replicas or 1000, seed),
    ]


__all__ = [
    "BoundCheckReport", "DiscrepancyEstimate", "min_distance", "stochastic_dispersion",
    "star_discrepancy", "check_lhs_corner_bound", "check_projected_jittered",
    "check_middle_point_theorem", "unit_ball_volume", "lhs_corner_bound",
    "projected_jittered_bound", "middle_point_threshold", "default_checks", "probe_points",
]
