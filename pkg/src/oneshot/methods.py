"""Sampler pipelines and their compact names.

A method name reads left to right as::

    [Cauchy][O|QO][Rctg<float>|MetaRctg][Rescale][Shift]<Base>[PlusMiddlePoint]

with ``<Base>`` one of Random, Grid, LHS, Jittered, Halton, Hammersley,
Sobol, ScrHalton, ScrHammersley. ``MetaRctg`` on its own implies
ScrHammersley. Spaced spellings such as ``"Cchy Rctg.55 Scr Hmsley"`` or
``"Q O Rctg.4 Scr Hammersley"`` are normalised before parsing.

Generation order: base points, shift, rescale, opposition, middle point,
then recentering (cube target) or conversion to R^d (unbounded target).
"""
from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, field, replace

import numpy as np

from . import reshaping as rs
from .reshaping import ReshapeSpec
from .seeding import as_generator
from .sequences import Base, gen_base, random_shift, scramble


class MethodSpecError(ValueError):
    pass


GRAMMAR = "[Cauchy][O|QO][Rctg<float>|MetaRctg][Rescale][Shift]<Base>[PlusMiddlePoint]"

_BASE_NAMES = {
    "Random": (Base.RANDOM, False),
    "Grid": (Base.GRID, False),
    "LHS": (Base.LHS, False),
    "Jittered": (Base.JITTERED, False),
    "Halton": (Base.HALTON, False),
    "Hammersley": (Base.HAMMERSLEY, False),
    "Sobol": (Base.SOBOL, False),
    "ScrHalton": (Base.HALTON, True),
    "ScrHammersley": (Base.HAMMERSLEY, True),
}

_NAME_RE = re.compile(
    r"^(?P<cauchy>Cauchy)?"
    r"(?P<opp>QO|O)?"
    r"(?:(?P<meta>MetaRctg)|Rctg(?P<lam>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?))?"
    r"(?P<rescale>Rescale)?"
    r"(?P<shift>Shift)?"
    r"(?P<base>ScrHammersley|ScrHalton|Hammersley|Halton|Random|Grid|LHS|Jittered|Sobol)?"
    r"(?P<middle>PlusMiddlePoint)?$"
)

# paper-table spellings -> compact grammar
_ALIASES = [
    (re.compile(r"Cchy"), "Cauchy"),
    (re.compile(r"Hmsl(?:e)?y"), "Hammersley"),
    (re.compile(r"Ctrn?g"), "Rctg"),
    (re.compile(r"MetaCauchy"), "CauchyMeta"),
    (re.compile(r"Scrambled"), "Scr"),
]


@dataclass(frozen=True)
class SamplerSpec:
    base: Base = Base.RANDOM
    scrambled: bool = False
    shift: bool = False
    reshape: ReshapeSpec = field(default_factory=ReshapeSpec)

    def __post_init__(self):
        if self.scrambled and not Base(self.base).radical_inverse:
            raise MethodSpecError(f"{Base(self.base).value} cannot be scrambled")

    @property
    def name(self) -> str:
        return canonical_name(self)

    def with_target(self, target: str) -> "SamplerSpec":
        return replace(self, reshape=replace(self.reshape, target=target))

    def resolve_lambda(self, n: int, d: int) -> float:
        if self.reshape.lam is None:
            return rs.meta_lambda(n, d)
        return self.reshape.lam


def normalize_name(name: str) -> str:
    out = re.sub(r"[\s_\-]+", "", name)
    for pattern, repl in _ALIASES:
        out = pattern.sub(repl, out)
    return out


def _known_names():
    names = list(_BASE_NAMES)
    for prefix in ("Cauchy", "O", "QO", "MetaRctg", "Rctg0.55", "CauchyRctg0.55", "CauchyMetaRctg"):
        names += [prefix + b for b in ("ScrHammersley", "ScrHalton", "Random", "LHS")]
    names += [b + "PlusMiddlePoint" for b in _BASE_NAMES]
    names += ["MetaRctg", "CauchyMetaRctg", "RescaleScrHammersley"]
    return names


def parse_method_spec(name: str) -> SamplerSpec:
    """Parse a method name into a :class:`SamplerSpec` (cube target).

    >>> parse_method_spec("CauchyRctg0.55ScrHammersley").reshape.lam
    0.55
    """
    compact = normalize_name(name)
    m = _NAME_RE.match(compact)
    if m is None or not compact:
        hint = difflib.get_close_matches(compact, _known_names(), n=1, cutoff=0.0)
        raise MethodSpecError(
            f"cannot parse method {name!r}; grammar is {GRAMMAR}"
            + (f"; nearest valid name: {hint[0]}" if hint else "")
        )
    base_name = m["base"]
    if base_name is None:
        if m["meta"] is None:
            raise MethodSpecError(f"method {name!r} has no base sequence; grammar is {GRAMMAR}")
        base_name = "ScrHammersley"
    base, scrambled = _BASE_NAMES[base_name]
    if m["meta"]:
        lam = None
    elif m["lam"] is not None:
        lam = float(m["lam"])
    else:
        lam = 1.0
    opposition = {None: None, "O": rs.OPPOSITE, "QO": rs.QUASI_OPPOSITE}[m["opp"]]
    try:
        reshape = ReshapeSpec(
            distribution=rs.CAUCHY if m["cauchy"] else rs.NORMAL,
            lam=lam,
            middle_point=bool(m["middle"]),
            opposition=opposition,
            rescale=bool(m["rescale"]),
        )
    except ValueError as exc:
        raise MethodSpecError(f"invalid method {name!r}: {exc}") from exc
    return SamplerSpec(base=base, scrambled=scrambled, shift=bool(m["shift"]), reshape=reshape)


def canonical_name(spec: SamplerSpec) -> str:
    r = spec.reshape
    parts = []
    if r.distribution == rs.CAUCHY:
        parts.append("Cauchy")
    if r.opposition == rs.OPPOSITE:
        parts.append("O")
    elif r.opposition == rs.QUASI_OPPOSITE:
        parts.append("QO")
    if r.lam is None:
        parts.append("MetaRctg")
    elif r.lam != 1.0:
        parts.append(f"Rctg{r.lam!r}")
    if r.rescale:
        parts.append("Rescale")
    if spec.shift:
        parts.append("Shift")
    parts.append(("Scr" if spec.scrambled else "") + Base(spec.base).value)
    if r.middle_point:
        parts.append("PlusMiddlePoint")
    return "".join(parts)


def unit_points(spec: SamplerSpec, n: int, d: int, seed=None) -> np.ndarray:
    """The unit-cube stage of the pipeline, before recentering or conversion."""
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = as_generator(seed)
    r = spec.reshape
    if r.opposition is not None:
        if n < 2:
            raise ValueError("opposition sampling needs a budget of at least 2")
        n_base = n // 2
    else:
        n_base = n
    if spec.scrambled:
        u = scramble(spec.base, n_base, d, rng)
    else:
        u = gen_base(spec.base, n_base, d, rng)
    if spec.shift:
        u = random_shift(u, rng)
    if r.rescale:
        u = rs.rescale_to_bounds(u)
    if r.opposition is not None:
        u = rs.oppose(u, r.opposition, rng)
        if n % 2:
            u = np.vstack([u, np.full((1, d), 0.5)])
    if r.middle_point:
        u = rs.add_middle_point(u)
    return u


def generate(spec: SamplerSpec, n: int, d: int, seed=None) -> np.ndarray:
    """Draw ``n`` points in dimension ``d`` following ``spec``.

    Returns unit-cube points for a cube target and points of R^d for an
    unbounded one.
    """
    u = unit_points(spec, n, d, seed)
    r = spec.reshape
    lam = spec.resolve_lambda(n, d)
    if r.target == rs.UNBOUNDED:
        out = rs.convert_unbounded(u, lam, r.distribution)
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("non-finite coordinates after conversion")
        return out
    if lam == 1.0 and r.distribution == rs.NORMAL:
        return u
    return rs.recenter(u, lam, r.distribution)
