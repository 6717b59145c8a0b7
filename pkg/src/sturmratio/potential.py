"""Potentials q(x) on [0, 1]: evaluation, extrema, shape classification, CSV ingestion.

Analytic families evaluate their closed form exactly. Sampled potentials are
piecewise-linear interpolants of their nodes.

Family parameter conventions::

    constant(c)        q(x) = c
    barrier_sin(a, b)  q(x) = a + b sin(pi x)
    ramp(a, b)         q(x) = a + b x
    poly(c0, c1, ...)  q(x) = c0 + c1 x + c2 x^2 + ...   (ascending powers)
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, ParseError

FAMILIES = {
    "constant": "constant:c            q(x) = c",
    "barrier_sin": "barrier_sin:a,b       q(x) = a + b*sin(pi*x)",
    "ramp": "ramp:a,b              q(x) = a + b*x",
    "poly": "poly:c0,c1,...        q(x) = c0 + c1*x + c2*x^2 + ...",
}
_ARITY = {"constant": 1, "barrier_sin": 2, "ramp": 2}

# integer codes understood by the compiled kernels
KIND_CODES = {"constant": 0, "barrier_sin": 1, "ramp": 2, "poly": 3, "sampled": 4}

DEFAULT_RESOLUTION = 2048
ANALYTIC_TOL = 1e-9


def _fmt(v: float) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class Potential:
    """An immutable potential on [0, domain_end] with domain_end in (0, 1]."""

    kind: str
    params: tuple = ()
    nodes: tuple = ()
    values: tuple = ()
    domain_end: float = 1.0

    def __post_init__(self):
        if self.kind not in KIND_CODES:
            raise DomainError(f"unknown potential kind {self.kind!r}")
        if not (0.0 < self.domain_end <= 1.0):
            raise DomainError(f"domain_end must lie in (0, 1], got {self.domain_end}")
        if self.kind == "sampled":
            xs = self.nodes
            if len(xs) < 2 or len(xs) != len(self.values):
                raise DomainError("sampled potential needs >= 2 matching (x, q) pairs")
            if xs[0] != 0.0 or xs[-1] != 1.0:
                raise DomainError("sampled grid must start at 0 and end at 1")
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise DomainError("sampled grid must be strictly increasing")
        elif self.kind in _ARITY and len(self.params) != _ARITY[self.kind]:
            raise DomainError(f"{self.kind} takes {_ARITY[self.kind]} parameter(s)")
        elif self.kind == "poly" and len(self.params) == 0:
            raise DomainError("poly needs at least one coefficient")
        if not all(math.isfinite(v) for v in self.params + self.values):
            raise DomainError("potential parameters must be finite")

    # constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c: float) -> "Potential":
        return cls("constant", (float(c),))

    @classmethod
    def barrier_sin(cls, a: float, b: float) -> "Potential":
        return cls("barrier_sin", (float(a), float(b)))

    @classmethod
    def ramp(cls, a: float, b: float) -> "Potential":
        return cls("ramp", (float(a), float(b)))

    @classmethod
    def poly(cls, coeffs: Iterable[float]) -> "Potential":
        return cls("poly", tuple(float(c) for c in coeffs))

    @classmethod
    def sampled(cls, xs: Iterable[float], qs: Iterable[float]) -> "Potential":
        return cls("sampled", nodes=tuple(float(x) for x in xs),
                   values=tuple(float(q) for q in qs))

    # derived views ------------------------------------------------------

    @property
    def is_sampled(self) -> bool:
        return self.kind == "sampled"

    @property
    def descriptor(self) -> str:
        if self.is_sampled:
            text = f"sampled:{len(self.nodes)}"
        else:
            text = f"{self.kind}:" + ",".join(_fmt(v) for v in self.params)
        if self.domain_end != 1.0:
            text += f"@{_fmt(self.domain_end)}"
        return text

    @cached_property
    def kernel_args(self):
        """(kind code, params, node xs, node qs) as float64 arrays for the compiled kernels."""
        params = np.array(self.params if self.params else (0.0,), dtype=np.float64)
        xs = np.array(self.nodes if self.nodes else (0.0, 1.0), dtype=np.float64)
        qs = np.array(self.values if self.values else (0.0, 0.0), dtype=np.float64)
        return KIND_CODES[self.kind], params, xs, qs

    def breakpoints(self, a: float, b: float) -> np.ndarray:
        """Interpolation nodes strictly inside (a, b); empty for analytic families."""
        if not self.is_sampled:
            return np.empty(0)
        xs = np.asarray(self.nodes)
        return xs[(xs > a) & (xs < b)]

    def with_domain_end(self, ell: float) -> "Potential":
        return replace(self, domain_end=float(ell))

    def shifted(self, c: float) -> "Potential":
        """The potential q + c."""
        c = float(c)
        if self.is_sampled:
            return replace(self, values=tuple(v + c for v in self.values))
        params = list(self.params)
        params[0] += c
        return replace(self, params=tuple(params))

    # evaluation ---------------------------------------------------------

    def _raw(self, x):
        p = self.params
        if self.kind == "constant":
            return np.full_like(x, p[0])
        if self.kind == "barrier_sin":
            return p[0] + p[1] * np.sin(np.pi * x)
        if self.kind == "ramp":
            return p[0] + p[1] * x
        if self.kind == "poly":
            return np.polynomial.polynomial.polyval(x, p)
        return np.interp(x, self.nodes, self.values)

    def __call__(self, x):
        arr = np.asarray(x, dtype=np.float64)
        if np.any(arr < 0.0) or np.any(arr > self.domain_end) or np.any(np.isnan(arr)):
            raise DomainError(f"x outside [0, {self.domain_end}]")
        out = self._raw(arr)
        return float(out) if out.ndim == 0 else out

    def eval(self, x: float) -> float:
        return float(self(float(x)))


# extrema ------------------------------------------------------------------


def _refine(p: Potential, lo: float, hi: float, sign: float):
    """Local extremum of sign*q on [lo, hi]; returns (x, q(x))."""
    res = minimize_scalar(lambda t: sign * p._raw(np.float64(t)), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    x = float(res.x)
    return x, float(p._raw(np.float64(x)))


def min_max(p: Potential, a: float = 0.0, b: Optional[float] = None,
            resolution: int = DEFAULT_RESOLUTION):
    """Extrema of q over [a, b].

    Returns ``(q_min, q_max, argmin, argmax)``. Ties resolve to the leftmost
    point. Analytic families get a grid scan plus local refinement around the
    best grid points; sampled potentials are scanned exactly at their nodes.
    """
    if b is None:
        b = p.domain_end
    if not (0.0 <= a < b <= p.domain_end):
        raise DomainError(f"need 0 <= a < b <= {p.domain_end}, got [{a}, {b}]")
    if p.is_sampled:
        xs = np.concatenate(([a], p.breakpoints(a, b), [b]))
        vs = p(xs)
        i, j = int(np.argmin(vs)), int(np.argmax(vs))
        return float(vs[i]), float(vs[j]), float(xs[i]), float(xs[j])

    xs = np.linspace(a, b, resolution)
    vs = p(xs)
    out = []
    for sign, k in ((1.0, int(np.argmin(vs))), (-1.0, int(np.argmax(vs)))):
        x_best, q_best = float(xs[k]), float(vs[k])
        lo, hi = xs[max(k - 1, 0)], xs[min(k + 1, resolution - 1)]
        x_r, q_r = _refine(p, lo, hi, sign)
        if sign * q_r < sign * q_best:
            x_best, q_best = x_r, q_r
        out.append((q_best, x_best))
    (q_min, x_min), (q_max, x_max) = out
    return q_min, q_max, x_min, x_max


# shape classification -----------------------------------------------------


@dataclass(frozen=True)
class ShapeReport:
    nonpositive: bool
    monotone_increasing: bool
    single_well: Optional[float]
    single_barrier: Optional[float]
    tol: float
    notes: tuple = field(default=())


def _peak(vals: np.ndarray, tol: float) -> Optional[int]:
    """Index of the peak if ``vals`` rises then falls (violations <= tol), else None."""
    d = np.diff(vals)
    falls = np.flatnonzero(d < -tol)
    rises = np.flatnonzero(d > tol)
    up_end = int(falls[0]) if falls.size else len(vals) - 1
    down_start = int(rises[-1]) + 1 if rises.size else 0
    if down_start > up_end:
        return None
    return down_start + int(np.argmax(vals[down_start:up_end + 1]))


def classify(p: Potential, tol: Optional[float] = None,
             resolution: int = DEFAULT_RESOLUTION) -> ShapeReport:
    """Decide sign and monotonicity predicates of q on [0, domain_end].

    Monotonicity is weak, so a constant potential is monotone, single-well and
    single-barrier at once. ``tol`` defaults to 1e-9 for analytic families and
    0 for sampled nodes.
    """
    ell = p.domain_end
    if tol is None:
        tol = 0.0 if p.is_sampled else ANALYTIC_TOL
    if tol < 0:
        raise DomainError("tol must be >= 0")
    if p.is_sampled:
        xs = np.concatenate(([0.0], p.breakpoints(0.0, ell), [ell]))
    else:
        xs = np.linspace(0.0, ell, resolution)
    vs = p(xs)

    def locate(sign):
        k = _peak(sign * vs, tol)
        if k is None:
            return None
        x0 = float(xs[k])
        if not p.is_sampled and 0 < k < len(xs) - 1:
            x_r, q_r = _refine(p, xs[k - 1], xs[k + 1], -sign)
            if sign * q_r > sign * vs[k]:
                x0 = x_r
        return x0

    barrier = locate(1.0)
    well = locate(-1.0)
    notes = []
    spacing = float(xs[1] - xs[0]) if not p.is_sampled else 0.0
    if barrier is not None and (barrier <= spacing or barrier >= ell - spacing):
        notes.append("single-barrier peak on the boundary (monotone potential)")
    return ShapeReport(
        nonpositive=bool(np.max(vs) <= tol),
        monotone_increasing=bool(np.all(np.diff(vs) >= -tol)),
        single_well=well,
        single_barrier=barrier,
        tol=float(tol),
        notes=tuple(notes),
    )


# parsing -------------------------------------------------------------------


def _number(text: str, line: int) -> float:
    try:
        v = float(text.strip().replace("−", "-"))
    except ValueError:
        raise ParseError(f"not a number: {text.strip()!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text.strip()!r}", line)
    return v


def load_samples(source) -> Potential:
    """Parse ``x,q`` rows (``#`` comments and blank lines allowed) into a sampled potential.

    ``source`` is a string or a text stream.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    xs, qs = [], []
    for lineno, raw in enumerate(source, start=1):
        row = raw.split("#", 1)[0].strip()
        if not row:
            continue
        parts = row.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'x,q', got {row!r}", lineno)
        x, q = _number(parts[0], lineno), _number(parts[1], lineno)
        if not 0.0 <= x <= 1.0:
            raise ParseError(f"x={x} outside [0, 1]", lineno)
        if not xs and x != 0.0:
            raise ParseError("domain must start at 0", lineno)
        if xs and x == xs[-1]:
            raise ParseError(f"duplicate x={x}", lineno)
        if xs and x < xs[-1]:
            raise ParseError(f"x={x} not sorted", lineno)
        xs.append(x)
        qs.append(q)
    if len(xs) < 2:
        raise ParseError("need at least two samples")
    if xs[-1] != 1.0:
        raise ParseError("domain must end at 1")
    return Potential.sampled(xs, qs)


def parse_family(text: str) -> Potential:
    """Build a potential from ``name:p1,p2,...`` (e.g. ``barrier_sin:-5,4``)."""
    name, _, rest = text.partition(":")
    name = name.strip()
    if name not in FAMILIES:
        raise ParseError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    params = [_number(t, None) for t in rest.split(",")] if rest.strip() else []
    try:
        if name == "poly":
            return Potential.poly(params)
        return getattr(Potential, name)(*params)
    except (TypeError, DomainError) as exc:
        raise ParseError(f"bad parameters for {name}: {exc}") from None
