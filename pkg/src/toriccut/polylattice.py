"""Exact geometry of polyhedral sets given by half-space data.

A set is described by ordered facets (eta, kappa), each encoding the
constraint <x, eta> <= kappa once normalized to the upper convention.
All verdicts in this module are exact: coordinates are Fractions and
integer lattice questions are settled by exact normal forms.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd

from . import intlinalg
from .errors import (
    ConeWithNonzeroOffset,
    NotACone,
    NotUnimodular,
    ScaleLimitExceeded,
    ZeroConormal,
)

UPPER = "upper"
LOWER = "lower"
GENERAL = "general"
CONE = "cone"

DEFAULT_MAX_DIM = 8
DEFAULT_MAX_CONSTRAINTS = 64
SUBSET_ENUM_LIMIT = 16

LE = "<="
EQ = "=="
LT = "<"


def max_dim_limit() -> int:
    """Supported ambient dimension; raised via the TORIC_MAX_DIM env var."""
    raw = os.environ.get("TORIC_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        return max(1, int(raw))
    except ValueError:
        return DEFAULT_MAX_DIM


@dataclass(frozen=True)
class Facet:
    eta: tuple[int, ...]
    kappa: Fraction


@dataclass(frozen=True)
class PolyhedralSet:
    n: int
    facets: tuple[Facet, ...]
    kind: str = GENERAL
    orientation: str = UPPER

    @property
    def etas(self) -> tuple[tuple[int, ...], ...]:
        return tuple(f.eta for f in self.facets)

    @property
    def kappas(self) -> tuple[Fraction, ...]:
        return tuple(f.kappa for f in self.facets)


@dataclass(frozen=True)
class FaceIndexSet:
    """Subset of facet indices, 1-based, stored sorted."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if idx != self.indices:
            object.__setattr__(self, "indices", idx)
        if idx and idx[0] < 1:
            raise ValueError("facet indices are 1-based")

    def __contains__(self, item):
        return item in self.indices

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: tuple[Fraction, ...] | None


@dataclass(frozen=True)
class MinimalityResult:
    minimal: bool
    witness: int | None


@dataclass(frozen=True)
class UnimodularityReport:
    minimal: bool
    minimal_witness: int | None
    primitive: bool
    primitive_witness: int | None
    simple_vertices: bool
    simple_witness: tuple[Fraction, ...] | None
    saturated_faces: bool
    saturated_witness: FaceIndexSet | None

    @property
    def is_unimodular(self) -> bool:
        return (
            self.minimal
            and self.primitive
            and self.simple_vertices
            and self.saturated_faces
        )


@dataclass(frozen=True)
class ConvexityReport:
    rank: int
    k: int
    label: str  # "strongly_convex" | "weakly_convex"


@dataclass(frozen=True)
class GoodConeResult:
    good: bool
    report: UnimodularityReport


@dataclass(frozen=True)
class SplittingReport:
    k: int
    coordinate_indices: tuple[int, ...]
    unimodular_change: tuple[tuple[int, ...], ...]
    projected_set: PolyhedralSet


@dataclass(frozen=True)
class HomotopyReport:
    k: int
    pi0: str
    pi1: str
    pi_higher: str


def polyhedral_set(n, facets, kind=GENERAL, orientation=UPPER) -> PolyhedralSet:
    """Build a PolyhedralSet from raw (eta, kappa) pairs.

    eta entries must be integers; kappa may be anything Fraction accepts.
    No normalization happens here; see normalize().
    """
    if kind not in (GENERAL, CONE):
        raise ValueError(f"unknown kind {kind!r}")
    if orientation not in (UPPER, LOWER):
        raise ValueError(f"unknown orientation {orientation!r}")
    built = []
    for eta, kappa in facets:
        eta = tuple(int(v) for v in eta)
        if len(eta) != n:
            raise ValueError("conormal length does not match dimension")
        built.append(Facet(eta, Fraction(kappa)))
    return PolyhedralSet(int(n), tuple(built), kind, orientation)


def normalize(p: PolyhedralSet, auto_primitivize: bool = False) -> PolyhedralSet:
    """Normalize facet data to the upper convention <x, eta> <= kappa.

    Lower-orientation input has every (eta, kappa) negated. With
    auto_primitivize each conormal is divided by its gcd (the offset by the
    same factor), which leaves the half-space unchanged.
    """
    out = []
    for pos, f in enumerate(p.facets, start=1):
        eta, kappa = f.eta, f.kappa
        if all(v == 0 for v in eta):
            raise ZeroConormal(f"facet {pos} has a zero conormal")
        if p.orientation == LOWER:
            eta = tuple(-v for v in eta)
            kappa = -kappa
        if auto_primitivize:
            g = intlinalg.vector_gcd(eta)
            if g > 1:
                eta = tuple(v // g for v in eta)
                kappa = kappa / g
        if p.kind == CONE and kappa != 0:
            raise ConeWithNonzeroOffset(f"facet {pos} has offset {kappa}")
        out.append(Facet(eta, kappa))
    return PolyhedralSet(p.n, tuple(out), p.kind, UPPER)


def require_normalized(p: PolyhedralSet) -> None:
    if p.orientation != UPPER:
        raise ValueError("operation requires a normalized (upper) set")


# ---------------------------------------------------------------------------
# exact feasibility kernel
# ---------------------------------------------------------------------------
#
# Rows are (coeffs, rhs, strict) meaning sum(c*x) <= rhs, or < if strict.
# Variables are eliminated last to first; witnesses come back by choosing a
# value inside the exact interval at each level.


def _canonical_row(coeffs, rhs, strict):
    denom_lcm = 1
    for v in list(coeffs) + [rhs]:
        d = v.denominator
        denom_lcm = denom_lcm * d // gcd(denom_lcm, d)
    ints = [int(v * denom_lcm) for v in coeffs]
    r = int(rhs * denom_lcm)
    g = intlinalg.vector_gcd(ints + [r])
    if g > 1:
        ints = [v // g for v in ints]
        r //= g
    return tuple(ints), r, strict


def _tighten(rows):
    """Drop trivial rows and duplicates; return None on an obvious conflict."""
    seen = set()
    out = []
    for coeffs, rhs, strict in rows:
        if all(c == 0 for c in coeffs):
            if rhs < 0 or (strict and rhs == 0):
                return None
            continue
        key = (tuple(coeffs), rhs, strict)
        if key in seen:
            continue
        seen.add(key)
        out.append((tuple(coeffs), Fraction(rhs), strict))
    return out


def _eliminate_last(rows, nvars):
    """Project away the last variable, Fourier-Motzkin style."""
    zero, pos, neg = [], [], []
    k = nvars - 1
    for coeffs, rhs, strict in rows:
        c = coeffs[k]
        if c == 0:
            zero.append((coeffs[:k], rhs, strict))
        elif c > 0:
            pos.append((coeffs, rhs, strict))
        else:
            neg.append((coeffs, rhs, strict))
    combined = list(zero)
    for pc, pr, ps in pos:
        for nc, nr, ns in neg:
            a, b = pc[k], -nc[k]
            coeffs = [b * pc[j] + a * nc[j] for j in range(k)]
            rhs = b * pr + a * nr
            combined.append((coeffs, rhs, ps or ns))
    canon = [_canonical_row([Fraction(c) for c in co], Fraction(r), s) for co, r, s in combined]
    tight = _tighten(canon)
    return tight


def _bounds_for_last(rows, nvars, partial):
    """Exact admissible interval for the last variable given earlier values."""
    k = nvars - 1
    lo = hi = None
    lo_strict = hi_strict = False
    for coeffs, rhs, strict in rows:
        c = coeffs[k]
        if c == 0:
            continue
        rest = rhs - sum(Fraction(coeffs[j]) * partial[j] for j in range(k))
        bound = rest / c
        if c > 0:
            if hi is None or bound < hi:
                hi, hi_strict = bound, strict
            elif bound == hi and strict:
                hi_strict = True
        else:
            if lo is None or bound > lo:
                lo, lo_strict = bound, strict
            elif bound == lo and strict:
                lo_strict = True
    return lo, lo_strict, hi, hi_strict


def _choose_value(lo, lo_strict, hi, hi_strict, maximize=False):
    if maximize:
        if hi is not None:
            if not hi_strict:
                return hi
            if lo is None:
                return hi - 1
            return (lo + hi) / 2
        base = lo if lo is not None else Fraction(0)
        return base + 1
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1 if hi_strict else hi
    if hi is None:
        return lo + 1 if lo_strict else lo
    if lo == hi:
        return lo
    if lo_strict or hi_strict:
        return (lo + hi) / 2
    return lo


def _fm_solve(rows, nvars, maximize_first=False):
    rows = _tighten(rows)
    if rows is None:
        return None
    if nvars == 0:
        return []
    projected = _eliminate_last(rows, nvars)
    if projected is None:
        return None
    partial = _fm_solve(projected, nvars - 1, maximize_first)
    if partial is None:
        return None
    lo, ls, hi, hs = _bounds_for_last(rows, nvars, partial)
    value = _choose_value(lo, ls, hi, hs, maximize=(maximize_first and nvars == 1))
    return partial + [value]


def feasible(constraints, n: int | None = None, *, max_dim: int | None = None,
             max_constraints: int | None = None) -> FeasibilityResult:
    """Exact feasibility of a system of linear relations by elimination.

    Args:
        constraints: iterable of (coeffs, relation, rhs) with relation one
            of "<=", "==", "<". Coefficients and rhs may be ints or
            Fractions; the verdict and witness are exact.
        n: number of variables (defaults to the length of the first row).

    Returns:
        FeasibilityResult with an exact rational witness when feasible.

    Raises:
        ScaleLimitExceeded: when the system is larger than the supported
            desk scale (dimension or constraint count).
    """
    cons = list(constraints)
    if n is None:
        if not cons:
            raise ValueError("cannot infer dimension from an empty system")
        n = len(cons[0][0])
    limit_dim = max_dim if max_dim is not None else max_dim_limit()
    limit_cons = max_constraints if max_constraints is not None else DEFAULT_MAX_CONSTRAINTS
    if n > limit_dim:
        raise ScaleLimitExceeded(f"dimension {n} exceeds supported bound {limit_dim}")
    if len(cons) > limit_cons:
        raise ScaleLimitExceeded(
            f"{len(cons)} constraints exceed supported bound {limit_cons}")
    rows = []
    for coeffs, rel, rhs in cons:
        co = [Fraction(c) for c in coeffs]
        if len(co) != n:
            raise ValueError("constraint arity does not match dimension")
        r = Fraction(rhs)
        if rel == LE:
            rows.append(_canonical_row(co, r, False))
        elif rel == LT:
            rows.append(_canonical_row(co, r, True))
        elif rel == EQ:
            rows.append(_canonical_row(co, r, False))
            rows.append(_canonical_row([-c for c in co], -r, False))
        else:
            raise ValueError(f"unknown relation {rel!r}")
    sol = _fm_solve(rows, n)
    if sol is None:
        return FeasibilityResult(False, None)
    return FeasibilityResult(True, tuple(sol))


def max_margin_point(p: PolyhedralSet):
    """Interior point maximizing the smallest slack, found exactly.

    Returns (witness, margin). The margin is the largest m with
    <x, eta_i> <= kappa_i - m for all facets feasible, or an arbitrary
    unit margin when the slack is unbounded (cones). margin == 0 means
    the set has no strict interior.
    """
    require_normalized(p)
    if p.n > max_dim_limit():
        raise ScaleLimitExceeded(f"dimension {p.n} exceeds supported bound")
    if len(p.facets) + 1 > DEFAULT_MAX_CONSTRAINTS:
        raise ScaleLimitExceeded("facet count exceeds supported bound")
    rows = []
    for f in p.facets:
        rows.append(_canonical_row(
            [Fraction(1)] + [Fraction(v) for v in f.eta], Fraction(f.kappa), False))
    rows.append(_canonical_row(
        [Fraction(-1)] + [Fraction(0)] * p.n, Fraction(0), False))
    sol = _fm_solve(rows, p.n + 1, maximize_first=True)
    if sol is None:
        raise ValueError("set is empty")
    return tuple(sol[1:]), sol[0]


# ---------------------------------------------------------------------------
# facet structure
# ---------------------------------------------------------------------------


def is_minimal(p: PolyhedralSet) -> MinimalityResult:
    """Check every facet is essential (its removal changes the set).

    Facet j is essential iff some point violates facet j while satisfying
    all the others. The witness is the first inessential index.
    """
    require_normalized(p)
    for j, fj in enumerate(p.facets, start=1):
        cons = []
        for i, fi in enumerate(p.facets, start=1):
            if i == j:
                continue
            cons.append((fi.eta, LE, fi.kappa))
        cons.append((tuple(-v for v in fj.eta), LT, -fj.kappa))
        if not feasible(cons, p.n).feasible:
            return MinimalityResult(False, j)
    return MinimalityResult(True, None)


def _face_system(p: PolyhedralSet, indices):
    cons = []
    idx = set(indices)
    for i, f in enumerate(p.facets, start=1):
        rel = EQ if i in idx else LE
        cons.append((f.eta, rel, f.kappa))
    return cons


def face_witness(p: PolyhedralSet, indices):
    """Exact point of the face F_I inside p, or None when the face is empty.

    For cones the apex does not count: the witness must be nonzero, so a
    face meeting the cone only at the origin reports None.
    """
    require_normalized(p)
    cons = _face_system(p, indices)
    if p.kind == CONE:
        # scale invariance: a nonzero point can be scaled until some
        # coordinate equals +-1, so 2n slice probes decide nonemptiness
        for m in range(p.n):
            for sign in (1, -1):
                extra = [(tuple(1 if j == m else 0 for j in range(p.n)), EQ, sign)]
                res = feasible(cons + extra, p.n)
                if res.feasible:
                    return res.witness
        return None
    res = feasible(cons, p.n)
    return res.witness if res.feasible else None


def active_faces(p: PolyhedralSet) -> list[FaceIndexSet]:
    """All subsets I of facets whose face F_I meets the set.

    Includes the empty set when the set itself is nonempty. For cones the
    apex is excluded, so a face is listed only if it contains a nonzero
    point. Supersets of empty faces are pruned.
    """
    require_normalized(p)
    return [fi for fi, _ in _active_faces_with_witnesses(p)]


def _active_faces_with_witnesses(p: PolyhedralSet):
    nfac = len(p.facets)
    if nfac > SUBSET_ENUM_LIMIT:
        raise ScaleLimitExceeded(
            f"{nfac} facets exceed the subset enumeration bound {SUBSET_ENUM_LIMIT}")
    dead: list[frozenset] = []
    found = []
    for size in range(nfac + 1):
        for combo in itertools.combinations(range(1, nfac + 1), size):
            cset = frozenset(combo)
            if any(d <= cset for d in dead):
                continue
            w = face_witness(p, combo)
            if w is None:
                dead.append(cset)
            else:
                found.append((FaceIndexSet(combo), w))
    return found


def saturation_check(etas) -> bool:
    """True iff the integer vectors are independent and span a saturated
    sublattice (all Smith invariant factors equal to 1)."""
    rows = [list(e) for e in etas]
    if not rows:
        raise ValueError("saturation of an empty family is undefined")
    if intlinalg.rational_rank(rows) != len(rows):
        return False
    factors, _, _ = intlinalg.smith_normal_form(rows)
    return len(factors) == len(rows) and all(f == 1 for f in factors)


def _full_active_set(p: PolyhedralSet, point):
    out = []
    for i, f in enumerate(p.facets, start=1):
        val = sum(Fraction(a) * Fraction(b) for a, b in zip(f.eta, point))
        if val == f.kappa:
            out.append(i)
    return tuple(out)


def unimodularity_report(p: PolyhedralSet) -> UnimodularityReport:
    """Run the four structural checks with witnesses for each failure.

    Checks: minimality, primitive conormals, simple vertices (every
    zero-dimensional face has exactly n active facets), and saturation of
    the conormal family of every nonempty active face. For cones the apex
    is excluded throughout, so vertices never arise there.
    """
    require_normalized(p)
    minimal = is_minimal(p)
    primitive, primitive_witness = True, None
    for i, f in enumerate(p.facets, start=1):
        if intlinalg.vector_gcd(f.eta) != 1:
            primitive, primitive_witness = False, i
            break
    faces = _active_faces_with_witnesses(p)
    simple, simple_witness = True, None
    seen_vertices = set()
    saturated, saturated_witness = True, None
    for fi, witness in faces:
        if not fi.indices:
            continue
        etas = [p.facets[i - 1].eta for i in fi]
        if saturated and not saturation_check(etas):
            saturated, saturated_witness = False, fi
        if simple and intlinalg.rational_rank([list(e) for e in etas]) == p.n:
            vertex = tuple(Fraction(v) for v in witness)
            if vertex not in seen_vertices:
                seen_vertices.add(vertex)
                if len(_full_active_set(p, vertex)) != p.n:
                    simple, simple_witness = False, vertex
    return UnimodularityReport(
        minimal=minimal.minimal,
        minimal_witness=minimal.witness,
        primitive=primitive,
        primitive_witness=primitive_witness,
        simple_vertices=simple,
        simple_witness=simple_witness,
        saturated_faces=saturated,
        saturated_witness=saturated_witness,
    )


def convexity_class(p: PolyhedralSet) -> ConvexityReport:
    """Rank of the conormal family; k = n - rank counts split line factors."""
    require_normalized(p)
    rank = intlinalg.rational_rank([list(e) for e in p.etas])
    k = p.n - rank
    return ConvexityReport(rank, k, "strongly_convex" if k == 0 else "weakly_convex")


def is_good_cone(p: PolyhedralSet) -> GoodConeResult:
    """Off-apex unimodularity verdict for a cone."""
    require_normalized(p)
    if p.kind != CONE:
        raise NotACone("goodness is defined for cones only")
    report = unimodularity_report(p)
    return GoodConeResult(report.is_unimodular, report)


def split_weakly_convex(p: PolyhedralSet) -> SplittingReport:
    """Split off the line factors of a weakly convex unimodular set.

    Finds an integer change of basis with determinant +-1 carrying the
    lattice spanned by the conormals onto the first n-k coordinates. The
    transformed conormals then have last k coordinates zero and their
    truncations define the projected strongly convex set.

    Raises:
        NotUnimodular: when the conormal span is not saturated in the
            integer lattice, or the projected set fails its checks.
    """
    require_normalized(p)
    rows = [list(e) for e in p.etas]
    factors, _, _ = intlinalg.smith_normal_form(rows)
    rank = intlinalg.rational_rank(rows)
    if len(factors) != rank or any(f != 1 for f in factors):
        raise NotUnimodular("conormal span is not saturated in the lattice")
    k = p.n - rank
    _, pivot_cols = intlinalg.hermite_normal_form(rows)
    completion = intlinalg.unimodular_row_completion(rows)
    change = intlinalg.transpose(intlinalg.invert_unimodular(completion))
    new_facets = []
    for f in p.facets:
        transformed = [sum(change[r][c] * f.eta[c] for c in range(p.n))
                       for r in range(p.n)]
        if any(v != 0 for v in transformed[rank:]):
            raise AssertionError("basis change failed to zero the tail coordinates")
        new_facets.append((tuple(transformed[:rank]), f.kappa))
    projected = polyhedral_set(rank, new_facets, kind=p.kind, orientation=UPPER)
    if convexity_class(projected).k != 0:
        raise NotUnimodular("projected set is not strongly convex")
    if not unimodularity_report(projected).is_unimodular:
        raise NotUnimodular("projected set fails the unimodularity checks")
    return SplittingReport(
        k=k,
        coordinate_indices=tuple(c + 1 for c in pivot_cols),
        unimodular_change=tuple(tuple(row) for row in change),
        projected_set=projected,
    )


def homotopy_report(p: PolyhedralSet) -> HomotopyReport:
    """Symbolic homotopy summary induced by the splitting.

    The k split line factors contribute a free abelian factor of rank k to
    the fundamental group; everything else is carried by the core manifold
    of the projected strongly convex set.
    """
    sr = split_weakly_convex(p)
    if sr.k == 0:
        pi1 = "pi_1(M_core)"
    else:
        pi1 = f"Z^{sr.k} x pi_1(M_core)"
    return HomotopyReport(
        k=sr.k,
        pi0="trivial",
        pi1=pi1,
        pi_higher="pi_m(M_core) for m >= 2",
    )
