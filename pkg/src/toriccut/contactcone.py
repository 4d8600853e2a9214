"""Contact layer over polyhedral cones.

Covers the strong/weak convexity classification with its Reeb data, the
canonical contact form on the unit level, the hypersurface-induced almost
contact metric structure, and a dilation defect showing the canonical
metric is not a cone metric.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import intlinalg, kahlerpotential, polylattice
from .errors import (IdentityViolation, NotACone, NotGood, NotInterior,
                     PointOutside, ScaleLimitExceeded, WeaklyConvex,
                     ZeroPoint)

SASAKIAN = "sasakian_type"
NON_SASAKIAN = "non_sasakian_type"
UNIT_TOL = 1e-12
BOUNDARY_TOL = 1e-12
ACM_TOL = 1e-9
DEFECT_STEP = 1e-5


@dataclass(frozen=True)
class MomentCone:
    """The closed cone, apex included, that a contact level maps onto."""

    cone: polylattice.PolyhedralSet
    includes_apex: bool


@dataclass(frozen=True)
class ReebTypeResult:
    """Verdict plus certificate: a positive pairing vector when the cone is
    pointed, otherwise a nonzero cone point annihilated by every conormal."""

    is_reeb_type: bool
    witness: tuple


@dataclass(frozen=True)
class ContactClassification:
    good: bool
    convexity: polylattice.ConvexityReport
    reeb_vector: tuple[int, ...] | None
    type_label: str
    k_contact: bool


@dataclass(frozen=True)
class ContactPoint:
    """Unit-sphere point inside the cone with angles and radial coordinate."""

    x: tuple
    theta: tuple[float, ...]
    t: float = 0.0


@dataclass(frozen=True, eq=False)
class AlmostContactMetric:
    """Induced structure on the unit-level hypersurface, expressed in the
    columns of `frame` (sphere-tangent directions then angular directions).
    """

    alpha: np.ndarray
    xi: np.ndarray
    phi: np.ndarray
    metric: np.ndarray
    frame: np.ndarray


def _require_cone(p: polylattice.PolyhedralSet) -> None:
    polylattice.require_normalized(p)
    if p.kind != polylattice.CONE:
        raise NotACone("operation needs a conical set")


def moment_cone(p: polylattice.PolyhedralSet) -> MomentCone:
    """Close the cone by adjoining the apex; facet data is unchanged."""
    _require_cone(p)
    return MomentCone(p, True)


def extreme_rays(p: polylattice.PolyhedralSet) -> tuple[tuple[int, ...], ...]:
    """Primitive generators of the one-dimensional faces, computed exactly.

    Enumerates facet subsets of size n - 1 and keeps each rank-(n-1)
    kernel direction whose sign choice satisfies every inequality.

    Raises:
        WeaklyConvex: the cone contains a line, so no extreme rays exist.
    """
    _require_cone(p)
    rows = [list(f.eta) for f in p.facets]
    if len(rows) > polylattice.SUBSET_ENUM_LIMIT:
        raise ScaleLimitExceeded(
            f"{len(rows)} facets exceed the ray enumeration bound")
    n = p.n
    if intlinalg.rational_rank(rows) < n:
        raise WeaklyConvex("cone contains a line; no extreme rays")

    def inside(vec):
        return all(sum(a * b for a, b in zip(f.eta, vec)) <= 0
                   for f in p.facets)

    found = set()
    if n == 1:
        for cand in ((1,), (-1,)):
            if inside(cand):
                found.add(cand)
        return tuple(sorted(found))
    for combo in itertools.combinations(range(len(rows)), n - 1):
        sub = [rows[i] for i in combo]
        if intlinalg.rational_rank(sub) != n - 1:
            continue
        direction = tuple(intlinalg.rational_kernel_basis(sub)[0])
        for cand in (direction, tuple(-v for v in direction)):
            if inside(cand):
                found.add(cand)
    return tuple(sorted(found))


def is_reeb_type(p: polylattice.PolyhedralSet) -> ReebTypeResult:
    """Decide whether some pairing vector is strictly positive on the cone.

    Pointed case: solve the exact feasibility system <r, X> >= 1 over the
    extreme rays r. Non-pointed case: the first lineality direction is a
    nonzero cone point with all pairings zero, refuting positivity. The
    verdict is cross-checked against the conormal rank.

    Raises:
        NotGood: the cone fails the apex-excluded unimodularity checks.
    """
    _require_cone(p)
    goodness = polylattice.is_good_cone(p)
    if not goodness.good:
        raise NotGood("cone is not good; classification out of scope")
    rows = [list(f.eta) for f in p.facets]
    if intlinalg.rational_rank(rows) < p.n:
        direction = tuple(intlinalg.rational_kernel_basis(rows)[0])
        result = ReebTypeResult(False, direction)
    else:
        cons = [(tuple(-c for c in ray), polylattice.LE, Fraction(-1))
                for ray in extreme_rays(p)]
        res = polylattice.feasible(cons, p.n)
        if not res.feasible:
            raise AssertionError("pointed cone rejected its ray system")
        result = ReebTypeResult(True, tuple(res.witness))
    if result.is_reeb_type != (polylattice.convexity_class(p).k == 0):
        raise AssertionError("ray feasibility disagrees with conormal rank")
    return result


def reeb_vector(p: polylattice.PolyhedralSet) -> tuple[int, ...]:
    """Sum of the inward conormals; strictly positive on the punctured cone.

    Raises:
        WeaklyConvex: the conormals do not span, so no such vector exists.
    """
    _require_cone(p)
    conv = polylattice.convexity_class(p)
    if conv.k > 0:
        raise WeaklyConvex(f"conormal span has codimension {conv.k}")
    vec = tuple(-sum(f.eta[j] for f in p.facets) for j in range(p.n))
    for ray in extreme_rays(p):
        if sum(a * b for a, b in zip(ray, vec)) <= 0:
            raise AssertionError("candidate fails on an extreme ray")
    return vec


def classify(p: polylattice.PolyhedralSet) -> ContactClassification:
    """Good-cone classification: strongly convex cones carry a Reeb vector
    and the metric-compatible label, weakly convex ones do not.

    Raises:
        NotGood: non-good cones are orbifold territory and not classified.
    """
    _require_cone(p)
    goodness = polylattice.is_good_cone(p)
    if not goodness.good:
        raise NotGood("cone is not good; classification out of scope")
    conv = polylattice.convexity_class(p)
    strongly = conv.k == 0
    return ContactClassification(
        good=True,
        convexity=conv,
        reeb_vector=reeb_vector(p) if strongly else None,
        type_label=SASAKIAN if strongly else NON_SASAKIAN,
        k_contact=strongly,
    )


def _unit_norm_ok(x) -> bool:
    if all(isinstance(v, (int, Fraction)) and not isinstance(v, bool)
           for v in x):
        return sum(Fraction(v) ** 2 for v in x) == 1
    total = sum(float(v) ** 2 for v in x)
    return abs(math.sqrt(total) - 1.0) <= UNIT_TOL


def contact_point(p: polylattice.PolyhedralSet, x, theta=None, t: float = 0.0,
                  strict: bool = True) -> ContactPoint:
    """Validated unit-sphere point of the cone.

    With strict=True every facet pairing must be strictly on the interior
    side; strict=False admits boundary points for purely algebraic use.

    Raises:
        ValueError: x is not on the unit sphere.
        NotInterior: a facet pairing vanishes while strict=True.
        PointOutside: x violates a facet inequality outright.
    """
    _require_cone(p)
    xs = tuple(x)
    if len(xs) != p.n:
        raise ValueError(f"expected a point in R^{p.n}")
    if not _unit_norm_ok(xs):
        raise ValueError("point is not on the unit sphere")
    for i, f in enumerate(p.facets, start=1):
        pairing = sum(float(a) * float(v) for a, v in zip(f.eta, xs))
        if pairing > BOUNDARY_TOL:
            raise PointOutside(f"facet {i} violated by {pairing:.3e}")
        if strict and pairing > -BOUNDARY_TOL:
            raise NotInterior(f"facet {i} pairing vanishes at x")
    if theta is None:
        theta = (0.0,) * p.n
    return ContactPoint(xs, tuple(float(v) for v in theta), float(t))


def canonical_contact_form(cp: ContactPoint):
    """Contact covector and Reeb field of the unit level in the ambient
    (x, theta) frame: both have components (0, ..., 0, x_1, ..., x_n).

    The pairing alpha(xi) equals the squared norm of x, hence 1; exact
    input types are preserved so rational unit points verify exactly.
    """
    n = len(cp.x)
    alpha = (0,) * n + tuple(cp.x)
    xi = (0,) * n + tuple(cp.x)
    return alpha, xi


def normalize_moment(p: polylattice.PolyhedralSet, x) -> tuple[float, ...]:
    """Scale a nonzero cone point onto the unit sphere; idempotent.

    Raises:
        ZeroPoint: the apex has no direction.
        PointOutside: x is not in the cone.
    """
    _require_cone(p)
    v = np.array([float(c) for c in x])
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroPoint("cannot normalize the apex")
    for i, f in enumerate(p.facets, start=1):
        if float(np.array(f.eta, dtype=float) @ v) > BOUNDARY_TOL * norm:
            raise PointOutside(f"facet {i} violated")
    return tuple(v / norm)


def _ambient_data(p: polylattice.PolyhedralSet, cp: ContactPoint):
    scale = math.exp(cp.t)
    x = np.array([float(v) for v in cp.x]) * scale
    pt = kahlerpotential.interior_point(p, x)
    _, j_mat, h = kahlerpotential.block_tensors(pt)
    g_inv = kahlerpotential.hessian_metric_inverse(
        kahlerpotential.hessian_metric(pt))
    nu_x = g_inv @ x
    c = math.sqrt(float(x @ nu_x))
    nu = np.concatenate([nu_x, np.zeros(p.n)]) / c
    xi_amb = -(j_mat @ nu)
    return x, j_mat, h, nu, xi_amb


def induced_acm_structure(p: polylattice.PolyhedralSet,
                          cp: ContactPoint) -> AlmostContactMetric:
    """Hypersurface-induced structure on the unit level at cp.

    The metric-unit normal of the sphere level is nu, the field xi is
    -J nu, alpha is its metric dual on the tangent frame, and phi is the
    tangential part of J. The frame takes the n - 1 rotations of x in the
    base block against its largest coordinate, then all angular directions.
    All four structure identities are verified before returning.

    Raises:
        NotInterior: cp touches the cone boundary.
        IdentityViolation: a structure identity fails beyond 1e-9.
    """
    _require_cone(p)
    x, j_mat, h, nu, xi_amb = _ambient_data(p, cp)
    n = p.n
    dim = 2 * n - 1
    m = int(np.argmax(np.abs(x)))
    cols = []
    for jdx in range(n):
        if jdx == m:
            continue
        col = np.zeros(2 * n)
        col[jdx] = x[m]
        col[m] = -x[jdx]
        cols.append(col)
    for jdx in range(n):
        col = np.zeros(2 * n)
        col[n + jdx] = 1.0
        cols.append(col)
    frame = np.column_stack(cols)
    basis = np.column_stack([frame, nu])
    h_nu = h @ nu
    alpha = frame.T @ (h @ xi_amb)
    metric = frame.T @ h @ frame
    xi_coords = np.linalg.solve(basis, xi_amb)
    if abs(xi_coords[dim]) > ACM_TOL:
        raise IdentityViolation("xi is not tangent to the level")
    phi_cols = []
    for k in range(dim):
        image = j_mat @ frame[:, k]
        image = image - float(image @ h_nu) * nu
        phi_cols.append(np.linalg.solve(basis, image)[:dim])
    acm = AlmostContactMetric(alpha, xi_coords[:dim],
                              np.column_stack(phi_cols), metric, frame)
    _verify_structure(acm)
    return acm


def _verify_structure(acm: AlmostContactMetric) -> None:
    dim = acm.alpha.shape[0]
    pairing = float(acm.alpha @ acm.xi)
    if abs(pairing - 1.0) > ACM_TOL:
        raise IdentityViolation(f"alpha(xi) = {pairing!r}, expected 1")
    if float(np.max(np.abs(acm.phi @ acm.xi))) > ACM_TOL:
        raise IdentityViolation("phi does not annihilate xi")
    square = acm.phi @ acm.phi + np.eye(dim) - np.outer(acm.xi, acm.alpha)
    if float(np.max(np.abs(square))) > ACM_TOL:
        raise IdentityViolation("phi squared misses -id + xi (x) alpha")
    compat = (acm.phi.T @ acm.metric @ acm.phi
              - acm.metric + np.outer(acm.alpha, acm.alpha))
    if float(np.max(np.abs(compat))) > ACM_TOL:
        raise IdentityViolation("metric is not phi-compatible")


def induced_vs_canonical_reeb(p: polylattice.PolyhedralSet,
                              cp: ContactPoint) -> float:
    """Gap between the hypersurface xi and the angular field with
    components x, as a max-abs ambient difference. Reported only; the two
    fields agree for no fixture of the canonical cutting metric.
    """
    _require_cone(p)
    x, _, _, _, xi_amb = _ambient_data(p, cp)
    canonical = np.concatenate([np.zeros(p.n), x])
    return float(np.max(np.abs(xi_amb - canonical)))


def cone_metric_defect(p: polylattice.PolyhedralSet, cp: ContactPoint,
                       step: float = DEFECT_STEP) -> float:
    """Max-abs entry of d/dt|0 of the dilated metric minus twice the metric.

    The dilation sends (x, theta) to (e^t x, theta); a metric cone would
    make the derivative exactly twice the metric, so a positive value is
    the obstruction. Central differences in t with the given step.

    Raises:
        NotInterior: cp touches the cone boundary.
    """
    _require_cone(p)
    base_x = np.array([float(v) for v in cp.x]) * math.exp(cp.t)

    def pulled_back(tv: float) -> np.ndarray:
        pt = kahlerpotential.interior_point(p, math.exp(tv) * base_x)
        g_small = kahlerpotential.hessian_metric(pt)
        g_inv = kahlerpotential.hessian_metric_inverse(g_small)
        out = np.zeros((2 * p.n, 2 * p.n))
        out[:p.n, :p.n] = math.exp(2.0 * tv) * g_small
        out[p.n:, p.n:] = g_inv
        return out

    derivative = (pulled_back(step) - pulled_back(-step)) / (2.0 * step)
    return float(np.max(np.abs(derivative - 2.0 * pulled_back(0.0))))
