"""Point-level model of the torus quotient behind a polyhedral set.

Ties together the kernel lattice of the facet map, membership in the zero
level of the ambient moment map, canonical per-orbit representatives with
their residual angle reduction, stabilizer data at boundary points, and
the freeness certificate for stepwise cutting.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import intlinalg, polylattice
from .errors import EmptyFace, NotInterior, NotOnLevel, PointOutside

ACTIVITY_TOL = 1e-9
LEVEL_TOL = 1e-9
SEAM_TOL = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DelzantKernel:
    """Kernel data of the integer facet map e_i -> -eta_i."""

    pi_matrix: tuple[tuple[int, ...], ...]
    kernel_basis: tuple[tuple[int, ...], ...]
    surjective_onto_lattice: bool


@dataclass(frozen=True)
class CutPoint:
    """Quotient point: base point, active facets, canonical angle vector."""

    x: tuple
    active: polylattice.FaceIndexSet
    theta: tuple[float, ...]


@dataclass(frozen=True)
class AmbientPoint:
    """Raw point of the ambient product model before any quotient."""

    x: tuple[float, ...]
    theta: tuple[float, ...]
    z: tuple[complex, ...]


@dataclass(frozen=True)
class Stabilizer:
    """Conormal generators of the subtorus fixing a boundary point."""

    generators: tuple[tuple[int, ...], ...]
    rank: int
    saturated: bool


def ambient_point(x, theta, z) -> AmbientPoint:
    return AmbientPoint(tuple(float(v) for v in x),
                        tuple(float(v) for v in theta),
                        tuple(complex(v) for v in z))


def delzant_kernel(p: polylattice.PolyhedralSet) -> DelzantKernel:
    """Integer kernel basis and lattice-surjectivity flag of the facet map.

    The map sends the i-th standard basis vector to minus the i-th stored
    conormal, so its matrix has columns -eta_i. The kernel basis spans the
    full integer kernel, which is saturated by construction.
    """
    polylattice.require_normalized(p)
    nfac = len(p.facets)
    pi = [[-f.eta[row] for f in p.facets] for row in range(p.n)]
    basis = intlinalg.integer_kernel_basis(pi, nfac)
    factors, _, _ = intlinalg.smith_normal_form(pi)
    surjective = len(factors) == p.n and all(f == 1 for f in factors)
    return DelzantKernel(tuple(tuple(row) for row in pi),
                         tuple(basis), surjective)


def _exact_coordinates(x):
    vals = []
    for v in x:
        if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
            vals.append(Fraction(v))
        else:
            return None
    return vals


def _active_set(p: polylattice.PolyhedralSet, x) -> polylattice.FaceIndexSet:
    """Facets tight at x; exact for rational input, 1e-9 slack for floats.

    Raises PointOutside when some slack is negative beyond the same rule.
    """
    exact = _exact_coordinates(x)
    out = []
    for i, f in enumerate(p.facets, start=1):
        if exact is not None:
            slack = f.kappa - sum(a * v for a, v in zip(f.eta, exact))
            if slack < 0:
                raise PointOutside(f"facet {i} violated by {-slack}")
            if slack == 0:
                out.append(i)
        else:
            slack = float(f.kappa) - sum(
                float(a) * float(v) for a, v in zip(f.eta, x))
            if slack < -ACTIVITY_TOL:
                raise PointOutside(f"facet {i} violated by {-slack:.3e}")
            if slack < ACTIVITY_TOL:
                out.append(i)
    return polylattice.FaceIndexSet(tuple(out))


def stabilizer(p: polylattice.PolyhedralSet, x) -> Stabilizer:
    """Generators of the subtorus fixing the fiber over x.

    These are the conormals of the facets active at x. The saturation flag
    records whether they form a basis of a saturated sublattice, which is
    what smoothness of the quotient needs; an empty family is vacuously
    saturated.
    """
    polylattice.require_normalized(p)
    active = _active_set(p, x)
    gens = tuple(p.facets[i - 1].eta for i in active)
    if not gens:
        return Stabilizer((), 0, True)
    rank = intlinalg.rational_rank([list(g) for g in gens])
    return Stabilizer(gens, rank, polylattice.saturation_check(gens))


def moment_level_membership(p: polylattice.PolyhedralSet,
                            a: AmbientPoint) -> bool:
    """True iff every |z_i|^2 equals the i-th slack within 1e-9."""
    polylattice.require_normalized(p)
    for f, z in zip(p.facets, a.z):
        slack = float(f.kappa) - sum(
            float(e) * v for e, v in zip(f.eta, a.x))
        if abs(abs(z) ** 2 - slack) > LEVEL_TOL:
            return False
    return True


def _babai_reduce(v, basis_vectors):
    # nearest-plane rounding: subtracts an integer combination so the
    # result lands in the Gram-Schmidt fundamental domain of the lattice
    gs = []
    for b in basis_vectors:
        w = np.array(b, dtype=float)
        for g in gs:
            w = w - (w @ g) / (g @ g) * g
        gs.append(w)
    out = np.array(v, dtype=float)
    for j in range(len(basis_vectors) - 1, -1, -1):
        coeff = round(float((out @ gs[j]) / (gs[j] @ gs[j])))
        out = out - coeff * np.asarray(basis_vectors[j], dtype=float)
    return out


def _reduce_theta(p: polylattice.PolyhedralSet, theta,
                  active: polylattice.FaceIndexSet) -> tuple[float, ...]:
    """Canonical angle representative modulo the residual gauge freedom.

    Active conormals act with free phases, so theta is only defined modulo
    their real span plus 2*pi times the integer lattice. The span part is
    removed by orthogonal projection; what survives of the integer lattice
    is generated by the projected tail of a unimodular completion of the
    span's saturated sublattice, and Babai rounding against that generator
    set picks one representative per coset. A final componentwise floor
    into [0, 2*pi) with a seam snap makes the result stable under float
    noise on either side of 0.
    """
    n = p.n
    v = np.array([float(c) for c in theta])
    if len(active) > 0:
        rows = [list(p.facets[i - 1].eta) for i in active]
        span_rank = intlinalg.rational_rank(rows)
        if span_rank == n:
            return tuple(0.0 for _ in range(n))
        perp = intlinalg.integer_kernel_basis(rows)
        saturated = intlinalg.integer_kernel_basis(
            [list(r) for r in perp], n)
        completion = intlinalg.unimodular_row_completion(saturated)
        tail = completion[len(saturated):]
        span = np.array(rows, dtype=float).T
        u, _, _ = np.linalg.svd(span)
        basis = u[:, :span_rank]
        project = np.eye(n) - basis @ basis.T
        v = project @ v
        lattice = [TWO_PI * (project @ np.array(t, dtype=float))
                   for t in tail]
        v = _babai_reduce(v, lattice)
    out = np.mod(v, TWO_PI)
    out[out >= TWO_PI - SEAM_TOL] = 0.0
    return tuple(float(c) for c in out)


def canonical_representative(p: polylattice.PolyhedralSet,
                             a: AmbientPoint) -> CutPoint:
    """Gauge-fixed quotient point for an ambient point on the zero level.

    Rotating each nonzero z_i onto the positive real axis spends the phase
    t_i = -arg(z_i), which shifts theta by t_i times the i-th conormal.
    Phases over active facets stay free and are quotiented out by the
    angle reduction.

    Raises:
        NotOnLevel: the moduli of z do not match the slacks.
    """
    polylattice.require_normalized(p)
    if not moment_level_membership(p, a):
        raise NotOnLevel("|z_i|^2 does not match the facet slacks")
    x = tuple(float(v) for v in a.x)
    active = _active_set(p, x)
    theta = np.array([float(v) for v in a.theta])
    for i, (f, z) in enumerate(zip(p.facets, a.z), start=1):
        if i in active or z == 0:
            continue
        theta = theta - cmath.phase(z) * np.array(f.eta, dtype=float)
    return CutPoint(x, active, _reduce_theta(p, theta, active))


def cut_point(p: polylattice.PolyhedralSet, x, theta=None) -> CutPoint:
    """Build a quotient point directly from base-space data.

    Raises:
        PointOutside: x violates a facet inequality.
    """
    polylattice.require_normalized(p)
    active = _active_set(p, x)
    if theta is None:
        theta = [0.0] * p.n
    return CutPoint(tuple(x), active, _reduce_theta(p, theta, active))


def embed_action_angle(p: polylattice.PolyhedralSet, x,
                       theta) -> AmbientPoint:
    """Section over the interior: all z_i real nonnegative square roots.

    Raises:
        NotInterior: some slack is not strictly positive.
    """
    polylattice.require_normalized(p)
    zs = []
    for i, f in enumerate(p.facets, start=1):
        slack = float(f.kappa) - sum(
            float(e) * float(v) for e, v in zip(f.eta, x))
        if slack <= 0:
            raise NotInterior(f"facet {i} slack {slack:.3e} is not positive")
        zs.append(complex(math.sqrt(slack), 0.0))
    return AmbientPoint(tuple(float(v) for v in x),
                        tuple(float(v) for v in theta), tuple(zs))


def free_action_certificate(p: polylattice.PolyhedralSet, indices,
                            j: int) -> bool:
    """Whether the j-th cutting circle acts freely over the face of indices.

    The lattice form of the freeness argument: the conormals of the
    already-active facets together with the new one must span a saturated
    sublattice, otherwise a finite stabilizer survives.

    Raises:
        EmptyFace: the combined face does not meet the set.
    """
    polylattice.require_normalized(p)
    fixed = tuple(indices)
    nfac = len(p.facets)
    for i in (*fixed, j):
        if not 1 <= i <= nfac:
            raise ValueError(f"facet index {i} out of range")
    if j in fixed:
        raise ValueError(f"facet {j} is already in the fixed set")
    combined = tuple(sorted({*fixed, j}))
    if polylattice.face_witness(p, combined) is None:
        raise EmptyFace(f"facets {combined} cut out an empty face")
    return polylattice.saturation_check(
        [p.facets[i - 1].eta for i in combined])


def moment_map(cp: CutPoint) -> np.ndarray:
    """Image of a quotient point, which is just its base coordinates."""
    return np.array([float(v) for v in cp.x])
