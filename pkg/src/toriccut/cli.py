"""Command-line front end with deterministic JSON and CSV reports.

Input is a JSON document describing the facets of a polyhedral set; every
subcommand echoes that document, adds its own payload, and exits with a
contract code: 0 success, 2 malformed input, 3 validation failure, 4 desk
scale exceeded, 5 no convergence.
"""

import argparse
import itertools
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__, contactcone, cutmodel, kahlerpotential, polylattice
from .errors import (EmptyFace, NoConvergence, NotInterior,
                     ScaleLimitExceeded, ToricError)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID = 3
EXIT_SCALE = 4
EXIT_NO_CONVERGENCE = 5

DEFAULT_TOLERANCES = {"newton_tol": 1e-9, "newton_max_iter": 200}


class InputError(Exception):
    """Malformed document, flag payload, or points file (exit code 2)."""


@dataclass
class LoadedDocument:
    pset: polylattice.PolyhedralSet
    echo: dict
    tolerances: dict


def _expect(condition, message: str) -> None:
    if not condition:
        raise InputError(message)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _parse_rational(value) -> Fraction:
    _expect(isinstance(value, str),
            'kappa must be an exact rational string like "1/2"')
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {value!r}") from exc


def load_document(path: str) -> LoadedDocument:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc
    _expect(isinstance(raw, dict), "top level must be an object")
    extra = set(raw) - {"schema_version", "n", "kind", "orientation",
                        "facets", "options"}
    _expect(not extra, f"unknown keys: {sorted(extra)}")
    _expect(raw.get("schema_version") == "1", 'schema_version must be "1"')
    n = raw.get("n")
    _expect(_is_int(n) and n >= 1, "n must be a positive integer")
    kind = raw.get("kind", "general")
    _expect(kind in ("general", "cone"), 'kind must be "general" or "cone"')
    orientation = raw.get("orientation", "upper")
    _expect(orientation in ("upper", "lower"),
            'orientation must be "upper" or "lower"')
    facets_raw = raw.get("facets")
    _expect(isinstance(facets_raw, list) and facets_raw,
            "facets must be a nonempty array")
    facets = []
    echo_facets = []
    for pos, item in enumerate(facets_raw, start=1):
        _expect(isinstance(item, dict) and set(item) == {"eta", "kappa"},
                f"facet {pos} must be an object with eta and kappa")
        eta = item["eta"]
        _expect(isinstance(eta, list) and len(eta) == n
                and all(_is_int(v) for v in eta),
                f"facet {pos}: eta must be an integer array of length {n}")
        kappa = _parse_rational(item["kappa"])
        if kind == "cone":
            _expect(kappa == 0, f'facet {pos}: cone offsets must be "0"')
        facets.append((tuple(eta), kappa))
        echo_facets.append({"eta": list(eta), "kappa": str(kappa)})
    options = raw.get("options", {})
    _expect(isinstance(options, dict)
            and set(options) <= {"auto_primitivize", "tolerances"},
            "options may contain auto_primitivize and tolerances")
    auto = options.get("auto_primitivize", False)
    _expect(isinstance(auto, bool), "auto_primitivize must be a boolean")
    tol_raw = options.get("tolerances", {})
    _expect(isinstance(tol_raw, dict)
            and set(tol_raw) <= set(DEFAULT_TOLERANCES),
            f"tolerances may contain {sorted(DEFAULT_TOLERANCES)}")
    tolerances = dict(DEFAULT_TOLERANCES)
    if "newton_max_iter" in tol_raw:
        val = tol_raw["newton_max_iter"]
        _expect(_is_int(val) and val >= 1,
                "newton_max_iter must be a positive integer")
        tolerances["newton_max_iter"] = val
    if "newton_tol" in tol_raw:
        val = tol_raw["newton_tol"]
        _expect(isinstance(val, (int, float)) and not isinstance(val, bool)
                and val > 0, "newton_tol must be positive")
        tolerances["newton_tol"] = float(val)
    kind_const = polylattice.CONE if kind == "cone" else polylattice.GENERAL
    pset = polylattice.normalize(
        polylattice.polyhedral_set(n, facets, kind_const, orientation),
        auto_primitivize=auto)
    echo = {
        "schema_version": "1",
        "n": n,
        "kind": kind,
        "orientation": orientation,
        "facets": echo_facets,
        "options": {"auto_primitivize": auto,
                    "tolerances": dict(sorted(tolerances.items()))},
    }
    return LoadedDocument(pset, echo, tolerances)


def jsonable(value):
    """Recursive conversion to JSON-safe values; rationals become strings."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, polylattice.FaceIndexSet):
        return [int(i) for i in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {key: jsonable(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def _render(doc: LoadedDocument, report: dict) -> str:
    out = {
        "input": doc.echo,
        "provenance": {
            "tool": "toriccut",
            "version": __version__,
            "tolerances": dict(sorted(doc.tolerances.items())),
        },
        "report": jsonable(report),
    }
    return json.dumps(out, sort_keys=True, indent=2) + "\n"


def _set_payload(p: polylattice.PolyhedralSet) -> dict:
    return {
        "n": p.n,
        "kind": p.kind,
        "facets": [{"eta": list(f.eta), "kappa": str(f.kappa)}
                   for f in p.facets],
    }


def cmd_validate(doc: LoadedDocument) -> int:
    p = doc.pset
    rep = polylattice.unimodularity_report(p)
    payload = {
        "minimal": rep.minimal,
        "minimal_witness": rep.minimal_witness,
        "primitive": rep.primitive,
        "primitive_witness": rep.primitive_witness,
        "simple_vertices": rep.simple_vertices,
        "simple_witness": rep.simple_witness,
        "saturated_faces": rep.saturated_faces,
        "saturated_witness": rep.saturated_witness,
        "is_unimodular": rep.is_unimodular,
    }
    ok = rep.is_unimodular
    if p.kind == polylattice.CONE:
        good = polylattice.is_good_cone(p)
        payload["good_cone"] = good.good
        ok = ok and good.good
    sys.stdout.write(_render(doc, {"validate": payload}))
    return EXIT_OK if ok else EXIT_INVALID


def cmd_classify(doc: LoadedDocument) -> int:
    p = doc.pset
    conv = polylattice.convexity_class(p)
    payload = {"convexity": {"rank": conv.rank, "k": conv.k,
                             "class": conv.label}}
    if conv.k > 0:
        try:
            split = polylattice.split_weakly_convex(p)
            payload["splitting"] = {
                "k": split.k,
                "coordinate_indices": list(split.coordinate_indices),
                "unimodular_change": [list(r)
                                      for r in split.unimodular_change],
                "projected": _set_payload(split.projected_set),
            }
        except ToricError as exc:
            payload["splitting"] = {"error": str(exc)}
    try:
        hom = polylattice.homotopy_report(p)
        payload["homotopy"] = {"k": hom.k, "pi0": hom.pi0, "pi1": hom.pi1,
                               "pi_higher": hom.pi_higher}
    except ToricError as exc:
        payload["homotopy"] = {"error": str(exc)}
    code = EXIT_OK
    if p.kind == polylattice.CONE:
        if polylattice.is_good_cone(p).good:
            cls = contactcone.classify(p)
            payload["contact"] = {
                "good": True,
                "k_contact": cls.k_contact,
                "type_label": cls.type_label,
                "reeb_vector": (list(cls.reeb_vector)
                                if cls.reeb_vector is not None else None),
            }
        else:
            payload["contact"] = {"good": False, "k_contact": None,
                                  "type_label": None, "reeb_vector": None}
            code = EXIT_INVALID
    sys.stdout.write(_render(doc, {"classify": payload}))
    return code


def _parse_floats(text: str, n: int, what: str) -> list[float]:
    parts = [piece.strip() for piece in text.split(",")]
    try:
        values = [float(piece) for piece in parts]
    except ValueError as exc:
        raise InputError(f"bad {what} {text!r}") from exc
    _expect(len(values) == n, f"{what} needs {n} coordinates")
    return values


def _load_points(path: str, n: int) -> list[list[float]]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    points = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        text = stripped.replace(",", " ")
        try:
            values = [float(piece) for piece in text.split()]
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: bad point") from exc
        _expect(len(values) == n, f"{path}:{lineno}: expected {n} coordinates")
        points.append(values)
    return points


def _parse_grid(spec: str, n: int) -> list[list[float]]:
    parts = spec.split(",")
    _expect(len(parts) == n, f"grid needs {n} axis specs min:max:steps")
    axes = []
    for part in parts:
        pieces = part.split(":")
        _expect(len(pieces) == 3, f"bad axis spec {part!r}")
        try:
            lo, hi = float(pieces[0]), float(pieces[1])
            steps = int(pieces[2])
        except ValueError as exc:
            raise InputError(f"bad axis spec {part!r}") from exc
        _expect(steps >= 1, "steps must be at least 1")
        if steps == 1:
            axes.append([lo])
        else:
            axes.append([lo + i * (hi - lo) / (steps - 1)
                         for i in range(steps)])
    return [list(combo) for combo in itertools.product(*axes)]


def cmd_potential(doc: LoadedDocument, points_path, grid_spec) -> int:
    _expect((points_path is None) != (grid_spec is None),
            "exactly one of --points and --grid is required")
    p = doc.pset
    header = ([f"x{i}" for i in range(1, p.n + 1)] + ["sp", "guillemin"]
              + [f"gtilde{i}" for i in range(1, p.n + 1)])
    lines = [",".join(header)]
    skipped = 0
    if points_path is not None:
        rows = _load_points(points_path, p.n)
    else:
        rows = _parse_grid(grid_spec, p.n)
    for row in rows:
        try:
            pt = kahlerpotential.interior_point(p, row)
        except NotInterior:
            if points_path is not None:
                lines.append(",".join([repr(float(v)) for v in row]
                                      + ["NA"] * (p.n + 2)))
            else:
                skipped += 1
            continue
        values = ([float(v) for v in row]
                  + [kahlerpotential.symplectic_potential(pt),
                     kahlerpotential.guillemin_potential(pt)]
                  + [float(v) for v in kahlerpotential.legendre_map(pt)])
        lines.append(",".join(repr(v) for v in values))
    if grid_spec is not None:
        lines.append(f"# skipped: {skipped}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_metric(doc: LoadedDocument, points_path: str) -> int:
    p = doc.pset
    entries = []
    for row in _load_points(points_path, p.n):
        try:
            data = kahlerpotential.point_data(p, row)
        except NotInterior as exc:
            entries.append({"x": row, "error": str(exc)})
            continue
        eye = np.eye(p.n)
        entry = {
            "x": row,
            "G": data.G,
            "G_inv": data.G_inv,
            "J": data.J,
            "g": data.g,
            "inverse_residual": float(
                np.max(np.abs(data.G @ data.G_inv - eye))),
            "compatibility_residual": float(
                np.max(np.abs(data.g - data.omega @ data.J))),
        }
        if len(p.facets) == 1:
            facet = p.facets[0]
            slack = float(facet.kappa) - float(
                np.array(facet.eta, dtype=float) @ np.asarray(row))
            entry["one_cut"] = kahlerpotential.one_cut_inverse(
                facet.eta, slack)
        entries.append(entry)
    sys.stdout.write(_render(doc, {"metric": {"points": entries}}))
    return EXIT_OK


def cmd_invert(doc: LoadedDocument, target_text: str) -> int:
    p = doc.pset
    target = _parse_floats(target_text, p.n, "target")
    result = kahlerpotential.invert_legendre(
        p, target, tol=doc.tolerances["newton_tol"],
        max_iter=doc.tolerances["newton_max_iter"])
    payload = {"invert": {
        "target": target,
        "x": [float(v) for v in result.point.x],
        "iterations": result.iterations,
        "residual": result.residual,
    }}
    sys.stdout.write(_render(doc, payload))
    return EXIT_OK


def _freeness_table(p: polylattice.PolyhedralSet) -> list[dict]:
    table = []
    for face in polylattice.active_faces(p):
        for j in range(1, len(p.facets) + 1):
            if j in face:
                continue
            try:
                free = cutmodel.free_action_certificate(p, tuple(face), j)
            except EmptyFace:
                continue
            table.append({"face": list(face), "facet": j, "free": free})
    return table


def _parse_ambient(text: str, p: polylattice.PolyhedralSet):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad ambient JSON: {exc}") from exc
    _expect(isinstance(raw, dict) and set(raw) <= {"x", "theta", "z"},
            "ambient must be an object with x, z, and optional theta")
    x = raw.get("x")
    _expect(isinstance(x, list) and len(x) == p.n
            and all(isinstance(v, (int, float)) for v in x),
            f"ambient x must be a {p.n}-vector")
    theta = raw.get("theta", [0.0] * p.n)
    _expect(isinstance(theta, list) and len(theta) == p.n
            and all(isinstance(v, (int, float)) for v in theta),
            f"ambient theta must be a {p.n}-vector")
    z_raw = raw.get("z")
    _expect(isinstance(z_raw, list) and len(z_raw) == len(p.facets),
            f"ambient z must list {len(p.facets)} complex entries")
    zs = []
    for pos, item in enumerate(z_raw, start=1):
        if isinstance(item, (int, float)):
            zs.append(complex(item))
        elif (isinstance(item, list) and len(item) == 2
              and all(isinstance(v, (int, float)) for v in item)):
            zs.append(complex(item[0], item[1]))
        else:
            raise InputError(f"ambient z entry {pos} must be a number "
                             "or a [re, im] pair")
    return cutmodel.ambient_point(x, theta, zs)


def cmd_cut(doc: LoadedDocument, ambient_text) -> int:
    p = doc.pset
    kernel = cutmodel.delzant_kernel(p)
    payload = {
        "pi_matrix": [list(row) for row in kernel.pi_matrix],
        "kernel_basis": [list(vec) for vec in kernel.kernel_basis],
        "surjective_onto_lattice": kernel.surjective_onto_lattice,
        "freeness": _freeness_table(p),
    }
    if ambient_text is not None:
        ambient = _parse_ambient(ambient_text, p)
        rep = cutmodel.canonical_representative(p, ambient)
        stab = cutmodel.stabilizer(p, rep.x)
        payload["representative"] = {
            "x": [float(v) for v in rep.x],
            "active": list(rep.active),
            "theta": [float(v) for v in rep.theta],
        }
        payload["stabilizer"] = {
            "generators": [list(g) for g in stab.generators],
            "rank": stab.rank,
            "saturated": stab.saturated,
        }
    sys.stdout.write(_render(doc, {"cut": payload}))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toric",
        description="Polyhedral validation, canonical potentials and "
                    "metrics, quotient points, and cone classification.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "classify"):
        cmd = sub.add_parser(name)
        cmd.add_argument("input")
    potential = sub.add_parser("potential")
    potential.add_argument("input")
    potential.add_argument("--points")
    potential.add_argument("--grid")
    metric = sub.add_parser("metric")
    metric.add_argument("input")
    metric.add_argument("--points", required=True)
    invert = sub.add_parser("invert")
    invert.add_argument("input")
    invert.add_argument("--target", required=True)
    cut = sub.add_parser("cut")
    cut.add_argument("input")
    cut.add_argument("--ambient")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        doc = load_document(args.input)
        if args.command == "validate":
            return cmd_validate(doc)
        if args.command == "classify":
            return cmd_classify(doc)
        if args.command == "potential":
            return cmd_potential(doc, args.points, args.grid)
        if args.command == "metric":
            return cmd_metric(doc, args.points)
        if args.command == "invert":
            return cmd_invert(doc, args.target)
        return cmd_cut(doc, args.ambient)
    except InputError as exc:
        print(f"toric: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScaleLimitExceeded as exc:
        print(f"toric: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except NoConvergence as exc:
        print(f"toric: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except ToricError as exc:
        print(f"toric: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    raise SystemExit(main())
