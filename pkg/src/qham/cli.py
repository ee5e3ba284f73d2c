"""Command-line pipeline for surface representation spaces ``M_{g,l} // U``.

Subcommands ``verify``, ``solve``, ``stratify`` and ``reduce`` each write one
JSON report.  Exit status: 0 when every check passes, 1 when a check fails,
2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import report
from .errors import EmptyLevel, NotOnLevel, QHamError, UnsupportedType
from .level import LevelSolverConfig, level_residual, solve_level_one
from .lie import DEFAULT_LOG_RADIUS, GroupSpec
from .spaces import class_generator, surface_space
from .strata import (AMBIGUOUS, StrataConfig, classify_isotropy, isotropy_qham_check,
                     kernel_restriction_check, reduced_form, stratify)
from .verify import VerifierConfig, verify_space

logger = logging.getLogger("qham")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
EMPTY = "empty representation space"


class UsageError(Exception):
    pass


@dataclass
class SurfaceData:
    genus: int
    group: GroupSpec
    classes: list = field(default_factory=list)  # angles (SU(2)) or phase lists

    def __post_init__(self):
        if self.genus < 0:
            raise UsageError("--genus must be non-negative")
        if self.genus + len(self.classes) < 1:
            raise UsageError("need genus >= 1 or at least one class (g + l >= 1)")

    def space(self):
        gens = [class_generator(self.group, c) for c in self.classes]
        return surface_space(self.group, self.genus, gens)

    def metadata(self):
        return {"group": str(self.group), "scale": self.group.scale, "genus": self.genus,
                "classes": self.classes}


def normalize_angle(theta: float) -> float:
    """Representative in ``[0, pi]``: ``theta`` and ``2 pi - theta`` give the same SU(2) class."""
    t = float(np.mod(theta, 2 * np.pi))
    return 2 * np.pi - t if t > np.pi else t


def parse_classes(text: str | None, group: GroupSpec) -> list:
    """``"0.4,1.1"`` for SU(2) angles; ``"a:b:c,..."`` for eigenvalue phases of larger groups."""
    if not text:
        return []
    out = []
    for i, item in enumerate(text.split(",")):
        item = item.strip()
        try:
            vals = [float(v) for v in item.split(":")]
        except ValueError:
            raise UsageError(f"--classes entry {i + 1} ({item!r}) is not a number or ':'-separated phases")
        if group.is_su2 and len(vals) == 1:
            out.append(normalize_angle(vals[0]))
            continue
        if len(vals) != group.n:
            raise UsageError(f"--classes entry {i + 1}: {group} needs {group.n} ':'-separated phases")
        if group.special and abs(np.exp(1j * sum(vals)) - 1) > 1e-9:
            raise UsageError(f"--classes entry {i + 1}: phases must sum to 0 mod 2 pi for {group}")
        out.append(vals)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qham", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", default="SU(2)", help="SU(n) or U(n)")
    common.add_argument("--scale", type=float, default=1.0, help="inner product (X|Y) = -scale Re tr XY")
    common.add_argument("--genus", type=int, default=1)
    common.add_argument("--classes", default="", help="comma-separated class angles or ':'-separated phases")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="report path (default: stdout)")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--tol-level", type=float, default=1e-10)
    solver.add_argument("--restarts", type=int, default=64)
    solver.add_argument("--log-radius", type=float, default=DEFAULT_LOG_RADIUS)
    solver.add_argument("--max-iters", type=int, default=200)

    checks = argparse.ArgumentParser(add_help=False)
    checks.add_argument("--fd-step", type=float, default=1e-4)
    checks.add_argument("--tol-exact", type=float, default=1e-9)
    checks.add_argument("--tol-fd", type=float, default=1e-5)
    checks.add_argument("--angle-tol", type=float, default=1e-6)

    v = sub.add_parser("verify", parents=[common, checks], help="check the axioms at random points")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--no-convergence", action="store_true", help="skip the h/2 rerun of axiom (i)")

    s = sub.add_parser("solve", parents=[common, solver], help="find points with mu(x) = 1")
    s.add_argument("--points-out", help="write solutions as a point file")

    st = sub.add_parser("stratify", parents=[common, solver, checks],
                        help="solve, then stratify the level set by isotropy type")
    st.add_argument("--points-out", help="write solutions as a point file")

    r = sub.add_parser("reduce", parents=[common, solver, checks], help="reduced form at given level points")
    r.add_argument("--points", required=True, help="point file (JSON list of points)")
    return p


def _configs(args):
    vcfg = VerifierConfig(h=getattr(args, "fd_step", 1e-4), tol_exact=getattr(args, "tol_exact", 1e-9),
                          tol_fd=getattr(args, "tol_fd", 1e-5), angle_tol=getattr(args, "angle_tol", 1e-6),
                          samples=getattr(args, "samples", 100), seed=args.seed,
                          convergence=not getattr(args, "no_convergence", False))
    scfg = None
    if hasattr(args, "tol_level"):
        scfg = LevelSolverConfig(max_iters=args.max_iters, tol_level=args.tol_level,
                                 restarts=args.restarts, seed=args.seed, log_radius=args.log_radius)
    return vcfg, scfg


def _document(command, surface, space, config):
    return {"schema": report.SCHEMA, "command": command, "run": {**surface.metadata(), "seed": config.get("seed"),
            "config": config}, "space": repr(space)}


def _point_summary(rf, kr=None):
    out = {"isotropy": rf.isotropy.tag, "isotropy_dim": rf.isotropy.algebra_dim,
           "level_tangent_dim": rf.level_tangent_dim, "orbit_dim": rf.orbit_dim,
           "slice_dim": rf.slice_dim, "rank": rf.rank, "nondegenerate": rf.nondegenerate,
           "representative_drift": rf.representative_drift, "closedness": rf.closedness,
           "reduced_form": rf.matrix}
    if kr is not None:
        out["kernel_restriction_angle"] = kr.principal_angle
        out["kernel_restriction_pass"] = kr.passed
    return out


def _reduced_ok(rf, cfg: StrataConfig):
    closed_ok = rf.closedness is None or rf.closedness < cfg.closedness_tol
    return (rf.nondegenerate and rf.slice_dim % 2 == 0 and rf.representative_drift < cfg.drift_tol
            and closed_ok)


def cmd_verify(surface: SurfaceData, vcfg: VerifierConfig):
    space = surface.space()
    doc = _document("verify", surface, space, {"verifier": asdict(vcfg), "seed": vcfg.seed})
    rep = verify_space(space, vcfg)
    doc["verification"] = rep.to_dict()
    doc["passed"] = rep.passed
    doc["result"] = "pass" if rep.passed else "fail"
    return doc


def _solve(space, scfg):
    try:
        return solve_level_one(space, scfg, starts=space.fixture_points())
    except EmptyLevel as exc:
        return exc


def cmd_solve(surface: SurfaceData, scfg: LevelSolverConfig):
    space = surface.space()
    doc = _document("solve", surface, space, {"solver": asdict(scfg), "seed": scfg.seed})
    sol = _solve(space, scfg)
    if isinstance(sol, EmptyLevel):
        doc.update(result=EMPTY, passed=True, solutions=0, failures=len(sol.failures))
        return doc, []
    doc.update(result="nonempty", passed=True, solutions=len(sol), failures=len(sol.failures),
               max_residual=max(sol.residuals), iterations=sol.iterations, start_index=sol.start_index,
               points=[report.encode_point(x) for x in sol.points])
    return doc, sol.points


def cmd_stratify(surface: SurfaceData, vcfg: VerifierConfig, scfg: LevelSolverConfig):
    space = surface.space()
    cfg = StrataConfig.from_configs(vcfg, scfg, seed=scfg.seed)
    doc = _document("stratify", surface, space,
                    {"verifier": asdict(vcfg), "solver": asdict(scfg), "strata": asdict(cfg), "seed": scfg.seed})
    sol = _solve(space, scfg)
    if isinstance(sol, EmptyLevel):
        doc.update(result=EMPTY, passed=True, solutions=0, failures=len(sol.failures), strata=[])
        return doc, []
    records = stratify(space, sol.points, cfg)
    strata, passed = [], True
    for rec in records:
        entry = {"type": rec.tag, "isotropy_dim": rec.algebra_dim, "quotient_group": rec.quotient_group,
                 "count": len(rec.points)}
        if rec.tag == AMBIGUOUS:
            strata.append(entry)
            continue
        krs = [kernel_restriction_check(space, x, r.isotropy, cfg) for x, r in zip(rec.points, rec.results)]
        qham = []
        for x, r in zip(rec.points, rec.results):
            try:
                qham.append(isotropy_qham_check(space, x, r.isotropy, cfg))
            except UnsupportedType:
                break
        ok = (rec.consistent and rec.symplectic and rec.even and rec.max_drift < cfg.drift_tol
              and all(_reduced_ok(r, cfg) for r in rec.results) and all(k.passed for k in krs)
              and all(q.passed for q in qham))
        passed &= ok
        entry.update(level_tangent_dim=rec.level_tangent_dim, orbit_dim=rec.orbit_dim,
                     quotient_dim=rec.quotient_dim, reduced_rank=rec.reduced_rank,
                     consistent=rec.consistent, symplectic=rec.symplectic, even=rec.even,
                     max_drift=rec.max_drift, max_closedness=rec.max_closedness,
                     max_kernel_restriction_angle=max(k.principal_angle for k in krs),
                     passed=ok)
        if qham:
            entry["isotropy_qham"] = {"normalizer_residual": max(q.normalizer_residual for q in qham),
                                      "closedness": max(q.closedness for q in qham),
                                      "nondegenerate": all(q.nondegenerate for q in qham)}
        entry["points"] = [_point_summary(r, k) for r, k in zip(rec.results, krs)]
        strata.append(entry)
    doc.update(result="nonempty", passed=bool(passed), solutions=len(sol), failures=len(sol.failures),
               max_residual=max(sol.residuals), strata=strata)
    return doc, sol.points


def cmd_reduce(surface: SurfaceData, points, vcfg: VerifierConfig, scfg: LevelSolverConfig):
    """Reduced form at each supplied point; raises :class:`NotOnLevel` for an off-level point."""
    space = surface.space()
    cfg = StrataConfig.from_configs(vcfg, scfg, seed=scfg.seed)
    doc = _document("reduce", surface, space,
                    {"verifier": asdict(vcfg), "solver": asdict(scfg), "strata": asdict(cfg), "seed": scfg.seed})
    results, passed = [], True
    for i, x in enumerate(points):
        if len(x) != space.n_components or any(c.shape != (space.group.n,) * 2 for c in x):
            raise UsageError(f"point {i} does not match the space ({space.n_components} "
                             f"{space.group.n}x{space.group.n} matrices expected)")
        x = space.project(x)
        res = level_residual(space, x, scfg.log_radius)
        if not res < scfg.tol_level:
            raise NotOnLevel(res, scfg.tol_level)
        K = classify_isotropy(space, x, cfg)
        rf = reduced_form(space, x, cfg, True, K, scfg.log_radius)
        ok = _reduced_ok(rf, cfg)
        passed &= ok
        results.append({**_point_summary(rf, kernel_restriction_check(space, x, K, cfg)),
                        "level_residual": res, "passed": ok})
    doc.update(result="pass" if passed else "fail", passed=bool(passed), points=results)
    return doc


def _emit(doc, path):
    text = report.dumps(doc)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(args) -> int:
    try:
        group = GroupSpec.parse(args.group, args.scale)
        surface = SurfaceData(args.genus, group, parse_classes(args.classes, group))
        vcfg, scfg = _configs(args)
    except (UsageError, ValueError) as exc:
        print(f"qham: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    t0 = time.perf_counter()
    try:
        if args.command == "verify":
            doc = cmd_verify(surface, vcfg)
        elif args.command == "solve":
            doc, pts = cmd_solve(surface, scfg)
            if args.points_out and pts:
                report.write_points(pts, args.points_out)
        elif args.command == "stratify":
            doc, pts = cmd_stratify(surface, vcfg, scfg)
            if args.points_out and pts:
                report.write_points(pts, args.points_out)
        else:
            try:
                points = report.read_points(args.points)
            except (OSError, ValueError) as exc:
                raise UsageError(f"--points {args.points}: {exc}")
            doc = cmd_reduce(surface, points, vcfg, scfg)
    except UsageError as exc:
        print(f"qham: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotOnLevel as exc:
        print(f"qham: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except QHamError as exc:
        print(f"qham: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    doc["timing"] = {"seconds": time.perf_counter() - t0}
    _emit(doc, args.out)
    if doc.get("result") == EMPTY:
        print(f"qham: {EMPTY} (no solution of mu = 1 in {args.restarts} restarts)", file=sys.stderr)
    return EXIT_OK if doc["passed"] else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
