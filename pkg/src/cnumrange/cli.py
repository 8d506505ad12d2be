"""``crange`` command line: ranges, family unions, joint ranges, certificates, fixtures."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .crange import boundary_trace, classify_range, sample_range, star_center_default
from .family import MatrixFamily, SimplexGrid, family_slices, load_family_manifest
from .geom2d import Region2, certify_convex, certify_star_center, convex_hull, kernel_estimate, region_to_svg
from .jointrange import MatrixTuple, flat_dimension, joint_family_slices, sample_joint
from .matcore import is_hermitian, matrix_from_json
from .repro import FIXTURES, repro

COMMANDS = ("range", "family", "joint", "certify", "repro")
FORMATS = ("csv", "json", "svg")

EXIT_OK, EXIT_INPUT, EXIT_UNCERTIFIED = 0, 1, 2


class InputError(Exception):
    """Bad input; the message is already anchored to a file and line."""


@dataclass
class JobSpec:
    command: str
    c: Optional[str] = None
    a: List[str] = field(default_factory=list)
    manifest: Optional[str] = None
    fixture: Optional[str] = None
    grid: Optional[int] = None
    angles: int = 720
    samples: int = 20000
    seed: int = 0
    tol: float = 1e-9
    output: str = "crange_out"
    formats: List[str] = field(default_factory=lambda: ["json"])
    mu: Optional[List[float]] = None
    kernel: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if not self.output:
            raise ValueError("output prefix must be non-empty")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ValueError(f"unknown formats {bad}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "JobSpec":
        return cls(**json.loads(text))


def _load_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}:0: cannot read file: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _parse(path: str, parser):
    obj = _load_json(path)
    try:
        return parser(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}:1: {exc}") from exc


def load_matrix(path: str) -> np.ndarray:
    return _parse(path, matrix_from_json)


def load_tuple(path: str) -> MatrixTuple:
    return _parse(path, MatrixTuple.from_json)


class Writer:
    """Ordered, single-threaded artifact writer."""

    def __init__(self, prefix: str, formats):
        self.prefix = prefix
        self.formats = set(formats)
        self.written: List[str] = []

    def put(self, name: str, text: str):
        ext = name.rsplit(".", 1)[-1]
        if ext not in self.formats:
            return
        path = f"{self.prefix}_{name}"
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        self.written.append(path)


def _c(z) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def _need(spec: JobSpec, what: str):
    if what == "c" and not spec.c:
        raise InputError("<args>:1: --c is required")
    if what == "a" and not spec.a:
        raise InputError("<args>:1: at least one --a is required")


def cmd_range(spec: JobSpec, out: Writer) -> tuple:
    _need(spec, "c")
    _need(spec, "a")
    C, A = load_matrix(spec.c), load_matrix(spec.a[0])
    if C.shape != A.shape:
        raise InputError(f"{spec.a[0]}:1: dimension {A.shape[0]} does not match C ({C.shape[0]})")
    cloud = sample_range(C, A, spec.samples, spec.seed)
    out.put("cloud.csv", cloud.to_csv())
    summary = {"count": cloud.count, "star_center": _c(star_center_default(C, A)), "diameter": cloud.diameter}
    try:
        cls = classify_range(C, A)
        summary["class"] = cls.kind
    except ValueError as exc:
        summary["class"] = f"error: {exc}"
    if is_hermitian(C):
        curve = boundary_trace(C, A, spec.angles)
        out.put("boundary.csv", curve.to_csv())
        R = Region2([curve.polygon()])
        summary["inscription_error"] = curve.inscription_error()
    else:
        R = Region2([convex_hull(cloud.points)])
    out.put("region.svg", region_to_svg(R, points=cloud.points[:2000]))
    return summary, EXIT_OK


def _family_inputs(spec: JobSpec):
    if spec.manifest:
        m = _parse(spec.manifest, load_family_manifest)
        return m["C"], m["family"], m["grid"], m["angles"], m["samples"], m["seed"]
    _need(spec, "c")
    _need(spec, "a")
    C = load_matrix(spec.c)
    gens = [load_matrix(p) for p in spec.a]
    try:
        fam = MatrixFamily(gens)
    except ValueError as exc:
        raise InputError(f"{spec.a[0]}:1: {exc}") from exc
    grid = spec.grid or SimplexGrid.default(fam.m).resolution
    return C, fam, grid, spec.angles, spec.samples, spec.seed


def _family_region(spec: JobSpec):
    C, fam, grid, angles, samples, seed = _family_inputs(spec)
    if C.shape[0] != fam.n:
        raise InputError(f"{spec.c or spec.manifest}:1: dimension {C.shape[0]} does not match the generators ({fam.n})")
    S = family_slices(C, fam, SimplexGrid(fam.m, grid), angles, samples, seed)
    return C, fam, S


def cmd_family(spec: JobSpec, out: Writer) -> tuple:
    C, fam, S = _family_region(spec)
    summary = {"slices": len(S), "convex_slices": S.convex_slices, "membership_tol": S.membership_tol}
    if S.convex_slices:
        R = S.region("W_C(F)")
        convex, witness = certify_convex(R, tol=S.membership_tol, seed=spec.seed)
        summary.update(convex=convex, convexity_witness=None if witness is None else _c(witness))
        K = None
        if spec.kernel:
            K = kernel_estimate(R, spec.kernel, tol=S.membership_tol, seed=spec.seed)
            summary["kernel_points"] = len(K)
        out.put("region.json", json.dumps(R.to_json()))
        out.put("region.svg", region_to_svg(R, kernel=K))
    else:
        pts = S.points()
        summary["cloud_delta"] = S.cloud_delta()
        out.put("cloud.csv", "re,im\n" + "".join(f"{float(z.real)!r},{float(z.imag)!r}\n" for z in pts))
        out.put("region.svg", region_to_svg(Region2([convex_hull(pts)]), points=pts[:4000]))
    return summary, EXIT_OK


def cmd_joint(spec: JobSpec, out: Writer) -> tuple:
    _need(spec, "c")
    _need(spec, "a")
    C = load_matrix(spec.c)
    tuples = [load_tuple(p) for p in spec.a]
    for p, T in zip(spec.a, tuples):
        if T.n != C.shape[0]:
            raise InputError(f"{p}:1: tuple dimension {T.n} does not match C ({C.shape[0]})")
    if len(tuples) == 1:
        cloud = sample_joint(C, tuples[0], spec.samples, spec.seed)
        out.put("cloud.csv", cloud.to_csv())
        return {"count": cloud.count, "real": cloud.is_real, "flat_dimension": flat_dimension(tuples[0])}, EXIT_OK
    grid = SimplexGrid(len(tuples), spec.grid or SimplexGrid.default(len(tuples)).resolution)
    slices = joint_family_slices(C, tuples, grid, spec.samples, spec.seed)
    if hasattr(slices[0], "vertices"):
        out.put("slices.json", json.dumps([s.to_json() for s in slices]))
        return {"slices": len(slices), "exact": True}, EXIT_OK
    out.put("cloud.csv", "".join(s.to_csv() if k == 0 else s.to_csv().split("\n", 1)[1]
                                 for k, s in enumerate(slices)))
    return {"slices": len(slices), "exact": False}, EXIT_OK


def cmd_certify(spec: JobSpec, out: Writer) -> tuple:
    _need(spec, "c")
    _need(spec, "a")
    C = load_matrix(spec.c)
    if not is_hermitian(C):
        raise InputError(f"{spec.c}:1: certification needs a Hermitian C (exact convex slices)")
    if len(spec.a) == 1:
        A = load_matrix(spec.a[0])
        R = Region2([boundary_trace(C, A, spec.angles).polygon()])
        mu = star_center_default(C, A)
        tol = spec.tol
    else:
        if spec.mu is None:
            raise InputError("<args>:1: --mu is required when certifying a family")
        _, _, S = _family_region(spec)
        R = S.region()
        tol = max(spec.tol, S.membership_tol)
    if spec.mu is not None:
        mu = complex(spec.mu[0], spec.mu[1] if len(spec.mu) > 1 else 0.0)
    cert = certify_star_center(R, mu, tol=tol)
    out.put("region.svg", region_to_svg(R, kernel=[mu]))
    summary = {"mu": _c(mu), "checked_rays": cert.checked_rays, "violations": len(cert.violations),
               "verdict": "certified" if cert.valid else "not certified"}
    if cert.violations:
        z, lam = cert.violations[0]
        summary["first_violation"] = {"target": _c(z), "lambda": lam}
    out.put("certificate.json", json.dumps(summary))
    return summary, EXIT_OK if cert.valid else EXIT_UNCERTIFIED


def cmd_repro(spec: JobSpec, out: Writer) -> tuple:
    if spec.fixture not in FIXTURES:
        raise InputError(f"<args>:1: unknown fixture {spec.fixture!r}; known: {', '.join(FIXTURES)}")
    report = repro(spec.fixture, spec.seed)
    for name in sorted(report.artifacts):
        out.put(name, report.artifacts[name])
    summary = report.summary()
    out.put("report.json", json.dumps(summary, indent=2))
    return summary, EXIT_OK if report.passed else EXIT_UNCERTIFIED


HANDLERS = {"range": cmd_range, "family": cmd_family, "joint": cmd_joint, "certify": cmd_certify,
            "repro": cmd_repro}


def run(spec: JobSpec, stdout=None) -> int:
    stdout = stdout or sys.stdout
    out = Writer(spec.output, spec.formats)
    try:
        summary, code = HANDLERS[spec.command](spec, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    summary = {"command": spec.command, **summary, "outputs": out.written}
    print(json.dumps(summary, sort_keys=True, default=str), file=stdout)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crange", description="C-numerical ranges and their unions")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--c", help="matrix C (JSON literal file)")
        sp.add_argument("--a", action="append", default=[], help="matrix or tuple file; repeat for families")
        sp.add_argument("--manifest", help="family manifest JSON")
        sp.add_argument("--grid", type=int)
        sp.add_argument("--angles", type=int, default=720)
        sp.add_argument("--samples", type=int, default=20000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--out", default="crange_out", help="output path prefix")
        sp.add_argument("--format", default="json", help="comma list from csv,json,svg")
        sp.add_argument("--mu", help="candidate star center as re,im")
        sp.add_argument("--kernel", type=int, default=0, help="kernel grid resolution (0 = skip)")

    for name in ("range", "family", "joint", "certify"):
        common(sub.add_parser(name))
    rp = sub.add_parser("repro")
    rp.add_argument("fixture", help=", ".join(FIXTURES))
    common(rp)
    return p


def spec_from_args(ns) -> JobSpec:
    mu = None
    if ns.mu:
        try:
            mu = [float(x) for x in ns.mu.split(",")]
        except ValueError as exc:
            raise InputError(f"<args>:1: bad --mu {ns.mu!r}") from exc
    return JobSpec(command=ns.command, c=ns.c, a=list(ns.a), manifest=ns.manifest,
                   fixture=getattr(ns, "fixture", None), grid=ns.grid, angles=ns.angles, samples=ns.samples,
                   seed=ns.seed, tol=ns.tol, output=ns.out,
                   formats=[f for f in ns.format.split(",") if f], mu=mu, kernel=ns.kernel)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(ns)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
