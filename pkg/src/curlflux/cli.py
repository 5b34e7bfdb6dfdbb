"""Command-line driver: configuration ingestion, dispatch, result emission.

Subcommands: trace, stokes, maximal, br, validate, example, reproduce.
Output is CSV with a '#'-prefixed metadata header, or the same table as JSON.
Runs are deterministic for a fixed configuration: quadrature orders and all
seeds are pinned, so repeated runs emit byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import fields as flds
from . import geometry as geo
from . import selection, stokes, traces
from .testfns import ScalarTestFunction, radial_bump, scalar_dictionary, smooth_bump

FLOAT_FMT = "%.12g"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        params = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
        if getattr(args, "config", None):
            with open(args.config) as fh:
                overrides = json.load(fh)
            params.update(overrides)
        return cls(args.command, params)


@dataclass
class ResultTable:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)
    passed: Optional[bool] = None

    def emit(self, fmt: str = "csv", out=None) -> None:
        out = out or sys.stdout
        if fmt == "json":
            payload = {"metadata": self.metadata, "columns": self.columns,
                       "rows": [[_jsonify(v) for v in r] for r in self.rows]}
            if self.passed is not None:
                payload["passed"] = self.passed
            out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
            return
        for k in sorted(self.metadata):
            out.write(f"# {k}: {self.metadata[k]}\n")
        if self.passed is not None:
            out.write(f"# passed: {self.passed}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return FLOAT_FMT % v
    if isinstance(v, (np.floating,)):
        return FLOAT_FMT % float(v)
    return str(v)


def _jsonify(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


# ---------------------------------------------------------------------------
# spec parsing
# ---------------------------------------------------------------------------


def parse_surface(spec) -> geo.BoundaryManifold:
    """Surface spec: 'disk:r=0.5,z=0.5' or a JSON-style dict."""
    if isinstance(spec, str):
        if ":" in spec:
            shape, rest = spec.split(":", 1)
            kv = dict(item.split("=") for item in rest.split(",") if item)
        else:
            shape, kv = spec, {}
        kv = {k: float(v) for k, v in kv.items()}
    else:
        d = dict(spec)
        shape = d.pop("shape")
        kv = d
    if shape == "disk":
        r = float(kv.get("r", kv.get("radius", 1.0)))
        center = kv.get("center", (kv.get("x", 0.0), kv.get("y", 0.0), kv.get("z", 0.0)))
        normal = kv.get("normal", (0.0, 0.0, 1.0))
        order = int(kv.get("order", geo.DEFAULT_ORDER))
        return geo.disk_manifold(center, r, normal, order=order)
    if shape in ("cap", "spherical_cap"):
        return geo.spherical_cap_manifold(kv.get("center", (0, 0, 0)),
                                          float(kv.get("radius", 1.0)),
                                          float(kv.get("colatitude", np.pi / 2)))
    if shape == "sphere":
        return geo.closed_sphere_manifold(kv.get("center", (0, 0, 0)),
                                          float(kv.get("radius", 1.0)))
    raise ConfigError(f"unknown surface shape {shape!r}")


def parse_region(spec) -> geo.SolidRegion:
    """Region spec: 'cylinder:r=1,z0=0,z1=1' or a JSON-style dict."""
    if isinstance(spec, str):
        if ":" in spec:
            shape, rest = spec.split(":", 1)
            kv = dict(item.split("=") for item in rest.split(",") if item)
            kv = {k: float(v) for k, v in kv.items()}
        else:
            shape, kv = spec, {}
    else:
        d = dict(spec)
        shape = d.pop("shape")
        kv = d
    order = int(kv.get("order", 20))
    if shape == "ball":
        return geo.ball_region(kv.get("center", (0, 0, 0)), float(kv.get("radius", 1.0)),
                               order=order)
    if shape in ("half_ball", "half-ball"):
        return geo.half_ball_region(kv.get("center", (0, 0, 0)),
                                    float(kv.get("radius", 1.0)), order=order)
    if shape == "cylinder":
        return geo.cylinder_region(kv.get("center", (0, 0, 0)), float(kv.get("r", 1.0)),
                                   float(kv.get("z0", 0.0)), float(kv.get("z1", 1.0)),
                                   order=order)
    if shape == "box":
        return geo.box_region(kv.get("center", (0, 0, 0)),
                              kv.get("half_widths", (1.0, 1.0, 1.0)), order=min(order, 16))
    raise ConfigError(f"unknown region shape {shape!r}")


def get_catalog(name: str) -> flds.CatalogEntry:
    if name not in flds.CATALOG_NAMES:
        raise ConfigError(f"unknown catalog field {name!r}; "
                          f"choose one of {', '.join(flds.CATALOG_NAMES)}")
    return flds.catalog(name)


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------


def run(config: RunConfig) -> ResultTable:
    handler = {
        "trace": cmd_trace,
        "stokes": cmd_stokes,
        "maximal": cmd_maximal,
        "br": cmd_br,
        "validate": cmd_validate,
        "example": cmd_example,
        "reproduce": cmd_reproduce,
    }.get(config.command)
    if handler is None:
        raise ConfigError(f"unknown command {config.command!r}")
    table = handler(config.params)
    table.metadata.setdefault("tool", f"curlflux {__version__}")
    table.metadata.setdefault("command", config.command)
    return table


def cmd_trace(p: dict) -> ResultTable:
    entry = get_catalog(p["field"])
    region = parse_region(p.get("region") or "cylinder")
    tcol = geo.build_transversal_collar(region)
    t_grid = _parse_grid(p.get("t_grid") or "2^-2..2^-9")
    side = p.get("side") or "interior"
    rows = []
    for patch in region.boundary:
        man = _manifold_for_patch(patch, region)
        if man is None:
            continue
        tt = traces.estimate_trace_layerwise(entry.vector_field, man, tcol, t_grid, side)
        for x, v, c, r in zip(tt.points, tt.values, tt.converged,
                              tt.tangentiality_residual):
            rows.append([patch.name, x[0], x[1], x[2], v[0], v[1], v[2], bool(c), r])
    return ResultTable(
        ["patch", "x", "y", "z", "trace_x", "trace_y", "trace_z", "converged", "residual"],
        rows, metadata={"field": p["field"], "side": side,
                        "t_grid": ",".join(FLOAT_FMT % t for t in t_grid)})


def _manifold_for_patch(patch, region) -> Optional[geo.BoundaryManifold]:
    if patch.name == "disk":
        uv0 = patch.rule.nodes[:1]
        n = patch.normal(uv0)[0]
        # disk patches store the polar origin as their center
        center = patch.param(np.array([[0.0, 0.0]]))[0]
        radius = region.meta.get("radius", 1.0)
        return geo.disk_manifold(center, radius, n)
    if patch.name == "sphere":
        return geo.closed_sphere_manifold(region.meta["center"], region.meta["radius"])
    return None


def _parse_grid(spec) -> tuple:
    if isinstance(spec, (list, tuple)):
        return tuple(float(v) for v in spec)
    spec = str(spec)
    if ".." in spec and spec.startswith("2^-"):
        lo, hi = spec.replace("2^-", "").split("..")
        hi = hi.replace("2^-", "")
        return tuple(2.0 ** (-k) for k in range(int(lo), int(hi) + 1))
    return tuple(float(v) for v in spec.split(","))


def cmd_stokes(p: dict) -> ResultTable:
    entry = get_catalog(p["field"])
    man = parse_surface(p.get("surface") or "disk:r=1")
    route = p.get("route") or "tangential"
    t = float(p.get("t") or 0.0)
    jmax = int(p.get("delta_max_j") or 12)
    if entry.trace_z_plane is None:
        raise ConfigError(f"catalog field {p['field']!r} carries no face trace")
    rows = []
    meta = {"field": p["field"], "route": route, "t": t}
    if route == "tangential":
        col = geo.build_tangential_collar(man)
        res = stokes.stokes_tangential(entry.trace_z_plane, man, col, t,
                                       j_range=range(2, jmax + 1),
                                       breaks_radii=entry.trace_breaks_radii)
        for d, v in zip(res.deltas, res.delta_values):
            rows.append([d, v])
        meta.update({"t_osc": FLOAT_FMT % res.t_osc, "verdict": res.verdict,
                     "flux": FLOAT_FMT % res.extrapolated if res.converged else "n/a"})
        return ResultTable(["delta", "ramp_integral"], rows, meta)
    if route == "transversal":
        region = parse_region(p.get("region") or "cylinder")
        tcol = geo.build_transversal_collar(region)
        sing = [(0.0, 0.0, t)] if p["field"] == "line_vortex" else []
        out = stokes.stokes_transversal(entry.trace_z_plane, man, tcol, t,
                                        singular_points=sing)
        rows.append([t, out["flux"], out["div_mass"]])
        meta["verdict"] = "CONVERGED"
        return ResultTable(["t", "flux", "div_mass"], rows, meta)
    if route == "mass":
        col = geo.build_tangential_collar(man)
        pairing, mass, diag = stokes.boundary_pairing_mass(
            entry.trace_z_plane, man, col, t, breaks_radii=entry.trace_breaks_radii)
        rows.append([t, mass, pairing, diag.t_osc])
        meta["verdict"] = diag.verdict
        return ResultTable(["t", "flux_mass", "pairing", "t_osc"], rows, meta)
    raise ConfigError(f"unknown stokes route {route!r}")


def cmd_maximal(p: dict) -> ResultTable:
    entry = get_catalog(p["field"])
    region = parse_region(p.get("region") or "cylinder")
    man = parse_surface(p.get("surface") or "disk:r=1")
    tcol = geo.build_transversal_collar(region)
    t_grid = _parse_grid(p.get("t_grid") or
                         ",".join(str(v) for v in np.linspace(0.05, 0.45, 9)))
    lam = float(p.get("lam") or 2.0 ** 2)
    if entry.curl is None:
        raise ConfigError("field carries no curl measure")
    scan = selection.maximal_transversal(entry.curl, man, tcol, t_grid)
    report = selection.good_set_scan(scan, lam)
    rows = [[t, v, ("yes" if (np.isfinite(v) and v <= lam) else "no")]
            for t, v in zip(scan.t_grid, scan.values)]
    return ResultTable(["t", "maximal", "good"], rows,
                       metadata={"field": p["field"], "lambda": lam,
                                 "collar_mass": FLOAT_FMT % scan.collar_mass,
                                 "weak_bound_holds": report.holds})


def cmd_br(p: dict) -> ResultTable:
    from . import birkhoff_rott as br
    grid = p.get("grid") or "16x16"
    n1, n2 = (int(v) for v in str(grid).lower().split("x"))
    gamma = p.get("gamma") or "1,0,0"
    if isinstance(gamma, str):
        gamma = tuple(float(v) for v in gamma.split(","))
    dt = float(p.get("dt") or 0.01)
    steps = int(p.get("steps") or 10)
    dump_every = int(p.get("dump_every") or max(1, steps // 4))
    desing = p.get("delta_br")
    amp = float(p.get("amplitude") or 0.0)
    sheet = br.flat_periodic_sheet(n1, n2, gamma=gamma,
                                   desing=float(desing) if desing else None,
                                   bump_amplitude=amp)
    rows = []
    def dump(step_idx, s):
        x = s.markers.reshape(-1, 3)
        for i, xi in enumerate(x):
            rows.append([step_idx, FLOAT_FMT % s.time, i, xi[0], xi[1], xi[2]])
    dump(0, sheet)
    s = sheet
    for k in range(1, steps + 1):
        s = br.step(s, dt)
        if k % dump_every == 0 or k == steps:
            dump(k, s)
    d = br.diagnostics(s)
    return ResultTable(["step", "time", "marker", "x", "y", "z"], rows,
                       metadata={"grid": f"{n1}x{n2}", "dt": dt, "steps": steps,
                                 "desing": FLOAT_FMT % s.desing,
                                 "circulation": " ".join(FLOAT_FMT % c
                                                         for c in d["circulation"]),
                                 "truncation_error": FLOAT_FMT % d["truncation_error"]})


def cmd_validate(p: dict) -> ResultTable:
    entry = get_catalog(p["field"])
    region = parse_region(p.get("region") or "half_ball")
    phi = smooth_bump(np.asarray(region.ambient_center) + np.array([0.1, 0.0, 0.2]), 2.0)
    from .testfns import random_trig_vector
    other = random_trig_vector(11, n_modes=2, kmax=1.0)
    res = stokes.smooth_validators(entry.vector_field, region, phi, other)
    tol = float(p.get("tol") or 1e-8)
    rows = [[k, v, "pass" if v <= tol else "FAIL"] for k, v in sorted(res.items())]
    ok = all(v <= tol for v in res.values())
    return ResultTable(["identity", "residual", "status"], rows,
                       metadata={"field": p["field"], "tolerance": tol}, passed=ok)


def cmd_example(p: dict) -> ResultTable:
    name = p.get("name") or "annuli"
    if name != "annuli":
        raise ConfigError("example currently ships the dyadic-annuli trace only")
    entry = get_catalog("annuli")
    t = float(p.get("t") or 0.0)
    man = geo.disk_manifold((0, 0, 0), 1.0)
    col = geo.build_tangential_collar(man)
    jmax = int(p.get("delta_max_j") or 10)
    res = stokes.stokes_tangential(entry.trace_z_plane, man, col, t,
                                   j_range=range(1, jmax + 1),
                                   breaks_radii=entry.trace_breaks_radii)
    rows = []
    for j, (d, v) in enumerate(zip(res.deltas, res.delta_values), start=1):
        closed = np.pi * (-1.0) ** (j + 1) * (2.0 / 3.0 - 0.6 * 2.0 ** (-j)) if t == 0 else ""
        rows.append([j, d, v, closed])
    return ResultTable(["j", "delta", "ramp_integral", "closed_form_t0"], rows,
                       metadata={"t": t, "t_osc": FLOAT_FMT % res.t_osc,
                                 "verdict": res.verdict})


# ---------------------------------------------------------------------------
# paper-value reproductions
# ---------------------------------------------------------------------------

REPRODUCE_NAMES = ("maxlaim", "distclaim", "explicitcompute", "gluing", "density",
                   "weak11")


def cmd_reproduce(p: dict) -> ResultTable:
    name = p.get("name")
    fn = {
        "explicitcompute": _repro_explicitcompute,
        "distclaim": _repro_distclaim,
        "maxlaim": _repro_maxlaim,
        "gluing": _repro_gluing,
        "density": _repro_density,
        "weak11": _repro_weak11,
    }.get(name)
    if fn is None:
        raise ConfigError(f"unknown reproduction {name!r}; choose one of {REPRODUCE_NAMES}")
    return fn()


def _repro_explicitcompute() -> ResultTable:
    entry = get_catalog("annuli")
    man = geo.disk_manifold((0, 0, 0), 1.0)
    col = geo.build_tangential_collar(man)
    res = stokes.stokes_tangential(entry.trace_z_plane, man, col, 0.0,
                                   j_range=range(1, 11),
                                   breaks_radii=entry.trace_breaks_radii)
    rows, ok = [], True
    for j, v in enumerate(res.delta_values, start=1):
        closed = np.pi * (-1.0) ** (j + 1) * (2.0 / 3.0 - 0.6 * 2.0 ** (-j))
        err = abs(v - closed)
        ok &= err <= 1e-6
        rows.append([f"I({j})", v, closed, err, "pass" if err <= 1e-6 else "FAIL"])
    osc_ok = res.t_osc >= 4.0 * np.pi / 3.0 - 0.1
    rows.append(["tOsc", res.t_osc, 4.0 * np.pi / 3.0, "", "pass" if osc_ok else "FAIL"])
    nonconv_ok = not res.converged
    rows.append(["verdict", res.verdict, "NON-CONVERGENT", "",
                 "pass" if nonconv_ok else "FAIL"])
    res03 = stokes.stokes_tangential(entry.trace_z_plane, man, col, 0.3,
                                     breaks_radii=entry.trace_breaks_radii)
    rows.append(["t=0.3", res03.verdict, "CONVERGED", "",
                 "pass" if res03.converged else "FAIL"])
    ok = ok and osc_ok and nonconv_ok and res03.converged
    return ResultTable(["quantity", "computed", "expected", "error", "status"],
                       rows, metadata={"name": "explicitcompute"}, passed=ok)


def _repro_distclaim() -> ResultTable:
    entry = get_catalog("line_vortex")
    region = geo.cylinder_region(order=20, n_angular=64)
    tcol = geo.build_transversal_collar(region)
    man = geo.disk_manifold((0, 0, 0), 1.0)
    rows, ok = [], True
    for t in (0.15, 0.3, 0.45):
        out = stokes.stokes_transversal(entry.trace_z_plane, man, tcol, t,
                                        singular_points=[(0.0, 0.0, t)])
        err = abs(out["flux"] - 1.0)
        ok &= err <= 1e-3
        rows.append([f"flux(height={t:g})", out["flux"], 1.0, err,
                     "pass" if err <= 1e-3 else "FAIL"])
    return ResultTable(["quantity", "computed", "expected", "error", "status"],
                       rows, metadata={"name": "distclaim"}, passed=ok)


def _repro_maxlaim() -> ResultTable:
    entry = get_catalog("newtonian")
    region = geo.half_ball_region(order=32, n_angular=96)
    rows, ok = [], True
    eps = 1e-3
    tests = [smooth_bump((0.25, -0.1, 0.0), 0.9, plateau=0.3),
             smooth_bump((0.0, 0.3, 0.0), 0.8, plateau=0.4)]
    for i, phi in enumerate(tests):
        pairing = traces.trace_pairing(entry.curl, entry.vector_field, region, phi)
        pv = traces.pv_face_pairing(entry.trace_z_plane, (0, 0, 0), 1.0, phi, eps)
        err = float(np.linalg.norm(pairing - pv))
        ok &= err <= 1e-3
        rows.append([f"pv_vs_pairing[{i}]", float(np.linalg.norm(pairing)),
                     float(np.linalg.norm(pv)), err, "pass" if err <= 1e-3 else "FAIL"])
    return ResultTable(["quantity", "computed", "oracle", "error", "status"],
                       rows, metadata={"name": "maxlaim", "epsilon": eps}, passed=ok)


def _repro_gluing() -> ResultTable:
    interface = flds.unit_disk_interface()
    pw, mu = flds.make_vortex_sheet(flds.constant_field((1.0, 0.0, 0.0)),
                                    flds.constant_field((0.0, 0.0, 0.0)), interface)
    region = geo.ball_region(radius=1.0, order=20)
    tv = flds.gluing_total_variation(pw, region)
    err = abs(tv - np.pi)
    res_n, res_t = stokes.rankine_hugoniot_check(pw)
    ok = err <= 1e-6 and res_t <= 1e-10
    rows = [["total_variation", tv, np.pi, err, "pass" if err <= 1e-6 else "FAIL"],
            ["rh_normal", res_n, "", "", "report"],
            ["rh_tangential", res_t, 0.0, res_t, "pass" if res_t <= 1e-10 else "FAIL"]]
    return ResultTable(["quantity", "computed", "expected", "error", "status"],
                       rows, metadata={"name": "gluing"}, passed=ok)


def _repro_density() -> ResultTable:
    entry = get_catalog("rigid_rotation")
    center = np.array([0.3, 0.2, 0.7])
    man = geo.disk_manifold(center, 1.0, n_angular=512)
    col = geo.build_tangential_collar(man)
    r_grid = [2.0 ** (-k) for k in range(3, 9)]
    rows, ok = [], True
    angles = np.linspace(0.0, 2.0 * np.pi, 8, endpoint=False) + 0.1
    for i, a in enumerate(angles):
        x0 = man.boundary.point(np.array([a]))[0]
        tau = man.tangent(np.array([a]))[0]
        expected = -float(entry.vector_field.eval(x0[None, :])[0] @ tau)
        dens = stokes.stokes_density(entry.trace_z_plane, man, col, 0.0, x0, r_grid)
        err = abs(dens.limit - expected)
        ok &= err <= 1e-2
        rows.append([f"density[{i}]", dens.limit, expected, err,
                     "pass" if err <= 1e-2 else "FAIL"])
    return ResultTable(["quantity", "computed", "expected", "error", "status"],
                       rows, metadata={"name": "density"}, passed=ok)


def _repro_weak11() -> ResultTable:
    region = geo.cylinder_region(order=16, n_angular=48)
    tcol = geo.build_transversal_collar(region)
    man = geo.disk_manifold((0, 0, 0), 1.0)
    t_grid = np.linspace(0.02, 0.48, 24)
    lams = [2.0 ** k for k in range(-4, 5)]
    rows, ok = [], True
    cases = {"line_vortex": get_catalog("line_vortex").curl,
             "rigid_rotation": get_catalog("rigid_rotation").curl,
             "newtonian": get_catalog("newtonian").curl}
    sheet = flds.SheetPart(geo.disk_patch((0, 0, 0.25), 1.0),
                           lambda pts: np.broadcast_to(np.array([0.0, 1.0, 0.0]),
                                                       (np.atleast_2d(pts).shape[0], 3)).copy())
    cases["concentrated_sheet"] = flds.CurlMeasure(sheet_parts=(sheet,))
    for label, mu in cases.items():
        scan = selection.maximal_transversal(mu, man, tcol, t_grid)
        for lam in lams:
            rep = selection.good_set_scan(scan, lam)
            ok &= rep.holds
            rows.append([label, lam, rep.complement_measure, rep.weak_bound,
                         "pass" if rep.holds else "FAIL"])
    return ResultTable(["measure", "lambda", "bad_set_measure", "weak_bound", "status"],
                       rows, metadata={"name": "weak11", "constant": 10.0}, passed=ok)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curlflux",
                                 description="Vorticity-flux and vortex-sheet toolkit")
    ap.add_argument("--version", action="version", version=f"curlflux {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file overriding flags")
        sp.add_argument("--emit", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", help="output path (default stdout)")

    sp = sub.add_parser("trace", help="layerwise boundary trace samples")
    sp.add_argument("--field", required=True)
    sp.add_argument("--region", default="cylinder")
    sp.add_argument("--side", choices=("interior", "exterior"), default="interior")
    sp.add_argument("--t-grid", dest="t_grid", default="2^-2..2^-9")
    common(sp)

    sp = sub.add_parser("stokes", help="Stokes functional routes")
    sp.add_argument("--field", required=True)
    sp.add_argument("--surface", default="disk:r=1")
    sp.add_argument("--region", default="cylinder")
    sp.add_argument("--route", choices=("tangential", "transversal", "mass"),
                    default="tangential")
    sp.add_argument("--t", type=float, default=0.0)
    sp.add_argument("--delta-max-j", dest="delta_max_j", type=int, default=12)
    common(sp)

    sp = sub.add_parser("maximal", help="maximal-function scan")
    sp.add_argument("--field", required=True)
    sp.add_argument("--region", default="cylinder")
    sp.add_argument("--surface", default="disk:r=1")
    sp.add_argument("--t-grid", dest="t_grid", default=None)
    sp.add_argument("--lam", type=float, default=4.0)
    common(sp)

    sp = sub.add_parser("br", help="vortex-sheet evolution")
    sp.add_argument("--grid", default="16x16")
    sp.add_argument("--gamma", default="1,0,0")
    sp.add_argument("--delta-br", dest="delta_br", default=None)
    sp.add_argument("--dt", type=float, default=0.01)
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--dump-every", dest="dump_every", type=int, default=5)
    sp.add_argument("--amplitude", type=float, default=0.0)
    common(sp)

    sp = sub.add_parser("validate", help="smooth-field integral identities")
    sp.add_argument("--field", required=True)
    sp.add_argument("--region", default="half_ball")
    sp.add_argument("--tol", type=float, default=1e-8)
    common(sp)

    sp = sub.add_parser("example", help="catalog example tables")
    sp.add_argument("--name", default="annuli")
    sp.add_argument("--t", type=float, default=0.0)
    sp.add_argument("--delta-max-j", dest="delta_max_j", type=int, default=10)
    common(sp)

    sp = sub.add_parser("reproduce", help="closed-form value reproductions")
    sp.add_argument("name", choices=REPRODUCE_NAMES)
    common(sp)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig.from_args(args)
    try:
        table = run(config)
    except (ConfigError, flds.FieldError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except stokes.StokesRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    fmt = config.params.get("emit") or "csv"
    out_path = config.params.get("out")
    if out_path:
        with open(out_path, "w") as fh:
            table.emit(fmt, fh)
    else:
        table.emit(fmt)
    if table.passed is False:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
