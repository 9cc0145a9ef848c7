"""Command line driver: generate surfaces, verify invariants, export meshes.

Subcommands: generate (run the pipeline and write meshes plus a frame cache),
verify (residuals of every checked identity against tolerances, JSON summary,
exit 0 iff all pass), export (OBJ, PLY or CSV, plus coordinate-curve polylines
and frame glyphs), sweep (several evaluation points from one frame build) and
oracle-sg (the direct sine-Gordon solver on preset boundary data).

All floats are written with 17 significant digits so identical configurations
produce byte-identical files. Heavy imports happen after the thread override
so PSFRONT_THREADS can cap the BLAS pool.
"""

import argparse
import json
import os
import sys

from ._threads import apply_thread_env

FMT = "%.17g"

DEFAULT_TOLERANCES = (
    ("K+1 residual", 1e-3),
    ("first form E residual", 1e-8),
    ("first form G residual", 1e-8),
    ("first form F residual", 1e-6),
    ("second form ell residual", 1e-5),
    ("second form n residual", 1e-5),
    ("second form m residual", 1e-5),
    ("unitarity residual", 1e-8),
    ("zero-curvature residual", 2e-3),
    ("sine-Gordon residual", 2e-2),
    ("harmonicity residual", 5e-3),
    ("torsion deviation", 1e-2),
)


class ConfigError(ValueError):
    """Run configuration violates a structural requirement."""


class RunConfig:
    """Validated run parameters, merged from a JSON file and CLI flags."""

    def __init__(self, preset="pseudosphere", amplitude=None, potential=None,
                 interval=(-2.0, 2.0), grid=129, trunc=16, lambdas=(1.0,),
                 tolerances=None, out=".", step=None):
        self.preset = preset
        self.amplitude = amplitude
        self.potential = potential
        self.interval = (float(interval[0]), float(interval[1]))
        self.grid = int(grid)
        self.trunc = int(trunc)
        self.lambdas = tuple(float(l) for l in lambdas)
        self.tolerances = dict(DEFAULT_TOLERANCES)
        if tolerances:
            for k, v in tolerances.items():
                if k not in self.tolerances:
                    raise ConfigError(f"unknown tolerance name '{k}'")
                self.tolerances[k] = float(v)
        self.out = out
        self.step = step
        if self.grid < 3:
            raise ConfigError(
                f"grid resolution must be at least 3 nodes, got {self.grid}")
        if not self.interval[0] < self.interval[1]:
            raise ConfigError("domain interval must have positive length")
        if self.trunc < 1:
            raise ConfigError(f"truncation degree must be >= 1, got {self.trunc}")
        if not self.lambdas:
            raise ConfigError("at least one lambda value is required")
        for lam in self.lambdas:
            if not lam > 0:
                raise ConfigError(f"lambda values must be positive, got {lam:g}")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ConfigError(f"tolerance '{k}' must be positive, got {v:g}")

    @property
    def name(self):
        if self.potential is not None:
            return "custom"
        if self.preset == "c0_kink":
            return f"c0_kink{self.amplitude:g}"
        return self.preset

    def potential_spec(self):
        from . import potentials
        if self.potential is not None:
            return potentials.from_json(self.potential)
        kwargs = {}
        if self.step is not None:
            kwargs["step"] = float(self.step)
        return potentials.preset_by_name(self.preset, amplitude=self.amplitude,
                                         **kwargs)

    @classmethod
    def from_args(cls, args):
        data = {}
        if getattr(args, "config", None):
            with open(args.config) as fh:
                data = json.load(fh)
        kwargs = {
            "preset": data.get("preset", "pseudosphere"),
            "amplitude": data.get("amplitude"),
            "potential": data.get("potential"),
            "interval": data.get("interval", (-2.0, 2.0)),
            "grid": data.get("grid", 129),
            "trunc": data.get("trunc", 16),
            "lambdas": data.get("lambdas", (1.0,)),
            "tolerances": data.get("tolerances"),
            "out": data.get("out", "."),
            "step": data.get("step"),
        }
        if getattr(args, "preset", None):
            kwargs["preset"] = args.preset
            kwargs["potential"] = None
        if getattr(args, "amplitude", None) is not None:
            kwargs["amplitude"] = args.amplitude
        if getattr(args, "lambdas", None):
            kwargs["lambdas"] = _parse_lambdas(args.lambdas)
        if getattr(args, "grid", None) is not None:
            kwargs["grid"] = args.grid
        if getattr(args, "trunc", None) is not None:
            kwargs["trunc"] = args.trunc
        if getattr(args, "out", None):
            kwargs["out"] = args.out
        tol_args = getattr(args, "tol", None)
        if tol_args:
            tols = dict(kwargs["tolerances"] or {})
            for entry in tol_args:
                if "=" in entry:
                    name, _, val = entry.partition("=")
                    tols[name] = float(val)
                else:
                    for name, _ in DEFAULT_TOLERANCES:
                        tols[name] = float(entry)
            kwargs["tolerances"] = tols
        if kwargs["preset"] == "c0_kink" and kwargs["potential"] is None \
                and kwargs["amplitude"] is None:
            raise ConfigError("preset c0_kink requires --amplitude")
        return cls(**kwargs)


def _parse_lambdas(text):
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"could not parse lambda list '{text}'")
    if not vals:
        raise ConfigError("empty lambda list")
    return vals


# ---------------------------------------------------------------------------
# pipeline orchestration

def _build_state(cfg):
    """Potential -> frame family -> frame field -> connection, once per run."""
    import numpy as np
    from . import frames
    spec = cfg.potential_spec()
    x = np.linspace(cfg.interval[0], cfg.interval[1], cfg.grid)
    y = np.linspace(cfg.interval[0], cfg.interval[1], cfg.grid)
    stage = "half-frame integration"
    try:
        up = frames.integrate_half_frame(spec, "x", x, n_trunc=cfg.trunc)
        um = frames.integrate_half_frame(spec, "y", y, n_trunc=cfg.trunc)
        stage = "Birkhoff factorization"
        field = frames.build_frame_field(up, um)
        stage = "connection extraction"
        conn = frames.extract_connection(field)
    except (ValueError, RuntimeError) as exc:
        raise RuntimeError(f"{stage} failed for '{cfg.name}': {exc}") from exc
    return field, conn


def _surface(field, conn, lam):
    from . import sym
    return sym.sym_immersion(field, lam, conn=conn)


def _omega(conn):
    return conn.phihat + conn.alpha[:, None]


# ---------------------------------------------------------------------------
# writers

def _fmt(v):
    return FMT % v


def write_obj(path, f, curves_stride=None):
    """Quad mesh over the grid; vertex (i, j) is line i*ny + j + 1.

    Faces wind (i,j) (i+1,j) (i+1,j+1) (i,j+1) so the mesh normal matches the
    front normal wherever the area element is positive. curves_stride, if
    given, writes polylines along every stride-th grid row and column instead
    of faces.
    """
    nx, ny = f.shape[:2]
    with open(path, "w", newline="\n") as fh:
        for i in range(nx):
            for j in range(ny):
                p = f[i, j]
                fh.write(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
        if curves_stride is None:
            for i in range(nx - 1):
                for j in range(ny - 1):
                    a = i * ny + j + 1
                    fh.write(f"f {a} {a + ny} {a + ny + 1} {a + 1}\n")
        else:
            for i in range(0, nx, curves_stride):
                idx = [str(i * ny + j + 1) for j in range(ny)]
                fh.write("l " + " ".join(idx) + "\n")
            for j in range(0, ny, curves_stride):
                idx = [str(i * ny + j + 1) for i in range(nx)]
                fh.write("l " + " ".join(idx) + "\n")


def write_ply(path, f):
    """ASCII PLY quad mesh with double precision coordinates."""
    nx, ny = f.shape[:2]
    nquad = (nx - 1) * (ny - 1)
    with open(path, "w", newline="\n") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {nx * ny}\n")
        fh.write("property double x\nproperty double y\nproperty double z\n")
        fh.write(f"element face {nquad}\n")
        fh.write("property list uchar int vertex_indices\nend_header\n")
        for i in range(nx):
            for j in range(ny):
                p = f[i, j]
                fh.write(f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
        for i in range(nx - 1):
            for j in range(ny - 1):
                a = i * ny + j
                fh.write(f"4 {a} {a + ny} {a + ny + 1} {a + 1}\n")


def read_ply(path):
    """Parse an ASCII PLY written by write_ply; returns (vertices, faces)."""
    import numpy as np
    with open(path) as fh:
        line = fh.readline().strip()
        if line != "ply":
            raise ValueError(f"{path}: not a PLY file")
        nvert = nface = 0
        element = None
        while True:
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: truncated header")
            parts = line.split()
            if parts[0] == "element":
                element = parts[1]
                if element == "vertex":
                    nvert = int(parts[2])
                elif element == "face":
                    nface = int(parts[2])
            elif parts[0] == "end_header":
                break
        verts = np.empty((nvert, 3))
        for k in range(nvert):
            verts[k] = [float(t) for t in fh.readline().split()]
        faces = []
        for _ in range(nface):
            parts = fh.readline().split()
            faces.append([int(t) for t in parts[1:1 + int(parts[0])]])
    return verts, faces


def write_csv(path, header, columns):
    """Per-node CSV; columns is a list of flat arrays in header order."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_frame_glyphs(path, S, omega_field):
    """Orthonormal frame (e1, e2, N) along the grid row closest to y = 0."""
    from . import analysis
    frame = analysis.complete_frame(analysis.tangent_frame(S), omega_field)
    j0 = S.i0y
    header = ["x", "fx", "fy", "fz", "e1x", "e1y", "e1z",
              "e2x", "e2y", "e2z", "Nx", "Ny", "Nz"]
    cols = [S.x]
    for fld in (S.f, frame.e1, frame.e2, S.N):
        for k in range(3):
            cols.append(fld[:, j0, k])
    write_csv(path, header, cols)


# ---------------------------------------------------------------------------
# verification checks

def _checks_for(field, conn, S, lam, zcc_sup):
    """Ordered (name, residual) pairs for one evaluation point."""
    import numpy as np
    from . import analysis
    from .loops import eval_coeffs, I2
    rep = analysis.fundamental_forms(S)
    omega = _omega(conn)
    sin_om = np.sin(omega)
    regular = rep.regular
    strong = np.abs(sin_om) > 0.3

    def masked(res, mask):
        vals = res[mask & np.isfinite(res)]
        return float(np.abs(vals).max()) if vals.size else 0.0

    if regular.any():
        k_res = float(np.abs(rep.K[regular] + 1.0).max())
    else:
        k_res = 0.0
    Ue = eval_coeffs(field.Uhat, -field.n_trunc, lam)
    herm = np.einsum("...ab,...cb->...ac", Ue, np.conj(Ue)) - I2
    det = Ue[..., 0, 0] * Ue[..., 1, 1] - Ue[..., 0, 1] * Ue[..., 1, 0]
    unit = max(float(np.abs(herm).max()), float(np.abs(det - 1.0).max()))
    hx = float(S.x[1] - S.x[0])
    hy = float(S.y[1] - S.y[0])
    sg = analysis.sine_gordon_residual(omega, hx, hy)
    harm, _ = analysis.harmonicity_residual(S, omega)
    tau = analysis.asymptotic_torsion(S, "x")
    return [
        ("K+1 residual", k_res),
        ("first form E residual", float(np.abs(rep.E - lam ** 2).max())),
        ("first form G residual", float(np.abs(rep.G - lam ** -2).max())),
        ("first form F residual", float(np.abs(rep.F - np.cos(omega)).max())),
        ("second form ell residual", float(np.abs(rep.ell).max())),
        ("second form n residual", float(np.abs(rep.n).max())),
        ("second form m residual", float(np.abs(rep.m - sin_om).max())),
        ("unitarity residual", unit),
        ("zero-curvature residual", zcc_sup),
        ("sine-Gordon residual", float(np.nanmax(np.abs(sg)))),
        ("harmonicity residual", masked(harm, regular)),
        ("torsion deviation", masked(np.abs(tau) - 1.0, strong)),
    ], int(rep.regular_count)


def cmd_generate(args):
    import numpy as np
    cfg = RunConfig.from_args(args)
    os.makedirs(cfg.out, exist_ok=True)
    field, conn = _build_state(cfg)
    from . import analysis
    for lam in cfg.lambdas:
        S = _surface(field, conn, lam)
        rep = analysis.fundamental_forms(S)
        if rep.regular_count == 0:
            print(f"warning: surface at lambda={lam:g} is not regular "
                  "(image degenerates to a line)", file=sys.stderr)
        stem = f"{cfg.name}_lam{lam:g}_n{cfg.grid}"
        path = os.path.join(cfg.out, stem + "." + args.format)
        if args.format == "ply":
            write_ply(path, S.f)
        else:
            write_obj(path, S.f)
        print(f"wrote {path}")
    cache = os.path.join(cfg.out, f"{cfg.name}_n{cfg.grid}_frame.npz")
    np.savez_compressed(cache, x=field.x, y=field.y, Uhat=field.Uhat,
                        n_trunc=field.n_trunc, phihat=conn.phihat, r=conn.r,
                        alpha=conn.alpha, beta=conn.beta)
    print(f"wrote {cache}")
    return 0


def cmd_verify(args):
    from . import frames
    cfg = RunConfig.from_args(args)
    os.makedirs(cfg.out, exist_ok=True)
    field, conn = _build_state(cfg)
    zcc_sup = float(frames.zcc_residual(conn).max())
    summary = {"preset": cfg.name, "grid": cfg.grid, "trunc": cfg.trunc,
               "interval": list(cfg.interval), "lambdas": {}, "pass": True}
    first_fail = None
    for lam in cfg.lambdas:
        S = _surface(field, conn, lam)
        checks, regular_nodes = _checks_for(field, conn, S, lam, zcc_sup)
        entry = {"regular nodes": regular_nodes, "checks": {}}
        for name, residual in checks:
            tol = cfg.tolerances[name]
            ok = residual < tol
            entry["checks"][name] = {"residual": residual, "tolerance": tol,
                                     "pass": ok}
            if not ok and first_fail is None:
                first_fail = (name, residual, tol, lam)
            summary["pass"] = summary["pass"] and ok
        summary["lambdas"][f"{lam:g}"] = entry
    path = os.path.join(cfg.out, f"verify_{cfg.name}_n{cfg.grid}.json")
    text = json.dumps(summary, indent=2, sort_keys=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text + "\n")
    print(f"wrote {path}")
    if first_fail:
        name, residual, tol, lam = first_fail
        print(f"FAIL: {name} = {residual:.6e} exceeds tolerance {tol:g} "
              f"at lambda={lam:g}", file=sys.stderr)
        return 1
    print(f"all checks passed for {cfg.name} "
          f"({len(cfg.lambdas)} evaluation points)")
    return 0


def cmd_export(args):
    import numpy as np
    from . import analysis
    cfg = RunConfig.from_args(args)
    os.makedirs(cfg.out, exist_ok=True)
    field, conn = _build_state(cfg)
    lam = cfg.lambdas[0]
    S = _surface(field, conn, lam)
    omega = _omega(conn)
    stem = f"{cfg.name}_lam{lam:g}_n{cfg.grid}"
    written = []
    if args.format == "obj":
        path = os.path.join(cfg.out, stem + ".obj")
        write_obj(path, S.f)
    elif args.format == "ply":
        path = os.path.join(cfg.out, stem + ".ply")
        write_ply(path, S.f)
    else:
        path = os.path.join(cfg.out, stem + ".csv")
        rep = analysis.fundamental_forms(S)
        X, Y = np.meshgrid(S.x, S.y, indexing="ij")
        header = ["x", "y", "fx", "fy", "fz", "Nx", "Ny", "Nz",
                  "E", "F", "G", "K", "omega"]
        cols = [X.ravel(), Y.ravel()]
        for k in range(3):
            cols.append(S.f[..., k].ravel())
        for k in range(3):
            cols.append(S.N[..., k].ravel())
        cols += [rep.E.ravel(), rep.F.ravel(), rep.G.ravel(), rep.K.ravel(),
                 omega.ravel()]
        write_csv(path, header, cols)
    written.append(path)
    if args.curves:
        path = os.path.join(cfg.out, stem + "_curves.obj")
        write_obj(path, S.f, curves_stride=max(1, args.stride))
        written.append(path)
    if args.glyphs:
        path = os.path.join(cfg.out, stem + "_glyphs.csv")
        write_frame_glyphs(path, S, omega)
        written.append(path)
    for p in written:
        print(f"wrote {p}")
    return 0


def cmd_sweep(args):
    import numpy as np
    from . import analysis
    cfg = RunConfig.from_args(args)
    os.makedirs(cfg.out, exist_ok=True)
    field, conn = _build_state(cfg)
    omega = _omega(conn)
    rows = []
    for lam in cfg.lambdas:
        S = _surface(field, conn, lam)
        rep = analysis.fundamental_forms(S)
        regular = rep.regular
        k_res = float(np.abs(rep.K[regular] + 1).max()) if regular.any() else 0.0
        rows.append([lam,
                     float(np.abs(rep.E - lam ** 2).max()),
                     float(np.abs(rep.G - lam ** -2).max()),
                     float(np.abs(rep.F - np.cos(omega)).max()),
                     float(np.abs(rep.ell).max()),
                     float(np.abs(rep.n).max()),
                     float(np.abs(rep.m - np.sin(omega)).max()),
                     k_res,
                     float(rep.regular_count)])
        if args.mesh:
            path = os.path.join(cfg.out,
                                f"{cfg.name}_lam{lam:g}_n{cfg.grid}.obj")
            write_obj(path, S.f)
            print(f"wrote {path}")
    header = ["lambda", "E_defect", "G_defect", "F_defect", "ell_max",
              "n_max", "m_defect", "K_defect", "regular_nodes"]
    path = os.path.join(cfg.out, f"sweep_{cfg.name}_n{cfg.grid}.csv")
    write_csv(path, header, list(zip(*rows)))
    print(f"wrote {path}")
    return 0


def cmd_oracle_sg(args):
    import numpy as np
    from . import oracles
    cfg = RunConfig.from_args(args)
    spec = cfg.potential_spec()
    n = cfg.grid
    x = np.linspace(cfg.interval[0], cfg.interval[1], n)
    y = np.linspace(cfg.interval[0], cfg.interval[1], n)
    sol = oracles.goursat_solve(spec.alpha, spec.beta, x, y,
                                tol=args.sg_tol, max_iter=args.max_iter)
    out = {"preset": cfg.name, "grid": n, "iterations": sol.iterations,
           "final delta": sol.final_delta, "contraction": sol.contraction,
           "sup |phi|": float(np.abs(sol.phi).max())}
    print(json.dumps(out, indent=2, sort_keys=True))
    if args.out_csv:
        os.makedirs(cfg.out, exist_ok=True)
        path = os.path.join(cfg.out, f"goursat_{cfg.name}_n{n}.csv")
        X, Y = np.meshgrid(x, y, indexing="ij")
        write_csv(path, ["x", "y", "phi"],
                  [X.ravel(), Y.ravel(), sol.phi.ravel()])
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="psfront",
        description="Constant negative curvature fronts from loop group "
                    "factorization: generate, verify and export.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration file")
    common.add_argument("--preset",
                        choices=("pseudosphere", "vacuum", "c0_kink"),
                        help="built-in potential (overrides config)")
    common.add_argument("--amplitude", type=float,
                        help="slope for the c0_kink preset")
    common.add_argument("--lambda", dest="lambdas", metavar="L1,L2,...",
                        help="comma list of evaluation points, all > 0")
    common.add_argument("--grid", type=int, metavar="N",
                        help="nodes per axis (default 129)")
    common.add_argument("--trunc", type=int, metavar="K",
                        help="Laurent truncation degree (default 16)")
    common.add_argument("--out", metavar="DIR", help="output directory")

    p = sub.add_parser("generate", parents=[common],
                       help="run the pipeline, write meshes and a frame cache")
    p.add_argument("--format", choices=("obj", "ply"), default="obj")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", parents=[common],
                       help="residuals of all checked identities; exit 0 iff "
                            "every one passes")
    p.add_argument("--tol", action="append", metavar="VAL|NAME=VAL",
                   help="override one tolerance (NAME=VAL) or all (VAL)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", parents=[common],
                       help="write a surface mesh or per-node CSV report")
    p.add_argument("--format", choices=("obj", "ply", "csv"), default="obj")
    p.add_argument("--curves", action="store_true",
                   help="also write coordinate-curve polylines")
    p.add_argument("--glyphs", action="store_true",
                   help="also write the orthonormal frame along y = 0")
    p.add_argument("--stride", type=int, default=16,
                   help="row/column stride for --curves")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("sweep", parents=[common],
                       help="evaluate several lambda from one frame build")
    p.add_argument("--mesh", action="store_true",
                   help="also write a mesh per lambda")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-sg", parents=[common],
                       help="direct sine-Gordon solve on preset boundary data")
    p.add_argument("--sg-tol", type=float, default=1e-12,
                   help="Picard convergence tolerance")
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument("--out-csv", action="store_true",
                   help="write the angle field as per-node CSV")
    p.set_defaults(func=cmd_oracle_sg)
    return parser


def main(argv=None):
    apply_thread_env()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"psfront: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
