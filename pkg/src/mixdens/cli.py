"""Command-line interface: simulate, fit, eval, lps, bench, sweep.

One binary with subcommands; every run writes a manifest carrying the
resolved config, seed, versions, input hashes, and wall-clock so it can
be reproduced exactly. All randomness flows from --seed through named
substreams, so different methods see identical data. Wall-clock lives
only in manifests and timing CSVs; model files and metric JSONs are
bit-identical across reruns with the same seed.
"""

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

__all__ = ["main"]

_METHODS = ("npmle", "boot", "smooth", "gb")


def _apply_threads(threads):
    if threads is None:
        threads = os.environ.get("MIXDENS_THREADS")
    if threads is None:
        threads = os.cpu_count() or 1
    t = str(int(threads))
    for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, t)
    return int(t)


def _versions() -> dict:
    import platform

    import numpy
    import scipy

    from . import __version__, backend

    try:
        import numba
        numba_version = numba.__version__
    except ImportError:
        numba_version = None
    return {
        "mixdens": __version__,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "numba": numba_version,
        "backend": backend.backend_name(),
    }


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _write_manifest(out: Path, command: str, args, inputs: dict,
                    outputs: list, wall_clock: dict) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    config["out_dir"] = str(config.get("out_dir", out))
    _write_json(out / "manifest.json", {
        "command": command,
        "config": config,
        "seed": getattr(args, "seed", None),
        "versions": _versions(),
        "inputs": inputs,
        "outputs": sorted(outputs),
        "wall_clock": wall_clock,
    })


def _out_dir(args, command: str) -> Path:
    out = Path(args.out_dir) if args.out_dir else Path("mixdens-out") / command
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_column(path: Path, header: str, values, integer: bool) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        if integer:
            fh.writelines(f"{int(v)}\n" for v in values)
        else:
            fh.writelines(f"{float(v)!r}\n" for v in values)


def _read_column(path) -> "object":
    import numpy as np

    vals = np.loadtxt(path, skiprows=1, ndmin=1)
    return vals


def _is_count_kernel(k) -> bool:
    from .kernels import Family

    return k.family in (Family.POISSON, Family.BINOMIAL)


def _resolve_data(args):
    """(y, kernel, model_name_or_None, inputs dict) from the data flags."""
    from . import data, kernels

    if getattr(args, "dataset", None):
        ds = data.load_dataset(args.dataset)
        y = ds.y.astype(float)
        k = kernels.poisson()
        inputs = {"dataset": ds.name, "n": ds.n,
                  "y_sha256": _sha256_bytes(y.tobytes())}
        return y, k, None, inputs
    if getattr(args, "data", None):
        if not getattr(args, "kernel", None) and not getattr(args, "model", None):
            raise SystemExit("--data needs --kernel or --model to pick the family")
        if getattr(args, "model", None):
            k = data.sim_model(args.model).kernel
        else:
            k = kernels.kernel_by_name(args.kernel)
        y = kernels.validate_observations(k, _read_column(args.data))
        inputs = {"data": str(args.data), "n": int(y.size),
                  "file_sha256": _sha256_bytes(Path(args.data).read_bytes()),
                  "y_sha256": _sha256_bytes(y.tobytes())}
        return y, k, getattr(args, "model", None), inputs
    if getattr(args, "model", None):
        m = data.sim_model(args.model)
        y, _ = data.simulate(m, args.n, args.seed)
        y = y.astype(float)
        inputs = {"model": m.name, "n": int(y.size), "seed": args.seed,
                  "y_sha256": _sha256_bytes(y.tobytes())}
        return y, m.kernel, m.name, inputs
    raise SystemExit("provide --model, --data, or --dataset")


def _gb_config(args, B=None):
    from .nnet import TrainConfig

    return TrainConfig(
        l=args.l,
        tol=args.tol if args.tol is not None else 1e-3,
        T=args.epochs,
        B=B if B is not None else args.boot_B,
        S_w=args.batch_w,
        S_z=args.batch_z,
        S_gamma=args.batch_gamma,
        L=args.layers,
        h=args.hidden,
        lr=args.lr,
        seed=args.seed,
        mcem_S=args.mcem_s,
    )


def _truth(model_name: str):
    from . import data, kernels

    m = data.sim_model(model_name)
    pg = data.prior_grid(m)
    dens = data.true_prior_density(m, pg)
    cdf = lambda x: data.true_prior_cdf(m, x)  # noqa: E731
    return m, pg, dens, cdf, kernels.support_bounds(m.kernel)


def _score_estimate(kind, payload, pg, truth_d, truth_cdf, bounds):
    """(W1, ISE) of one fitted estimate against the true prior."""
    import numpy as np

    from . import metrics

    if kind == "draws":
        w1 = metrics.wasserstein1(truth_cdf, payload, lo=pg[0], hi=pg[-1])
        est = metrics.kde_density(payload, pg, bounds=bounds)
    elif kind == "dist":
        w1 = metrics.wasserstein1(truth_cdf, payload, lo=pg[0], hi=pg[-1])
        est = metrics.kde_density(payload.atoms, pg, bounds=bounds,
                                  weights=payload.weights)
    else:  # density on its own grid, with a CDF by cumulative trapezoid
        from .utils import cumtrapz

        grid, values = payload
        cum = cumtrapz(values, grid)
        cdf = lambda x: np.clip(  # noqa: E731
            np.interp(np.asarray(x, dtype=float), grid, cum,
                      left=0.0, right=cum[-1]), 0.0, 1.0)
        w1 = metrics.wasserstein1(truth_cdf, cdf, lo=pg[0], hi=pg[-1])
        est = metrics.DensityOnGrid(
            pg, np.interp(pg, grid, values, left=0.0, right=0.0))
    from .metrics import ise

    return float(w1), float(ise(truth_d, est))


def cmd_simulate(args) -> int:
    from . import data

    out = _out_dir(args, "simulate")
    t0 = time.perf_counter()
    m = data.sim_model(args.model)
    y, theta = data.simulate(m, args.n, args.seed)
    _write_column(out / "y.csv", "y", y, _is_count_kernel(m.kernel))
    _write_column(out / "theta.csv", "theta", theta, False)
    _write_manifest(out, "simulate", args,
                    {"model": m.name, "n": args.n,
                     "y_sha256": _sha256_bytes(y.astype(float).tobytes())},
                    ["y.csv", "theta.csv"],
                    {"total": time.perf_counter() - t0})
    return 0


def _fit_npmle(y, k, args, out, rng):
    import numpy as np

    from . import npmle

    grid = npmle.default_grid(y, k, count=args.grid_size)
    tol = args.tol if args.tol is not None else 1e-8
    d = npmle.fit_weighted_npmle(y, np.ones(y.size), k, grid, tol=tol,
                                 max_iter=args.max_iter)
    (out / "mixture.json").write_text(d.to_json() + "\n")
    return ["mixture.json"], {"atoms": int(d.atoms.size),
                              "loglik": d.loglik, "optimality": d.optimality}


def _fit_boot(y, k, args, out, rng):
    from . import bootstrap, npmle

    grid = npmle.default_grid(y, k, count=args.grid_size)
    tol = args.tol if args.tol is not None else 1e-8
    scheme = bootstrap.WeightScheme(args.boot_scheme)
    e = bootstrap.bootstrap_npmle(y, k, grid, scheme=scheme, B=args.boot_B,
                                  rng=rng, tol=tol, max_iter=args.max_iter)
    (out / "ensemble.jsonl").write_text(e.to_jsonl())
    pooled = e.pooled()
    (out / "pooled.json").write_text(pooled.to_json() + "\n")
    return ["ensemble.jsonl", "pooled.json"], {"B": e.size}


def _fit_smooth(y, k, args, out, rng):
    import numpy as np

    from . import npmle, smooth

    grid = npmle.default_grid(y, k, count=args.grid_size)
    tol = args.tol if args.tol is not None else 1e-8
    info = {"fold_approximation": False, "folds": None}
    if args.bandwidth is not None:
        h = float(args.bandwidth)
        selected = False
    else:
        h, detail = smooth.loocv_bandwidth(y, k, grid=grid, detail=True)
        info = {"fold_approximation": bool(detail["fold_approximation"]),
                "folds": int(detail["folds"])}
        selected = True
    d = npmle.fit_weighted_npmle(y, np.ones(y.size), k, grid, tol=tol,
                                 max_iter=args.max_iter)
    sd = smooth.kernel_smooth(d, h, support=k)
    (out / "mixture.json").write_text(d.to_json() + "\n")
    sd.to_csv(out / "smoothed.csv")
    _write_json(out / "smooth.json", {"bandwidth": h, "loocv": selected, **info})
    return (["mixture.json", "smoothed.csv", "smooth.json"],
            {"bandwidth": h, "loocv": selected})


def _fit_gb(y, k, args, out, rng):
    from . import gbnpmle

    cfg = _gb_config(args)
    draws, g, tau, trace = gbnpmle.fit_gb_npmle(y, k, cfg, rng)
    g.to_npz(out / "checkpoint.npz")
    _write_json(out / "tau.json", {"tau": [float(t) for t in tau.tau]})
    _write_column(out / "draws.csv", "theta", draws, False)
    (out / "stage1_loss.csv").write_text(trace.stage1_csv())
    (out / "stage2_trace.csv").write_text(trace.stage2_csv())
    return (["checkpoint.npz", "tau.json", "draws.csv", "stage1_loss.csv",
             "stage2_trace.csv"],
            {"epochs": cfg.T, "mcem_iterations": int(trace.stage2_loglik.size),
             "phases": {k2: float(v) for k2, v in trace.seconds.items()}})


def cmd_fit(args) -> int:
    from .utils import substream

    out = _out_dir(args, "fit")
    t0 = time.perf_counter()
    y, k, model, inputs = _resolve_data(args)
    rng = substream(args.seed, f"fit:{args.method}")
    runner = {"npmle": _fit_npmle, "boot": _fit_boot,
              "smooth": _fit_smooth, "gb": _fit_gb}[args.method]
    outputs, summary = runner(y, k, args, out, rng)
    wall = {"total": time.perf_counter() - t0}
    wall.update(summary.pop("phases", {}))  # wall-clock lives in the manifest only
    _write_json(out / "fit.json", {
        "method": args.method, "model": model, "kernel": k.name,
        "n": int(y.size), "seed": args.seed, **summary,
    })
    _write_manifest(out, "fit", args, inputs, outputs + ["fit.json"], wall)
    return 0


def _load_estimate(path: Path):
    """(kind, payload, meta) from a fit directory or a density CSV."""
    import numpy as np

    from .bootstrap import BootstrapEnsemble
    from .npmle import DiscreteMixingDistribution

    p = Path(path)
    if p.is_file():
        tbl = np.loadtxt(p, delimiter=",", skiprows=1, ndmin=2)
        return "density", (tbl[:, 0], tbl[:, 1]), {"method": "density"}
    fit = json.loads((p / "fit.json").read_text())
    method = fit["method"]
    if method == "npmle":
        d = DiscreteMixingDistribution.from_json((p / "mixture.json").read_text())
        return "dist", d, fit
    if method == "boot":
        e = BootstrapEnsemble.from_jsonl((p / "ensemble.jsonl").read_text())
        return "dist", e.pooled(), fit
    if method == "smooth":
        tbl = np.loadtxt(p / "smoothed.csv", delimiter=",", skiprows=1, ndmin=2)
        return "density", (tbl[:, 0], tbl[:, 1]), fit
    if method == "gb":
        draws = _read_column(p / "draws.csv")
        return "draws", draws, fit
    raise SystemExit(f"{p}: unknown fit method {method!r}")


def cmd_eval(args) -> int:
    import csv

    out = _out_dir(args, "eval")
    t0 = time.perf_counter()
    _, pg, truth_d, truth_cdf, bounds = _truth(args.model)
    records, outputs, inputs = [], [], {}
    for i, fit_path in enumerate(args.fit, start=1):
        kind, payload, meta = _load_estimate(Path(fit_path))
        w1, ise = _score_estimate(kind, payload, pg, truth_d, truth_cdf, bounds)
        rec = {
            "method": meta.get("method"), "model": args.model,
            "n": meta.get("n"), "seed": meta.get("seed"),
            "W1": w1, "ISE": ise, "LPS": None, "time_sec": None,
        }
        records.append(rec)
        name = f"metrics-{i:03d}-{rec['method']}.json"
        _write_json(out / name, rec)
        outputs.append(name)
        inputs[str(fit_path)] = meta.get("method")
    by_method = {}
    for rec in records:
        by_method.setdefault(rec["method"], []).append(rec)
    with open(out / "table.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "method", "replicates", "mean_W1", "mean_ISE"])
        for method in sorted(by_method):
            rows = by_method[method]
            mw = sum(r["W1"] for r in rows) / len(rows)
            mi = sum(r["ISE"] for r in rows) / len(rows)
            w.writerow([args.model, method, len(rows), repr(mw), repr(mi)])
    _write_manifest(out, "eval", args, inputs, outputs + ["table.csv"],
                    {"total": time.perf_counter() - t0})
    return 0


def cmd_lps(args) -> int:
    from . import bootstrap, gbnpmle, metrics, npmle
    from .utils import substream

    out = _out_dir(args, "lps")
    t0 = time.perf_counter()
    y, k, model, inputs = _resolve_data(args)

    if args.method == "gb":
        def fitter(y_train, B, rng):
            cfg = _gb_config(args, B=B)
            draws, _, _, _ = gbnpmle.fit_gb_npmle(y_train, k, cfg, rng)
            return draws
    else:
        def fitter(y_train, B, rng):
            grid = npmle.default_grid(y_train, k, count=args.grid_size)
            e = bootstrap.bootstrap_npmle(
                y_train, k, grid,
                scheme=bootstrap.WeightScheme(args.boot_scheme), B=B, rng=rng,
                tol=args.tol if args.tol is not None else 1e-8,
                max_iter=args.max_iter, compute_certificates=False)
            return bootstrap.pooled_draws(e, 1, rng)

    rng = substream(args.seed, f"lps:{args.method}")
    lps = metrics.lps_kfold(y, k, fitter, K=args.K, B=args.boot_B, rng=rng)
    _write_json(out / "lps.json", {
        "method": args.method,
        "model": getattr(args, "dataset", None) or model,
        "n": int(y.size), "seed": args.seed, "K": args.K, "B": args.boot_B,
        "W1": None, "ISE": None, "LPS": float(lps), "time_sec": None,
    })
    _write_manifest(out, "lps", args, inputs, ["lps.json"],
                    {"total": time.perf_counter() - t0})
    print(f"LPS {args.method}: {lps:.4f}")
    return 0


def _bench_cell(method, y, k, args, rng):
    import numpy as np

    from . import bootstrap, gbnpmle, npmle, smooth

    grid = npmle.default_grid(y, k, count=args.grid_size)
    if method == "npmle":
        npmle.fit_weighted_npmle(y, np.ones(y.size), k, grid,
                                 max_iter=args.max_iter)
    elif method == "boot":
        bootstrap.bootstrap_npmle(y, k, grid,
                                  scheme=bootstrap.WeightScheme(args.boot_scheme),
                                  B=args.boot_B, rng=rng,
                                  max_iter=args.max_iter,
                                  compute_certificates=False)
    elif method == "smooth":
        h = smooth.loocv_bandwidth(y, k, grid=grid, max_iter=args.max_iter)
        d = npmle.fit_weighted_npmle(y, np.ones(y.size), k, grid,
                                     max_iter=args.max_iter)
        smooth.kernel_smooth(d, h, support=k)
    elif method == "gb":
        gbnpmle.fit_gb_npmle(y, k, _gb_config(args), rng)
    else:
        raise SystemExit(f"unknown method {method!r}")


def cmd_bench(args) -> int:
    import csv
    import math

    from . import data
    from .utils import substream

    out = _out_dir(args, "bench")
    t0 = time.perf_counter()
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise SystemExit("no methods requested")
    sizes = [int(s) for s in args.n.split(",") if s.strip()]
    if not sizes:
        raise SystemExit("no sizes requested")
    m = data.sim_model(args.model)
    rows = []
    for n in sizes:
        y, _ = data.simulate(m, n, args.seed)
        for method in methods:
            rng = substream(args.seed, f"bench:{method}:{n}")
            t1 = time.perf_counter()
            err = ""
            try:
                _bench_cell(method, y, m.kernel, args, rng)
            except Exception as e:  # cell failures recorded, run continues
                err = f"{type(e).__name__}: {e}"
            secs = time.perf_counter() - t1
            timed_out = args.cell_timeout is not None and secs > args.cell_timeout
            rows.append([method, n, args.boot_B, repr(secs),
                         repr(math.log(secs)) if secs > 0 else "", int(timed_out), err])
    with open(out / "timings.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "n", "B", "seconds", "log_seconds", "timed_out",
                    "error"])
        w.writerows(rows)
    _write_manifest(out, "bench", args, {"model": args.model},
                    ["timings.csv"], {"total": time.perf_counter() - t0})
    return 0


def cmd_sweep(args) -> int:
    import csv

    from . import data, gbnpmle
    from .utils import substream

    out = _out_dir(args, "sweep")
    t0 = time.perf_counter()
    layer_list = [int(v) for v in args.layers.split(",") if v.strip()]
    width_list = [int(v) for v in args.hidden.split(",") if v.strip()]
    if not layer_list or not width_list:
        raise SystemExit("sweep grid is empty; give --layers and --hidden values")
    m = data.sim_model(args.model)
    _, pg, truth_d, truth_cdf, bounds = _truth(args.model)
    y, _ = data.simulate(m, args.n, args.seed)
    rows = []
    for L in layer_list:
        for h in width_list:
            cfg_args = argparse.Namespace(**{**vars(args), "layers": L, "hidden": h})
            rng = substream(args.seed, f"sweep:L{L}:h{h}")
            t1 = time.perf_counter()
            draws, _, _, _ = gbnpmle.fit_gb_npmle(y, m.kernel,
                                                  _gb_config(cfg_args), rng)
            secs = time.perf_counter() - t1
            w1, ise = _score_estimate("draws", draws, pg, truth_d, truth_cdf,
                                      bounds)
            rows.append([L, h, repr(w1), repr(ise), repr(secs)])
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["layers", "hidden", "W1", "ISE", "seconds"])
        w.writerows(rows)
    _write_manifest(out, "sweep", args, {"model": args.model, "n": args.n},
                    ["sweep.csv"], {"total": time.perf_counter() - t0})
    return 0


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--config", default=None,
                   help="JSON file of flag defaults; explicit flags win")


def _add_data_flags(p):
    p.add_argument("--model", default=None)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--data", default=None, help="CSV with a y column")
    p.add_argument("--dataset", default=None,
                   help="vendored count dataset (norberg, thailand, mortality)")
    p.add_argument("--kernel", default=None,
                   choices=("gaussian", "poisson", "gamma", "binomial"))


def _add_solver_flags(p):
    p.add_argument("--grid-size", type=int, default=400)
    p.add_argument("--tol", type=float, default=None,
                   help="stopping tolerance (per-method default)")
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--boot-B", type=int, default=1000)
    p.add_argument("--boot-scheme", default="multinomial",
                   choices=("multinomial", "dirichlet"))


def _add_gb_flags(p):
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--l", type=int, default=100)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--hidden", type=int, default=500)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--batch-w", type=int, default=100)
    p.add_argument("--batch-z", type=int, default=100)
    p.add_argument("--batch-gamma", type=int, default=100)
    p.add_argument("--mcem-s", type=int, default=100)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mixdens",
                                 description="mixing-density estimation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a synthetic dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit one estimator")
    p.add_argument("--method", required=True, choices=_METHODS)
    _add_data_flags(p)
    _add_solver_flags(p)
    _add_gb_flags(p)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--bandwidth-cv", action="store_true",
                   help="select the bandwidth by cross-validation (default)")
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="score fits against a true prior")
    p.add_argument("--model", required=True)
    p.add_argument("--fit", action="append", required=True,
                   help="fit output directory or density CSV (repeatable)")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("lps", help="K-fold log predictive score")
    p.add_argument("--method", required=True, choices=("gb", "boot"))
    p.add_argument("--K", type=int, default=10)
    _add_data_flags(p)
    _add_solver_flags(p)
    _add_gb_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_lps)

    p = sub.add_parser("bench", help="wall-clock timing per method and n")
    p.add_argument("--model", required=True)
    p.add_argument("--n", default="1000", help="comma list of sizes")
    p.add_argument("--methods", default="npmle,boot,smooth,gb")
    p.add_argument("--cell-timeout", type=float, default=None)
    _add_solver_flags(p)
    _add_gb_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="architecture sensitivity sweep")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--layers", default="2", help="comma list")
    p.add_argument("--hidden", default="50,500", help="comma list")
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--l", type=int, default=100)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--batch-w", type=int, default=100)
    p.add_argument("--batch-z", type=int, default=100)
    p.add_argument("--batch-gamma", type=int, default=100)
    p.add_argument("--mcem-s", type=int, default=100)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--boot-B", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.config:
            defaults = json.loads(Path(args.config).read_text())
            if not isinstance(defaults, dict):
                raise ValueError("config must be a JSON object of flag defaults")
            sub = next(a for a in ap._actions
                       if isinstance(a, argparse._SubParsersAction))
            known = {a.dest for p in sub.choices.values() for a in p._actions}
            unknown = sorted(set(defaults) - known)
            if unknown:
                raise ValueError(f"unknown config keys: {', '.join(unknown)}")
            # defaults must land on the chosen subparser's actions; parent
            # set_defaults loses to the subparser's own on re-parse
            chosen = sub.choices[args.command]
            mine = {a.dest for a in chosen._actions}
            chosen.set_defaults(**{k: v for k, v in defaults.items() if k in mine})
            args = ap.parse_args(argv)
        _apply_threads(args.threads)
        return args.func(args)
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
