"""Command-line interface.

Subcommands: ``generate`` (synthetic benchmark data), ``fit`` (Gibbs
sampler), ``eval`` (adjusted Rand index of two label files), ``experiment``
(multi-method benchmark table), ``heatmap`` (co-clustering PGM render).

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as sio
from . import plots
from .evaluation import adjusted_rand_index, experiment
from .inference import ChainConfig, run_chains
from .model import GmmParams, Labeling, Network, VectorDataset, default_priors
from .synthesis import GenerativeSpec, case_info, generate, preset


class UsageError(Exception):
    """Bad flags or invalid inputs; exits with status 2."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sharedclust",
        description="Joint Bayesian clustering of feature vectors and a binary network.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic dataset (X.csv, Y.edges, truth.labels)")
    src = gen.add_mutually_exclusive_group(required=True)
    src.add_argument("--case", type=int, help="benchmark case id (1..18)")
    src.add_argument("--spec", type=Path, help="JSON file with means/covs/psi/sizes")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True, help="output directory")

    fit = sub.add_parser("fit", help="run the Gibbs sampler on X and/or Y")
    fit.add_argument("--x", type=Path, help="feature matrix (X.csv)")
    fit.add_argument("--y", type=Path, help="edge list (Y.edges)")
    fit.add_argument("--k", type=int, help="number of clusters")
    fit.add_argument("--out", type=Path, default=Path("."), help="output directory")
    fit.add_argument("--config", type=Path, help="key = value configuration file")
    fit.add_argument("--iterations", type=int)
    fit.add_argument("--burn-in", type=int, dest="burn_in")
    fit.add_argument("--chains", type=int, dest="n_chains")
    fit.add_argument("--seed", type=int)
    fit.add_argument("--eta", type=float, help="likelihood weight in [0,1]; 0.5 = joint model")
    fit.add_argument("--alpha", type=float)
    fit.add_argument("--v0", type=float)
    fit.add_argument("--beta1", type=float)
    fit.add_argument("--beta2", type=float)
    fit.add_argument("--mu0", type=str, help="comma-separated prior mean (scalar broadcasts)")
    fit.add_argument("--t-scale-diag", type=str, dest="t_scale_diag",
                     help="comma-separated diagonal of the inverse-Wishart scale")
    fit.add_argument("--a-dirichlet", type=str, dest="a_dirichlet",
                     help="comma-separated Dirichlet parameters (scalar broadcasts)")
    fit.add_argument("--no-figures", action="store_true", help="skip PNG figure rendering")

    ev = sub.add_parser("eval", help="adjusted Rand index between two label files")
    ev.add_argument("labels_a", type=Path)
    ev.add_argument("labels_b", type=Path)

    exp = sub.add_parser("experiment", help="benchmark one case across methods")
    exp.add_argument("--case", type=int, required=True)
    exp.add_argument("--out", type=Path, default=Path("."), help="output directory")
    exp.add_argument("--datasets", type=int, default=10)
    exp.add_argument("--chains", type=int, default=10, dest="n_chains")
    exp.add_argument("--iterations", type=int)
    exp.add_argument("--burn-in", type=int, dest="burn_in")
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--eta", type=float, default=0.5)
    exp.add_argument("--alpha", type=float, default=0.01)
    exp.add_argument("--beta1", type=float, default=1.1)
    exp.add_argument("--beta2", type=float, default=1.1)
    exp.add_argument("--no-figures", action="store_true")

    heat = sub.add_parser("heatmap", help="render a co-clustering matrix as a PGM")
    heat.add_argument("--coclust", type=Path, required=True, help="coclust.csv input")
    heat.add_argument("--labels", type=Path, help="MAP labels (required for map ordering)")
    heat.add_argument("--ordering", choices=("map", "input"), default="map")
    heat.add_argument("--out", type=Path, default=Path("coclust.pgm"))
    heat.add_argument("--no-figures", action="store_true")
    return parser


def _load_spec_json(path: Path) -> GenerativeSpec:
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read spec file {path}: {exc}") from None
    try:
        gmm = GmmParams(np.asarray(raw["means"], dtype=float),
                        np.asarray(raw["covs"], dtype=float))
        from .synthesis import _clamped_sbm

        sbm = _clamped_sbm(np.asarray(raw["psi"], dtype=float))
        kwargs = {}
        if "sizes" in raw:
            kwargs["sizes"] = np.asarray(raw["sizes"], dtype=int)
        kwargs["label_mode"] = raw.get("label_mode", "fixed")
        if "n" in raw:
            kwargs["n"] = int(raw["n"])
        if "weights" in raw:
            kwargs["weights"] = np.asarray(raw["weights"], dtype=float)
        return GenerativeSpec(gmm=gmm, sbm=sbm, **kwargs)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"invalid generative spec {path}: {exc}") from None


def _cmd_generate(args) -> int:
    if args.case is not None:
        try:
            info = case_info(args.case)
            spec = preset(args.case)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        tag = " (reconstructed preset)" if info.reconstructed else ""
        print(f"case {args.case}: N={info.n} K={info.k} q={info.q} noise={info.noise}{tag}")
    else:
        spec = _load_spec_json(args.spec)
        print(f"spec {args.spec}: N={spec.n} K={spec.k} q={spec.q}")
    data, net, truth = generate(spec, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    sio.write_vectors(args.out / "X.csv", data)
    sio.write_network(args.out / "Y.edges", net)
    sio.write_labels(args.out / "truth.labels", truth)
    print(f"wrote X.csv, Y.edges, truth.labels to {args.out} (seed {args.seed})")
    return 0


def _vector_option(value, length: int, name: str) -> np.ndarray | None:
    """Comma-separated string or array; a scalar broadcasts to ``length``."""
    if value is None:
        return None
    if isinstance(value, str):
        try:
            vals = np.array([float(f) for f in value.split(",")])
        except ValueError:
            raise UsageError(f"bad vector for {name}: {value!r}") from None
    else:
        vals = np.asarray(value, dtype=float).reshape(-1)
    if vals.size == 1:
        return np.full(length, vals[0])
    if vals.size != length:
        raise UsageError(f"{name} needs 1 or {length} values, got {vals.size}")
    return vals


def _merged_settings(args):
    """Config-file values overridden by explicit flags."""
    settings = {}
    if args.config is not None:
        try:
            settings.update(sio.parse_config_file(args.config))
        except (OSError, sio.FormatError) as exc:
            raise UsageError(str(exc)) from None
    for key in ("k", "iterations", "burn_in", "n_chains", "seed", "eta",
                "alpha", "v0", "beta1", "beta2", "mu0", "t_scale_diag",
                "a_dirichlet"):
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    return settings


def _cmd_fit(args) -> int:
    if args.x is None and args.y is None:
        raise UsageError("fit needs --x, --y, or both")
    settings = _merged_settings(args)
    try:
        net = sio.read_network(args.y) if args.y is not None else None
        data = sio.read_vectors(args.x) if args.x is not None else None
    except (OSError, sio.FormatError) as exc:
        raise UsageError(str(exc)) from None

    eta = settings.get("eta")
    if data is None:
        if eta not in (None, 0.0):
            raise UsageError("network-only input implies --eta 0")
        eta = 0.0
        data = VectorDataset(np.zeros((net.n, 1)))
    elif net is None:
        if eta not in (None, 1.0):
            raise UsageError("vectors-only input implies --eta 1")
        eta = 1.0
        net = Network(np.zeros((data.n, data.n), dtype=np.uint8))
    elif eta is None:
        eta = 0.5
    if data.n != net.n:
        raise UsageError(f"X has {data.n} objects but Y has {net.n}")

    k = settings.get("k")
    if k is None:
        raise UsageError("fit needs --k (or 'k' in the config file)")
    if k < 1:
        raise UsageError("k must be >= 1")

    t_diag = _vector_option(settings.get("t_scale_diag"), data.q, "t_scale_diag")
    try:
        priors = default_priors(
            data, k,
            alpha=settings.get("alpha", 0.01),
            v0=settings.get("v0"),
            t_scale=np.diag(t_diag) if t_diag is not None else None,
            mu0=_vector_option(settings.get("mu0"), data.q, "mu0"),
            a=_vector_option(settings.get("a_dirichlet"), k, "a_dirichlet"),
            beta1=settings.get("beta1", 1.1),
            beta2=settings.get("beta2", 1.1),
            eta=eta,
        )
        config = ChainConfig(
            k_max=k, priors=priors,
            iterations=settings.get("iterations", 2000),
            burn_in=settings.get("burn_in", 1000),
            n_chains=settings.get("n_chains", 10),
            base_seed=settings.get("seed", 0),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    summaries, selected = run_chains(data, net, config)
    for s in summaries:
        print("chain %d: MAP log posterior %.6f at iteration %d"
              % (s.chain_index, s.map_state.log_post, s.map_iteration + 1))
    print("selected chain %d, MAP log posterior %.6f"
          % (selected.chain_index, selected.map_state.log_post))

    args.out.mkdir(parents=True, exist_ok=True)
    coclust = np.mean([s.coclustering for s in summaries], axis=0)
    traces = np.stack([s.log_post_trace for s in summaries])
    order = sio.map_ordering(selected.map_state.labeling.labels)
    sio.write_labels(args.out / "map.labels", selected.map_state.labeling)
    sio.write_trace_csv(args.out / "trace.csv", traces)
    sio.write_coclust(args.out / "coclust.csv", coclust)
    sio.write_pgm(args.out / "coclust.pgm", coclust, order)
    if not args.no_figures:
        plots.save_trace_figure(args.out / "trace.png", traces, config.burn_in)
        plots.save_heatmap_figure(args.out / "coclust.png", coclust, order)
    print(f"wrote map.labels, trace.csv, coclust.csv, coclust.pgm to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    try:
        a = sio.read_labels(args.labels_a)
        b = sio.read_labels(args.labels_b)
    except (OSError, sio.FormatError) as exc:
        raise UsageError(str(exc)) from None
    if a.n != b.n:
        raise UsageError(f"label files have different lengths ({a.n} vs {b.n})")
    print("%.6f" % adjusted_rand_index(a, b))
    return 0


def _cmd_experiment(args) -> int:
    try:
        info = case_info(args.case)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.datasets < 1 or args.n_chains < 1:
        raise UsageError("--datasets and --chains must be positive")
    tag = " (reconstructed preset)" if info.reconstructed else ""
    print(f"case {args.case}: N={info.n} K={info.k} q={info.q} noise={info.noise}{tag}")

    def progress(cid, d, latest):
        parts = " ".join("%s=%.3f" % (m, v) for m, v in latest.items())
        print(f"  dataset {d + 1}/{args.datasets}: {parts}", flush=True)

    result = experiment(args.case, n_datasets=args.datasets, n_chains=args.n_chains,
                        iterations=args.iterations, burn_in=args.burn_in,
                        base_seed=args.seed, eta=args.eta, beta1=args.beta1,
                        beta2=args.beta2, alpha=args.alpha, progress=progress)
    rows = list(result.rows())
    print("method  mean(sd)")
    for method, mean, sd in rows:
        print("%-7s %.3f(%.3f)" % (method, mean, sd))
    args.out.mkdir(parents=True, exist_ok=True)
    sio.write_results_csv(args.out / "results.csv", rows)
    if not args.no_figures:
        plots.save_experiment_figure(args.out / "results.png", rows)
    print(f"wrote results.csv to {args.out}")
    return 0


def _cmd_heatmap(args) -> int:
    try:
        matrix = sio.read_coclust(args.coclust)
    except (OSError, sio.FormatError) as exc:
        raise UsageError(str(exc)) from None
    order = None
    if args.ordering == "map":
        if args.labels is None:
            raise UsageError("map ordering needs --labels")
        try:
            labeling = sio.read_labels(args.labels)
        except (OSError, sio.FormatError) as exc:
            raise UsageError(str(exc)) from None
        if labeling.n != matrix.shape[0]:
            raise UsageError("labels length does not match the matrix")
        order = sio.map_ordering(labeling.labels)
    if args.out.parent != Path(""):
        args.out.parent.mkdir(parents=True, exist_ok=True)
    sio.write_pgm(args.out, matrix, order)
    if not args.no_figures:
        plots.save_heatmap_figure(args.out.with_suffix(".png"), matrix, order)
    print(f"wrote {args.out}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "fit": _cmd_fit,
    "eval": _cmd_eval,
    "experiment": _cmd_experiment,
    "heatmap": _cmd_heatmap,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as exc:  # runtime failure
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
