"""Command-line surface: verification suites, training, bound reports,
covering sweeps.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 numeric divergence during training.  All randomness flows from
``--seed``; every output directory receives one ``manifest.json`` (the only
artifact that may differ between reruns -- it records wall-clock times).
``MDLB_THREADS`` caps the worker count of the parallel simulators.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from .artifacts import (
    ConfigError,
    RunManifest,
    atomic_write_text,
    config_hash,
    history_to_csv,
    load_checkpoint,
    load_config_file,
    parse_data_config,
    parse_train_config,
    save_checkpoint,
    write_json,
)
from .charts import Series, line_chart, two_panel_chart
from .simulate import covering as covering_mod
from .simulate import (
    geometric_compression_demo,
    verify_b_max_level,
    verify_binomial_sandwich,
    verify_bucket_asymptotics,
    verify_bucket_vandermonde,
    verify_covering_monotonicity,
    verify_exp_jsd2_sum,
    verify_jsd2_lemma,
    verify_l1_moment,
    verify_mi_identities,
)
from .symmetry import DiscreteConditional
from .training.data import synth_dataset
from .training.loop import TrainingDiverged, train

SUITES = ("all", "hd", "priors", "bucket", "l1", "covering", "geometric")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2
EXIT_DIVERGED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _workers() -> int:
    raw = os.environ.get("MDLB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def binary_noise_conditional(noise: float = 0.05) -> DiscreteConditional:
    """Near-deterministic per-position kernel for the covering demos.

    Each of the two positions copies its label with probability 1 - noise.
    """
    table = {}
    for y_t in (0, 1):
        for y_g in (0, 1):
            row = np.zeros(4)
            for p_t in (0, 1):
                for p_g in (0, 1):
                    prob_t = 1.0 - noise if p_t == y_t else noise
                    prob_g = 1.0 - noise if p_g == y_g else noise
                    row[2 * p_t + p_g] = prob_t * prob_g
            table[(y_t, y_g)] = row
    return DiscreteConditional(n=1, label_alphabet=2, pred_alphabet=2, table=table)


def default_covering_spec(seed: int, m: int = 8, noise: float = 0.05) -> covering_mod.CodebookSpec:
    """Binary covering scenario with a mildly skewed product prior."""
    return covering_mod.CodebookSpec(
        m=m,
        conditional=binary_noise_conditional(noise),
        label_dist=(0.5, 0.5),
        prior=np.array([0.65, 0.35]),
        rearrangement="T",
        seed=seed,
    )


def _run_suite(suite: str, seed: int) -> list:
    reports = []

    def run(fn, *args, **kwargs):
        start = time.perf_counter()
        report = fn(*args, **kwargs)
        report.runtime_seconds = time.perf_counter() - start
        reports.append(report)

    if suite in ("all", "hd"):
        run(verify_jsd2_lemma, resolution=400, seed=seed)
    if suite == "all":
        # The exponential hypergeometric-sum check FAILS by a genuine
        # counterexample at V = n for n <= 32 (see its module docstring),
        # so a full run exits 2 by design.
        run(verify_exp_jsd2_sum)
        run(verify_binomial_sandwich, max_n=200)
    if suite in ("all", "priors"):
        run(verify_mi_identities, trials=100, seed=seed)
    if suite in ("all", "bucket"):
        run(verify_bucket_vandermonde, max_n=100)
        run(verify_b_max_level, max_n=30)
        run(verify_bucket_asymptotics)
    if suite in ("all", "l1"):
        for i, (k, n, lam) in enumerate([(2, 100, 10.0), (5, 200, 50.0), (2, 50, 20.0)]):
            run(verify_l1_moment, k, n, lam, trials=10**5, seed=seed * 7919 + i)
    if suite in ("all", "covering"):
        run(
            verify_covering_monotonicity,
            lambda i: default_covering_spec(seed * 100003 + i),
            n_seeds=20,
            trials=64,
        )
    if suite in ("all", "geometric"):
        run(lambda: geometric_compression_demo().to_report())
    return reports


def cmd_verify(args) -> int:
    out = Path(args.out)
    manifest = RunManifest(command="verify", seed=args.seed).start()
    reports = _run_suite(args.suite, args.seed)
    lines = []
    for report in reports:
        write_json(out / f"{report.name}.json", report.to_dict())
        lines.append(report.summary_line(with_runtime=False))
        print(report.summary_line())
    atomic_write_text(out / "summary.txt", "\n".join(lines) + "\n")
    manifest.finish(out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY_FAILED


def _dataset_pair(data_cfg):
    root = np.random.SeedSequence(data_cfg["seed"])
    train_ss, test_ss = root.spawn(2)
    return (
        synth_dataset(data_cfg["spec"], data_cfg["train_size"], train_ss),
        synth_dataset(data_cfg["spec"], data_cfg["test_size"], test_ss),
    )


def _history_series(history, split, key):
    rows = [r for r in history if r["split"] == split]
    return [r["epoch"] for r in rows], [r[key] for r in rows]


def cmd_train(args) -> int:
    out = Path(args.out)
    raw = load_config_file(Path(args.config))
    configs = parse_train_config(raw)
    data_cfg = parse_data_config(raw)
    for c in configs:
        if args.seed is not None:
            c.seed = args.seed
        if args.beta is not None:
            c.beta = args.beta
        if args.objective is not None:
            c.objective = args.objective
    configs = _dedup(configs)
    try:
        for c in configs:
            c.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    manifest = RunManifest(
        command="train",
        seed=configs[0].seed,
        config_path=str(args.config),
        config_sha256=config_hash(args.config),
    ).start()
    train_data, test_data = _dataset_pair(data_cfg)

    results = {}
    for config in configs:
        tag = (
            ""
            if len(configs) == 1
            else f"_{config.objective}_beta{config.beta:g}_seed{config.seed}"
        )
        try:
            result = train(config, train_data, test_data)
        except TrainingDiverged as exc:
            atomic_write_text(
                out / f"history{tag}.csv", history_to_csv(exc.result.history)
            )
            manifest.finish(out)
            print(f"training diverged at epoch {exc.result.diverged_at}", file=sys.stderr)
            return EXIT_DIVERGED
        results[(config.objective, config.beta, config.seed)] = result
        atomic_write_text(out / f"history{tag}.csv", history_to_csv(result.history))
        save_checkpoint(out / f"checkpoint{tag}.json", result.params, result.bank, config)
        epochs_tr, acc_tr = _history_series(result.history, "train", "accuracy")
        epochs_te, acc_te = _history_series(result.history, "test", "accuracy")
        svg = line_chart(
            [
                Series("train accuracy", epochs_tr, acc_tr),
                Series("test accuracy", epochs_te, acc_te),
            ],
            title=f"{config.objective} (beta={config.beta:g})",
            xlabel="epoch",
            ylabel="accuracy",
        )
        atomic_write_text(out / f"accuracy{tag}.svg", svg)

    objectives = sorted({k[0] for k in results})
    if len(objectives) > 1:
        # one series per (objective, beta); seeds aggregate into the mean,
        # with 95% bands once three or more seeds contribute
        betas = sorted({k[1] for k in results})
        acc_series, ll_series = [], []
        for objective in objectives:
            for beta in betas:
                runs = [
                    v for k, v in sorted(results.items()) if k[:2] == (objective, beta)
                ]
                if not runs:
                    continue
                label = objective if len(betas) == 1 else f"{objective} b={beta:g}"
                epochs, _ = _history_series(runs[0].history, "test", "accuracy")
                for key, dest in (("accuracy", acc_series), ("log_likelihood", ll_series)):
                    values = np.array(
                        [_history_series(r.history, "test", key)[1] for r in runs]
                    )
                    mean = values.mean(axis=0)
                    if len(runs) >= 3:
                        spread = 1.96 * values.std(axis=0, ddof=1) / np.sqrt(len(runs))
                        dest.append(
                            Series(
                                label,
                                epochs,
                                mean.tolist(),
                                (mean - spread).tolist(),
                                (mean + spread).tolist(),
                            )
                        )
                    else:
                        dest.append(Series(label, epochs, mean.tolist()))
        svg = two_panel_chart(
            acc_series,
            ll_series,
            titles=("Test accuracy", "Test log-likelihood"),
            xlabel="epoch",
            ylabels=("accuracy", "log-likelihood"),
        )
        atomic_write_text(out / "comparison.svg", svg)
    manifest.finish(out)
    return EXIT_OK


def _dedup(configs):
    seen, out = set(), []
    for c in configs:
        key = (c.objective, c.beta, c.seed)
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


def cmd_bound_report(args) -> int:
    out = Path(args.out)
    params, bank, config = load_checkpoint(Path(args.checkpoint))
    raw = load_config_file(Path(args.config))
    data_cfg = parse_data_config(raw)
    manifest = RunManifest(
        command="bound-report",
        seed=config.seed,
        config_path=str(args.config),
        config_sha256=config_hash(args.config),
    ).start()
    train_data, ghost_data = _dataset_pair(data_cfg)
    if train_data.n_classes != params.decoder.w_out.shape[1]:
        print("checkpoint and data config disagree on the class count", file=sys.stderr)
        return EXIT_USAGE
    eval_seed = config.seed + 1_000_003
    latent = bounds_mod.estimate_latent_kl(
        train_data,
        ghost_data,
        params.encoder,
        None if config.objective == "vib" else bank,
    )
    inputs = bounds_mod.BoundInputs(
        n=train_data.n,
        n_classes=train_data.n_classes,
        kl_term=latent.total,
        epsilon=args.epsilon,
        delta=args.delta,
    )
    report = bounds_mod.BoundReport.from_inputs(
        inputs,
        empirical_risk=bounds_mod.expected_risk(
            params, train_data, config.test_latent_samples, eval_seed
        ),
        empirical_gap=bounds_mod.empirical_gap(
            params, train_data, ghost_data, config.test_latent_samples, eval_seed
        ),
        seed=config.seed,
        latent_kl_per_sample=latent.per_sample_mean,
        latent_kl_stderr=latent.stderr,
        objective=config.objective,
    )
    write_json(out / "boundreport.json", report.to_dict())
    atomic_write_text(
        out / "boundreport.csv", report.csv_header() + "\n" + report.csv_row() + "\n"
    )
    print(f"{'bound':<28}{'value':>14}  vacuous")
    for name, value, vacuous in report.bound_items():
        print(f"{name:<28}{value:>14.6f}  {'VACUOUS' if vacuous else '-'}")
    print(f"{'empirical_gap':<28}{report.empirical_gap:>14.6f}  -")
    manifest.finish(out)
    return EXIT_OK


def cmd_covering_sim(args) -> int:
    out = Path(args.out)
    manifest = RunManifest(command="covering-sim", seed=args.seed).start()
    spec = default_covering_spec(args.seed, m=args.blocks, noise=args.noise)
    kl, entropy = covering_mod.block_divergence_stats(spec)
    low = max(kl - 0.5, 0.0)
    rates = np.linspace(low, kl + 0.5, args.rate_points)
    points = covering_mod.covering_simulation(
        spec,
        rates,
        trials=args.trials,
        epsilon=args.epsilon,
        workers=_workers(),
    )
    lines = ["rate,coverage,stderr"]
    for p in points:
        lines.append(f"{p.rate!r},{p.coverage!r},{p.stderr!r}")
    atomic_write_text(out / "coverage.csv", "\n".join(lines) + "\n")
    write_json(
        out / "coverage.json",
        {
            "block_kl": kl,
            "block_conditional_entropy": entropy,
            "points": [p._asdict() for p in points],
            "epsilon": args.epsilon,
            "blocks": args.blocks,
            "trials": args.trials,
            "seed": args.seed,
        },
    )
    for p in points:
        print(f"rate {p.rate:.4f}  codebook {p.codebook_size:>8d}  coverage {p.coverage:.4f}")
    manifest.finish(out)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="mdlb", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run numerical verification suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out/verify")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("train", help="train encoder/decoder models from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="out/train")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--beta", type=float, default=None, help="override the config beta")
    p.add_argument(
        "--objective",
        choices=("vib", "cdvib_lossless", "cdvib_lossy"),
        default=None,
        help="override the config objective",
    )
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bound-report", help="evaluate all bounds for a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--config", required=True, help="config with the [data] section")
    p.add_argument("--out", default="out/bounds")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.set_defaults(func=cmd_bound_report)

    p = sub.add_parser("covering-sim", help="rate sweep of codebook coverage")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out/covering")
    p.add_argument("--blocks", type=int, default=8)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--rate-points", type=int, default=6)
    p.add_argument("--epsilon", type=float, default=None, help="lossy distortion slack")
    p.set_defaults(func=cmd_covering_sim)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"mdlb: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrainingDiverged as exc:
        print(f"mdlb: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
