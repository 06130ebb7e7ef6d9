"""Command-line front end: audit, calibrate, gen, and attack subcommands.

Every run is reproducible from its own report: re-running with the recorded
parameters reproduces the numbers bit-for-bit. Reports serialise floats at
full round-trip precision.

Exit codes: 0 success, 1 validation or I/O failure (one-line diagnostic on
stderr), 2 flag-parse / flag-domain errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .adjacency import AuditConfig, DIRECTIONS, sample_losses
from .bounds import PrivacyEstimate, chebyshev_mu
from .datamodel import Dataset, load_csv, save_csv, validate_pair
from .inversion import invert, train_mlp
from .mechanism import calibrate_sigma
from .synthgen import KINDS, GeneratorSpec, generate

SCHEMA_VERSION = "1"


def run_audit(real: Dataset, synthetic: Dataset, config: AuditConfig):
    """load-free audit pipeline: sample losses, aggregate the (mu, gamma) bound.

    Returns the provenance-complete PrivacyEstimate and the raw loss samples.
    """
    samples = sample_losses(real, synthetic, config)
    estimate = chebyshev_mu([s.loss for s in samples], config.gamma)
    estimate = dataclasses.replace(
        estimate,
        k_removed=len(samples[0].pair.removed_indices),
        direction=config.direction,
        nn_order=config.nn_order,
        seed=config.seed,
    )
    return estimate, samples


def build_report(real: Dataset, synthetic: Dataset, estimate: PrivacyEstimate,
                 samples=None) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "n_real": len(real),
        "n_synthetic": len(synthetic),
        "dim": real.dim,
        "k_removed": estimate.k_removed,
        "n_pairs": estimate.n_samples,
        "nn_order": estimate.nn_order,
        "direction": estimate.direction,
        "seed": estimate.seed,
        "mean_kl": estimate.mean_loss,
        "variance": estimate.variance,
        "upper_semivariance": estimate.upper_semivariance,
        "mu": estimate.mu,
        "gamma": estimate.gamma,
    }
    if samples is not None:
        report["kl_samples"] = [s.loss for s in samples]
    return report


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report) + "\n"
    lines = []
    for key, value in report.items():
        if isinstance(value, float):
            lines.append(f"{key}: {value!r}")
        elif isinstance(value, list):
            lines.append(f"{key}: {','.join(repr(v) for v in value)}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def _open_unit_float(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"expected a number in (0, 1), got {text}")
    return value


def _seed_u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"expected an unsigned 64-bit seed, got {text}")
    return value


def _layers_csv(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError(f"need >= 2 positive layer sizes, got {text!r}")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synthaudit",
                                     description="Empirical privacy-loss auditing for synthetic datasets.")
    sub = parser.add_subparsers(dest="command", required=True)

    audit = sub.add_parser("audit", help="estimate the (mu, gamma) privacy-loss bound for a synthetic dataset")
    audit.add_argument("--real", required=True, help="CSV of real feature vectors")
    audit.add_argument("--synthetic", required=True, help="CSV of synthetic feature vectors")
    audit.add_argument("--gamma", type=_open_unit_float, default=1e-5)
    audit.add_argument("--pairs", type=_positive_int, default=100)
    audit.add_argument("--k", type=_positive_int, default=None, help="override the neighbour-count heuristic")
    audit.add_argument("--nn-order", type=_positive_int, default=1)
    audit.add_argument("--direction", choices=DIRECTIONS, default="max")
    audit.add_argument("--seed", type=_seed_u64, default=42)
    audit.add_argument("--emit-samples", action="store_true")
    audit.add_argument("--output", default=None)
    audit.add_argument("--format", choices=("json", "text"), default="json")

    calibrate = sub.add_parser("calibrate", help="Gaussian-mechanism noise scale for (epsilon, delta, clip)")
    calibrate.add_argument("--epsilon", type=_positive_float, required=True)
    calibrate.add_argument("--delta", type=_open_unit_float, required=True)
    calibrate.add_argument("--clip", type=_positive_float, required=True)

    gen = sub.add_parser("gen", help="write a synthetic dataset drawn from a real one")
    gen.add_argument("--real", required=True)
    gen.add_argument("--kind", choices=KINDS, required=True)
    gen.add_argument("--bandwidth", type=_nonneg_float, default=0.0)
    gen.add_argument("--count", type=_positive_int, required=True)
    gen.add_argument("--seed", type=_seed_u64, default=42)
    gen.add_argument("--output", required=True)
    gen.add_argument("--labels", action="store_true", help="read (and write) an integer label column")

    attack = sub.add_parser("attack", help="train an MLP and run the model-inversion attack against it")
    attack.add_argument("--train", required=True, help="labelled CSV to train the target model on")
    attack.add_argument("--layers", type=_layers_csv, default=None,
                        help="comma-separated layer sizes incl. input dim and class count")
    attack.add_argument("--epochs", type=_nonneg_int, default=500)
    attack.add_argument("--lr", type=_positive_float, default=0.1)
    attack.add_argument("--target-class", type=_nonneg_int, default=0)
    attack.add_argument("--steps", type=_nonneg_int, default=300)
    attack.add_argument("--step-size", type=_positive_float, default=0.1)
    attack.add_argument("--seed", type=_seed_u64, default=42)
    return parser


def cmd_audit(args) -> int:
    real = load_csv(args.real)
    synthetic = load_csv(args.synthetic)
    validate_pair(real, synthetic)
    config = AuditConfig(n_pairs=args.pairs, k_override=args.k, nn_order=args.nn_order,
                         direction=args.direction, seed=args.seed, gamma=args.gamma)
    estimate, samples = run_audit(real, synthetic, config)
    report = build_report(real, synthetic, estimate, samples if args.emit_samples else None)
    _write_output(render_report(report, args.format), args.output)
    return 0


def cmd_calibrate(args) -> int:
    sigma = calibrate_sigma(args.epsilon, args.delta, args.clip)
    sys.stdout.write(f"{sigma:.6g}\n")
    return 0


def cmd_gen(args) -> int:
    real = load_csv(args.real, has_labels=args.labels)
    spec = GeneratorSpec(kind=args.kind, count=args.count, seed=args.seed, bandwidth=args.bandwidth)
    save_csv(generate(real, spec), args.output)
    return 0


def cmd_attack(args) -> int:
    data = load_csv(args.train, has_labels=True)
    n_classes = int(data.labels.max()) + 1
    layers = args.layers if args.layers is not None else (data.dim, 16, max(n_classes, 2))
    if args.target_class >= layers[-1]:
        raise ValueError(f"target class {args.target_class} out of range for {layers[-1]} classes")
    model = train_mlp(data, layers, epochs=args.epochs, learning_rate=args.lr, seed=args.seed)
    class_rows = np.flatnonzero(data.labels == args.target_class)
    if class_rows.size == 0:
        raise ValueError(f"no training examples carry class {args.target_class}")
    result = invert(model, args.target_class, steps=args.steps, step_size=args.step_size,
                    init=np.zeros(data.dim), class_examples=data.subset(class_rows))
    lines = [
        f"train_accuracy: {model.train_accuracy!r}",
        f"reconstruction: {','.join(repr(float(v)) for v in result.reconstruction)}",
        f"final_confidence: {result.final_confidence!r}",
        f"quality: {result.quality!r}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


_COMMANDS = {"audit": cmd_audit, "calibrate": cmd_calibrate, "gen": cmd_gen, "attack": cmd_attack}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
