"""Command line front end.

One short-lived process per command: load the model file, do the work, save,
exit. Mutating commands (init, store, seq learning) hold an advisory lock,
a `<model>.lock` file created with O_EXCL, for their whole run; a leftover
lock from a crashed run has to be removed by hand. Queries and replays never
rewrite the model file and take no lock.

Stored items are mirrored into a `<model>.registry` sidecar so query
--oracle can cross-check answers against an exhaustive linear scan.

Exit codes: 0 on success, 1 when a bench experiment's built-in check fails,
2 on validation or usage errors. Stdout is byte-stable for a given model
file and arguments, apart from the advisory wall_nanos report columns.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from pathlib import Path
from typing import Iterator, Sequence

from .bench import (
    check_scaling,
    check_sisc,
    emit_report,
    run_scaling,
    run_sisc,
)
from .codes import FieldGeometry, code_to_text, num_codes, num_levels
from .errors import (
    DuplicateLabelError,
    ModelLockedError,
    NoActiveStateError,
    SdrqcError,
)
from .memory import ModelParams, SdrMemory
from .model_io import _write_atomic, load_model, save_model
from .oracle import (
    Registry,
    linear_scan_best_match,
    load_registry_file,
    save_registry_file,
)
from .patterns import load_pattern_file

SEED_ENV_VAR = "SDRQC_SEED"


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SdrqcError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdrqc",
        description="sparse distributed codes with constant-cost store and recall",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", help="create an empty model file")
    _add_param_args(p_init)
    p_init.add_argument("--model", required=True, help="model file to create")
    p_init.set_defaults(func=cmd_init)

    p_store = sub.add_parser("store", help="store patterns from a file")
    p_store.add_argument("--model", required=True)
    p_store.add_argument("--patterns", required=True, help="pattern file to store")
    p_store.set_defaults(func=cmd_store)

    p_query = sub.add_parser("query", help="recall the best match for patterns")
    p_query.add_argument("--model", required=True)
    p_query.add_argument("--patterns", required=True, help="pattern file to query")
    p_query.add_argument(
        "--oracle",
        action="store_true",
        help="also linear-scan the registry sidecar and report agreement",
    )
    p_query.set_defaults(func=cmd_query)

    p_seq = sub.add_parser("seq", help="learn a sequence, or replay one")
    p_seq.add_argument("--model", required=True)
    p_seq.add_argument("--patterns", required=True, help="one pattern per step, in order")
    p_seq.add_argument(
        "--replay",
        action="store_true",
        help="prime with the first pattern and step forward instead of learning",
    )
    p_seq.add_argument(
        "--limit",
        type=int,
        default=None,
        help="replay steps after the prime (default: one per remaining pattern)",
    )
    p_seq.set_defaults(func=cmd_seq)

    p_bench = sub.add_parser("bench", help="run a built-in experiment")
    p_bench.add_argument("experiment", choices=("scaling", "sisc"))
    _add_param_args(p_bench)
    p_bench.add_argument(
        "--sizes",
        default="10,100,1000,5000",
        help="comma-separated stored counts for scaling",
    )
    p_bench.add_argument(
        "--levels",
        default="0,0.2,0.4,0.6,0.8,1.0",
        help="comma-separated input overlap levels for sisc",
    )
    p_bench.add_argument("--trials", type=int, default=20, help="sisc trials")
    p_bench.add_argument(
        "--active-bits",
        type=int,
        default=None,
        help="active bits per generated pattern (default: 32 scaling, 40 sisc)",
    )
    p_bench.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_bench.add_argument("--out", default=None, help="write the report here instead of stdout")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def _add_param_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--q", type=int, required=True, help="number of clusters")
    parser.add_argument("--k", type=int, required=True, help="units per cluster")
    parser.add_argument("--n-in", type=int, required=True, help="input width in bits")
    parser.add_argument(
        "--n-out", type=int, default=None, help="output width (default: n-in)"
    )
    parser.add_argument("--tau-min", type=float, default=0.05)
    parser.add_argument(
        "--tau-max",
        type=float,
        default=None,
        help="exploration temperature ceiling (default 10.0; bench sisc uses 1.0 "
        "so the overlap gradient is visible at 20 trials)",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"model seed (default: ${SEED_ENV_VAR}, then 0)",
    )


def _params_from_args(
    args: argparse.Namespace, default_tau_max: float = 10.0
) -> ModelParams:
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV_VAR)
        seed = int(env) if env is not None else 0
    n_out = args.n_out if args.n_out is not None else args.n_in
    tau_max = args.tau_max if args.tau_max is not None else default_tau_max
    geometry = FieldGeometry(q=args.q, k=args.k, n_in=args.n_in, n_out=n_out)
    return ModelParams(
        geometry=geometry, tau_min=args.tau_min, tau_max=tau_max, seed=seed
    )


@contextlib.contextmanager
def _model_lock(model_path: str) -> Iterator[None]:
    lock_path = Path(f"{model_path}.lock")
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ModelLockedError(
            f"{lock_path} exists; another writer holds the model "
            f"(remove the file if that run crashed)"
        ) from None
    try:
        os.write(fd, f"{os.getpid()}\n".encode("ascii"))
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(OSError):
            os.unlink(lock_path)


def _registry_path(model_path: str) -> Path:
    return Path(f"{model_path}.registry")


def _load_registry(model_path: str, geometry: FieldGeometry) -> Registry:
    path = _registry_path(model_path)
    if path.exists():
        return load_registry_file(path, geometry)
    return Registry()


def cmd_init(args: argparse.Namespace) -> int:
    params = _params_from_args(args)
    if Path(args.model).exists():
        raise FileExistsError(f"refusing to overwrite existing model {args.model}")
    memory = SdrMemory(params)
    with _model_lock(args.model):
        save_model(memory, args.model)
    geom = params.geometry
    print(f"created {args.model}")
    print(f"q={geom.q} k={geom.k} n_in={geom.n_in} n_out={geom.n_out}")
    print(f"codes={num_codes(geom)} levels={num_levels(geom)}")
    return 0


def cmd_store(args: argparse.Namespace) -> int:
    with _model_lock(args.model):
        memory = load_model(args.model)
        registry = _load_registry(args.model, memory.geometry)
        labels, pats = load_pattern_file(args.patterns)
        names = _assign_store_names(labels, pats, registry)
        for name, pattern in zip(names, pats):
            # G is read before storing so the printed value is the
            # familiarity the selection actually saw
            g = memory.summate(pattern).familiarity
            code = memory.store(pattern)
            if registry.get(name) is None:
                registry.register(name, pattern, code)
            print(f"{name}\t{code_to_text(code)}\t{g!r}")
        save_model(memory, args.model)
        save_registry_file(registry, _registry_path(args.model))
    return 0


def _assign_store_names(
    labels: Sequence[str | None], pats: Sequence[object], registry: Registry
) -> list[str]:
    """Resolve final labels, rejecting conflicts before anything is stored.

    Unlabeled lines are named p<n> counting up from the registry size.
    Re-storing a pattern under its existing label is allowed (the registry
    keeps the first code); the same label with a different pattern is not.
    """
    names: list[str] = []
    bound: dict[str, object] = {}
    auto = len(registry)
    for label, pattern in zip(labels, pats):
        if label is None:
            name = f"p{auto}"
            auto += 1
        else:
            name = label
        prior = bound.get(name)
        if prior is None:
            existing = registry.get(name)
            prior = existing.input if existing is not None else None
        if prior is not None and prior != pattern:
            raise DuplicateLabelError(
                f"label {name!r} is already bound to a different pattern"
            )
        bound[name] = pattern
        names.append(name)
    return names


def cmd_query(args: argparse.Namespace) -> int:
    memory = load_model(args.model)
    registry = _load_registry(args.model, memory.geometry) if args.oracle else None
    labels, pats = load_pattern_file(args.patterns)
    for label, pattern in zip(labels, pats):
        result = memory.query(pattern)
        fields = [
            label if label is not None else "-",
            code_to_text(result.code),
            repr(result.familiarity),
            str(result.output),
        ]
        if registry is not None:
            scan = linear_scan_best_match(registry, pattern)
            entry = registry.get(scan.label)
            agree = int(entry is not None and entry.code == result.code)
            fields += [scan.label, str(scan.similarity), str(int(scan.tie)), str(agree)]
        print("\t".join(fields))
    return 0


def cmd_seq(args: argparse.Namespace) -> int:
    _, pats = load_pattern_file(args.patterns)
    if args.replay:
        if not pats:
            raise NoActiveStateError("replay needs at least one pattern to prime with")
        memory = load_model(args.model)
        result = memory.query(pats[0])
        print(f"prime\t{code_to_text(result.code)}\t{result.output}")
        limit = args.limit if args.limit is not None else len(pats) - 1
        if limit < 0:
            raise ValueError(f"--limit must be >= 0, got {limit}")
        for i in range(limit):
            step = memory.step()
            print(f"{i}\t{code_to_text(step.code)}\t{step.output}")
        return 0
    if len(pats) < 2:
        raise ValueError(f"sequence learning needs at least 2 patterns, got {len(pats)}")
    with _model_lock(args.model):
        memory = load_model(args.model)
        codes = memory.learn_sequence(pats)
        save_model(memory, args.model)
    for i, code in enumerate(codes):
        print(f"{i}\t{code_to_text(code)}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.experiment == "scaling":
        params = _params_from_args(args)
        sizes = _parse_int_list(args.sizes, "--sizes")
        active = args.active_bits if args.active_bits is not None else 32
        report = run_scaling(
            params, sizes, pattern_seed=params.seed, active_bits=active
        )
        problems = check_scaling(report)
    else:
        # at the model default tau_max=10.0 exploration drowns the overlap
        # gradient at 20 trials; the sisc default is the measurable regime
        params = _params_from_args(args, default_tau_max=1.0)
        levels = [part.strip() for part in args.levels.split(",") if part.strip()]
        active = args.active_bits if args.active_bits is not None else 40
        report = run_sisc(
            params, levels, trials=args.trials, seed=params.seed, active_bits=active
        )
        problems = check_sisc(report)
    text = emit_report(report, args.format)
    if args.out is not None:
        _write_atomic(Path(args.out), text.encode("utf-8"))
    else:
        sys.stdout.write(text)
    for problem in problems:
        print(f"check: {problem}", file=sys.stderr)
    return 1 if problems else 0


def _parse_int_list(text: str, what: str) -> list[int]:
    parts = [part.strip() for part in text.split(",") if part.strip()]
    if not parts:
        raise ValueError(f"{what} must list at least one integer")
    return [int(part) for part in parts]


if __name__ == "__main__":
    raise SystemExit(main())
