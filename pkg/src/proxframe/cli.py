"""Command-line entry point.

Subcommands
-----------
verify       run the verification suites for an operator/prox pair
example      print the packaged worked example (operator (1, 2)^T, lam = 1)
regularizer  export induced-regularizer values over a grid as CSV/JSON
solve        solve the analysis-sparsity problem for given data
bench        time the core operations

Operators are named inline ("example35", "identity:3", "random:6x3:42") or
loaded from .csv / .json matrix files. Runs are reproducible: the seed fully
determines every sample, and reports are emitted in a fixed order with fixed
key order, so identical configurations produce byte-identical streams.
PROXFRAME_THREADS caps the worker count used to fan verification trials out;
it never changes any reported number.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from .errors import ProxFrameError
from .operators import (
    build_operator,
    load_matrix_csv,
    load_matrix_json,
    verify_operator_identities,
)
from .prox import prox_map_by_name, verify_firm_nonexpansive, verify_moreau_characterization
from .shrinkage import (
    EXAMPLE_MATRIX,
    FrameShrinkage,
    InducedRegularizer,
    example_regularizer_closed_form,
    frame_prox,
    induced_regularizer,
    verify_prox_identity,
    verify_t_firm_nonexpansive,
    weaker_regularizer_check,
)
from .solvers import AnalysisProblem, solve_analysis_dual


@dataclass
class RunConfig:
    """Parsed invocation; the seed pins all random sampling."""

    command: str
    operator: str = "example35"
    prox: str = "soft:1"
    tol: float | None = None
    trials: int = 100
    seed: int = 0
    out: str | None = None
    fmt: str = "json"
    grid: str = "-2:2:0.01"
    x: str | None = None
    problem: str | None = None
    lam: float = 1.0


def load_named_matrix(spec: str) -> np.ndarray:
    """Resolve an operator argument to a dense matrix."""
    if spec == "example35":
        return np.array(EXAMPLE_MATRIX)
    if spec.startswith("identity:"):
        d = int(spec.split(":", 1)[1])
        if d < 1:
            raise ValueError("identity dimension must be >= 1")
        return np.eye(d)
    if spec.startswith("random:"):
        try:
            _, shape, seed = spec.split(":")
            n, d = (int(v) for v in shape.lower().split("x"))
        except ValueError as exc:
            raise ValueError(f"expected random:NxD:SEED, got {spec!r}") from exc
        rng = np.random.Generator(np.random.Philox(key=np.uint64(int(seed))))
        return rng.standard_normal((n, d))
    if spec.endswith(".json"):
        return load_matrix_json(spec)
    if spec.endswith(".csv"):
        return load_matrix_csv(spec)
    raise ValueError(
        f"unknown operator {spec!r}; use example35, identity:D, random:NxD:SEED, "
        "or a .csv/.json matrix file"
    )


def parse_prox(spec: str):
    name, _, lam = spec.partition(":")
    return prox_map_by_name(name, float(lam) if lam else 1.0)


def parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError as exc:
        raise ValueError(f"expected LO:HI:STEP, got {spec!r}") from exc
    if step <= 0 or hi < lo:
        raise ValueError(f"bad grid {spec!r}")
    count = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(count)


class _Emitter:
    """Write lines to stdout and optionally mirror them to a file."""

    def __init__(self, out: str | None):
        self.lines: list[str] = []
        self.out = out

    def line(self, text: str) -> None:
        self.lines.append(text)
        sys.stdout.write(text + "\n")

    def close(self) -> None:
        if self.out:
            with open(self.out, "w") as fh:
                fh.write("\n".join(self.lines) + ("\n" if self.lines else ""))


def _report_line(report, fmt: str) -> str:
    if fmt == "csv":
        d = report.to_dict()
        return ",".join(str(d[k]).lower() if isinstance(d[k], bool) else repr(d[k]) if isinstance(d[k], float) else str(d[k]) for k in d)
    return report.to_json()


def cmd_verify(cfg: RunConfig) -> int:
    matrix = load_named_matrix(cfg.operator)
    op = build_operator(matrix)
    prox = parse_prox(cfg.prox)
    fs = FrameShrinkage(op, prox)
    reg = InducedRegularizer.from_shrinkage(fs)

    reports = [
        verify_operator_identities(op, tol=cfg.tol or 1e-10, trials=cfg.trials, seed=cfg.seed),
        verify_firm_nonexpansive(prox, dim=op.n, trials=cfg.trials, tol=cfg.tol or 1e-12, seed=cfg.seed + 1),
    ]
    if prox.potential is not None:
        reports.append(
            verify_moreau_characterization(
                prox, prox.potential, dim=op.n, trials=min(cfg.trials, 200),
                tol=cfg.tol or 1e-6, seed=cfg.seed + 2,
            )
        )
    reports.append(
        verify_t_firm_nonexpansive(fs, trials=cfg.trials, tol=cfg.tol or 1e-12, seed=cfg.seed + 3)
    )
    reports.append(
        verify_prox_identity(fs, reg, trials=min(cfg.trials, 200), tol=cfg.tol or 1e-6, seed=cfg.seed + 4)
    )
    reports.append(
        weaker_regularizer_check(reg, trials=cfg.trials, tol=cfg.tol or 1e-9, seed=cfg.seed + 5)
    )

    emit = _Emitter(cfg.out)
    for rep in reports:
        emit.line(_report_line(rep, cfg.fmt))
    emit.close()
    return 0 if all(r.passed for r in reports) else 1


def cmd_regularizer(cfg: RunConfig) -> int:
    matrix = load_named_matrix(cfg.operator)
    op = build_operator(matrix)
    prox = parse_prox(cfg.prox)
    fs = FrameShrinkage(op, prox)
    reg = InducedRegularizer.from_shrinkage(fs)
    grid = parse_grid(cfg.grid)
    tol = cfg.tol or 1e-9

    is_example = (
        op.d == 1
        and op.matrix.shape == (2, 1)
        and np.array_equal(op.matrix, EXAMPLE_MATRIX)
        and prox.name == "soft_shrink"
        and prox.lam == 1.0
    )

    if op.d == 1:
        points = grid[None, :]
        axis = grid
    else:
        # multi-dimensional signal space: evaluate along a seeded direction
        rng = np.random.Generator(np.random.Philox(key=np.uint64(cfg.seed)))
        direction = rng.standard_normal(op.d)
        direction /= np.linalg.norm(direction)
        points = direction[:, None] * grid[None, :]
        axis = grid

    f_num = np.atleast_1d(induced_regularizer(reg, points, tol=tol))
    f_closed = example_regularizer_closed_form(axis) if is_example else None
    half_step = 0.5 * float(axis[1] - axis[0]) if axis.size > 1 else 0.0
    at_branch = (np.abs(np.abs(axis) - 0.4) <= half_step) if is_example else np.zeros(axis.size, bool)

    emit = _Emitter(cfg.out)
    if cfg.fmt == "json":
        doc = {"x": axis.tolist(), "f_numeric": f_num.tolist()}
        if f_closed is not None:
            doc["f_closed_form"] = np.asarray(f_closed).tolist()
            doc["at_branch"] = [int(b) for b in at_branch]
        emit.line(json.dumps(doc))
    else:
        header = "x,f_numeric" + (",f_closed_form,at_branch" if f_closed is not None else "")
        emit.line(header)
        for i in range(axis.size):
            row = f"{float(axis[i])!r},{float(f_num[i])!r}"
            if f_closed is not None:
                row += f",{float(np.asarray(f_closed).ravel()[i])!r},{int(at_branch[i])}"
            emit.line(row)
    emit.close()
    return 0


def cmd_solve(cfg: RunConfig) -> int:
    matrix = load_named_matrix(cfg.operator)
    lam = cfg.lam
    if cfg.problem:
        with open(cfg.problem) as fh:
            doc = json.load(fh)
        x = np.asarray(doc["x"], dtype=float)
        lam = float(doc.get("lambda", lam))
    elif cfg.x:
        x = np.asarray([float(v) for v in cfg.x.split(",")], dtype=float)
    else:
        raise ValueError("solve needs --x or --problem")
    if x.shape != (matrix.shape[1],):
        raise ValueError(f"data length {x.size} does not match operator with {matrix.shape[1]} columns")

    report = solve_analysis_dual(
        AnalysisProblem(x, matrix, lam), tol=cfg.tol or 1e-10
    )
    emit = _Emitter(cfg.out)
    emit.line(report.to_json())

    # contrast with the frame shrinkage point when the matrix is a frame
    if matrix.shape[0] >= matrix.shape[1]:
        try:
            op = build_operator(matrix)
        except ProxFrameError:
            op = None
        if op is not None:
            fs = FrameShrinkage(op, parse_prox(cfg.prox))
            y = frame_prox(fs, x)
            dist = float(np.linalg.norm(op.matrix @ (np.asarray(report.minimizer) - y)))
            emit.line(json.dumps({"frame_prox": np.atleast_1d(y).tolist(), "t_distance": dist}))
    emit.close()
    return 0 if report.converged else 1


def cmd_example(cfg: RunConfig) -> int:
    emit = _Emitter(cfg.out)
    emit.line("soft shrinkage, envelope and potential at lam = 1")
    emit.line("x        S_1(x)   envelope  potential")
    from .prox import huber_envelope, shrink_potential, soft_shrink

    for x in (-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0):
        emit.line(
            f"{x:+.2f}   {soft_shrink(x, 1.0) + 0.0:+.3f}   "
            f"{huber_envelope(x, 1.0):.4f}    {shrink_potential(x, 1.0):.4f}"
        )
    emit.line("")
    emit.line("induced regularizer for T = (1, 2)^T with S_1 (branch point |y| = 2/5)")
    emit.line("y        f(y)")
    for y in (-1.0, -0.4, -0.2, 0.0, 0.2, 0.4, 1.0, 2.0):
        emit.line(f"{y:+.2f}   {example_regularizer_closed_form(y):.6f}")
    emit.line("")
    emit.line("at x = 1: frame shrinkage gives 0.4, the analysis problem's")
    emit.line("minimizer is 0.0; the shrinkage is the prox of f in the T metric,")
    emit.line("not the minimizer of the analysis objective.")
    emit.close()
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    rng = np.random.Generator(np.random.Philox(key=np.uint64(cfg.seed)))
    timings = {}

    t0 = time.perf_counter()
    op = build_operator(rng.standard_normal((400, 250)))
    timings["build_operator_400x250_s"] = time.perf_counter() - t0

    fs = FrameShrinkage(op, parse_prox(cfg.prox))
    x = rng.standard_normal((op.d, 64))
    t0 = time.perf_counter()
    frame_prox(fs, x)
    timings["frame_prox_batch64_s"] = time.perf_counter() - t0

    reg = InducedRegularizer.from_shrinkage(fs)
    t0 = time.perf_counter()
    induced_regularizer(reg, x[:, :8], tol=1e-8)
    timings["induced_regularizer_batch8_s"] = time.perf_counter() - t0

    from .prox import numeric_prox

    t0 = time.perf_counter()
    numeric_prox(reg, x[:, 0], metric=fs.metric, tol=1e-8)
    timings["numeric_prox_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    solve_analysis_dual(AnalysisProblem(x[:, 0], op, cfg.lam), tol=1e-8)
    timings["solve_analysis_dual_s"] = time.perf_counter() - t0

    emit = _Emitter(cfg.out)
    emit.line(json.dumps({k: round(v, 6) for k, v in timings.items()}))
    emit.close()
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--operator", default="example35",
                   help="example35 | identity:D | random:NxD:SEED | matrix .csv/.json")
    p.add_argument("--prox", default="soft:1", help="NAME:LAMBDA, e.g. soft:0.5 or identity")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")
    p.add_argument("--trials", type=int, default=100, help="sampling trials per check")
    p.add_argument("--seed", type=int, default=0, help="seed pinning all sampling")
    p.add_argument("--out", default=None, help="mirror output to this file")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proxframe", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("verify", "run the verification suites"),
        ("example", "print the packaged worked example"),
        ("regularizer", "export induced-regularizer values over a grid"),
        ("solve", "solve the analysis-sparsity problem"),
        ("bench", "time the core operations"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "regularizer":
            p.add_argument("--grid", default="-2:2:0.01", help="LO:HI:STEP")
        if name == "solve":
            p.add_argument("--x", default=None, help="comma-separated data vector")
            p.add_argument("--problem", default=None, help='JSON file {"x": [...], "lambda": ...}')
            p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                           help="analysis regularization weight")
    return parser


def _merge_dash_values(argv: list[str]) -> list[str]:
    """Let value flags take arguments that start with a dash (e.g. -2:2:0.01)."""
    merged = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--grid", "--x") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            merged.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            merged.append(tok)
            i += 1
    return merged


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        ns = parser.parse_args(_merge_dash_values(list(argv)))
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    fmt_default = "csv" if ns.command == "regularizer" else "json"
    cfg = RunConfig(
        command=ns.command,
        operator=ns.operator,
        prox=ns.prox,
        tol=ns.tol,
        trials=ns.trials,
        seed=ns.seed,
        out=ns.out,
        fmt=ns.fmt or fmt_default,
        grid=getattr(ns, "grid", "-2:2:0.01"),
        x=getattr(ns, "x", None),
        problem=getattr(ns, "problem", None),
        lam=getattr(ns, "lam", 1.0),
    )
    handlers = {
        "verify": cmd_verify,
        "example": cmd_example,
        "regularizer": cmd_regularizer,
        "solve": cmd_solve,
        "bench": cmd_bench,
    }
    try:
        return handlers[cfg.command](cfg)
    except (ProxFrameError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
