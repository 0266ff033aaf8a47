"""``wradius <command> <files...> [options]``.

Exit status: 0 on success, 1 when an axiom campaign records violations or a
selftest criterion fails, 2 on input errors (unreadable or malformed files,
dimension mismatches).  Every referenced file is parsed before any
computation starts.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional

from ._search import SearchConfig
from .errors import DomainError, FormatError, ShapeMismatch, SpaceMismatch
from .linalg import matrix_from_json, operator_norm
from .opspace import ConcreteOperatorSpace, MatrixOverX, o_norm, w_norm
from .radius import DEFAULT_TOL, EPS, NormEstimate, numerical_radius

COMMANDS = ("wnorm", "opnorm", "wmax", "wmin", "wt", "tensor", "axioms", "selftest")


class InputError(Exception):
    """Reported with exit status 2."""


@dataclass
class Inputs:
    matrices: list = field(default_factory=list)  # (path, ndarray)
    spaces: list = field(default_factory=list)  # (path, ConcreteOperatorSpace)
    elements: list = field(default_factory=list)  # (path, raw json), parsed against the space
    configs: list = field(default_factory=list)  # (path, SearchConfig)
    tensors: list = field(default_factory=list)  # (path, TensorRep)
    symmetric: list = field(default_factory=list)  # (path, SymmetricRep)


def _read_json(path: str):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: no such file")
    text = p.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc


def _field_error(path: str, exc: Exception) -> InputError:
    where = getattr(exc, "field", None)
    suffix = f" (field {where})" if where else ""
    return InputError(f"{path}: {exc}{suffix}")


def load_inputs(paths: List[str]) -> Inputs:
    """Parse every file, classifying it by its top-level keys."""
    from .tensor import SymmetricRep, TensorRep

    out = Inputs()
    for path in paths:
        obj = _read_json(path)
        if not isinstance(obj, dict):
            raise InputError(f"{path}: top-level value must be a JSON object")
        try:
            if "middle" in obj:
                out.symmetric.append((path, SymmetricRep.from_json(obj, "symmetric")))
            elif "left_space" in obj and "right_space" in obj:
                out.tensors.append((path, TensorRep.from_json(obj, "tensor")))
            elif "ambient_dim" in obj:
                out.spaces.append((path, ConcreteOperatorSpace.from_json(obj, "space")))
            elif "coeffs" in obj:
                out.elements.append((path, obj))
            elif "rows" in obj:
                out.matrices.append((path, matrix_from_json(obj, "matrix")))
            elif obj.keys() & {"restarts", "iters"}:
                out.configs.append((path, SearchConfig.from_json(obj, "config")))
            else:
                raise InputError(f"{path}: unrecognized file type (keys {sorted(obj)})")
        except (FormatError, ShapeMismatch, SpaceMismatch, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise _field_error(path, exc) from exc
    return out


def _space_and_elements(inp: Inputs):
    if not inp.elements:
        return None, []
    if len(inp.spaces) != 1:
        raise InputError("element files need exactly one space file "
                         f"(got {len(inp.spaces)})")
    spath, X = inp.spaces[0]
    elems = []
    for path, obj in inp.elements:
        try:
            elems.append((path, MatrixOverX.from_json(obj, X.dim, "element")))
        except (FormatError, ShapeMismatch, ValueError) as exc:
            raise _field_error(path, exc) from exc
    return X, elems


def _search_config(args, inp: Inputs) -> SearchConfig:
    base = inp.configs[-1][1] if inp.configs else SearchConfig()
    over = {k: getattr(args, k) for k in ("restarts", "iters", "seed", "tol")
            if getattr(args, k) is not None}
    try:
        return replace(base, **over)
    except ValueError as exc:
        raise InputError(f"search options: {exc}") from exc


def fmt(x: float) -> str:
    return f"{x:.12g}"


def render(label: str, est: NormEstimate) -> str:
    up = fmt(est.upper) if est.upper_certified else "inf (not certified)"
    return (f"{label}: {fmt(est.value)}  bracket [{fmt(est.lower)}, {up}]"
            f"  width {est.gap:.3e}\n    certificate: {est.certificate}")


def _matrix_radius(A, tol) -> NormEstimate:
    if A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"matrix: rows {A.shape[0]} != cols {A.shape[1]} (field rows/cols)")
    return numerical_radius(A, tol)


def _matrix_opnorm(A) -> NormEstimate:
    v = operator_norm(A)
    pad = 8.0 * max(A.shape) * EPS * float((abs(A) ** 2).sum() ** 0.5)
    return NormEstimate(v, max(v - pad, 0.0), v + pad, "operator norm (LAPACK), rounding pad")


def _norm_command(args, inp: Inputs) -> list:
    """Runs wnorm/opnorm/wmax/wmin/wt; returns (label, estimate) pairs."""
    from .affiliated import shift_generator, w_max, w_min, w_t_norm

    tol = args.tol if args.tol is not None else DEFAULT_TOL
    X, elems = _space_and_elements(inp)
    results = []
    cmd = args.command
    if cmd in ("wnorm", "opnorm"):
        for path, A in inp.matrices:
            try:
                est = _matrix_radius(A, tol) if cmd == "wnorm" else _matrix_opnorm(A)
            except ShapeMismatch as exc:
                raise _field_error(path, exc) from exc
            results.append((path, est))
    elif inp.matrices:
        raise InputError(f"{cmd} takes a space file and element files, not bare matrices")
    gen = None
    if cmd == "wt":
        if args.t is None:
            raise InputError("wt needs --t in [0, 1]")
        try:
            gen = shift_generator(args.block_size, args.t)
        except DomainError as exc:
            raise InputError(f"--t/--block-size: {exc}") from exc
    cfg = _search_config(args, inp) if cmd == "wmax" else None
    for path, x in elems:
        if cmd == "wnorm":
            est = w_norm(X, x, tol)
        elif cmd == "opnorm":
            est = o_norm(X, x)
        elif cmd == "wmin":
            est = w_min(X, x)
        elif cmd == "wmax":
            est = w_max(X, x, cfg)
        else:
            est = w_t_norm(X, x, gen, tol)
        results.append((path, est))
    if not results:
        raise InputError(f"{cmd}: no inputs to evaluate")
    return results


def _tensor_command(args, inp: Inputs) -> list:
    from .tensor import haagerup_norm, tensor_chain, wh_norm

    cfg = _search_config(args, inp)
    results = []
    for path, rep in inp.tensors:
        h = haagerup_norm(rep, cfg)
        results.append((f"{path} h", h))
        if rep.left_space.ambient_dim == rep.right_space.ambient_dim:
            results.append((f"{path} wh", wh_norm(rep, cfg, h_estimate=h)))
    for path, rep in inp.symmetric:
        for key, est in tensor_chain(rep, cfg).items():
            results.append((f"{path} {key}", est))
    if not results:
        raise InputError("tensor: expected tensor or symmetric representation files")
    return results


def _axioms_command(args, inp: Inputs) -> list:
    from .axioms import check_oi, check_oii, check_ow, check_wi, check_wii, w_oracle

    if not inp.spaces:
        raise InputError("axioms: expected at least one space file")
    tol = args.tol if args.tol is not None else 1e-8
    trials = args.trials if args.trials is not None else 100
    seed = args.seed if args.seed is not None else 0
    levels = args.levels if args.levels is not None else 3
    if trials < 1 or levels < 1:
        raise InputError("--trials and --levels must be positive")
    reports = []
    for path, X in inp.spaces:
        for rep in (check_wi(w_oracle(), X, trials, seed, tol, levels),
                    check_wii(w_oracle(), X, trials, seed, tol, levels),
                    check_oi(X, trials, seed, tol, levels),
                    check_oii(X, trials, seed, tol, levels),
                    check_ow(X, trials, seed, tol, levels)):
            reports.append((path, rep))
    return reports


def _selftest(args) -> int:
    from . import acceptance

    if args.list:
        for c in acceptance.CRITERIA:
            budget = f" (budget {c.budget:.0f}s)" if c.budget else ""
            print(f"{c.number:2d}. {c.name}{budget}")
        return 0
    numbers = None
    if args.only:
        try:
            numbers = [int(s) for s in args.only.split(",") if s.strip()]
            for n in numbers:
                acceptance.criterion(n)
        except (ValueError, KeyError) as exc:
            raise InputError(f"--only: {exc}") from exc
    cfg = acceptance.AcceptanceConfig(seed=args.seed if args.seed is not None else 0)
    if args.inject_fault:
        cfg = cfg.faulty()
        print(f"negative control: radius tolerance corrupted to {cfg.radius_tol:g}")
    results = acceptance.run(cfg, numbers, on_result=lambda r: print(r.line(), flush=True))
    npass = sum(r.ok for r in results)
    print(f"selftest: {npass}/{len(results)} criteria passed")
    if args.out:
        Path(args.out).write_bytes(acceptance.report_bytes(results, cfg))
    return 0 if npass == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wradius", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("files", nargs="*")
    p.add_argument("--tol", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--iters", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--block-size", type=int, default=3, help="weighted shift size for wt")
    p.add_argument("--levels", type=int, help="largest matrix level for axiom campaigns")
    p.add_argument("--trials", type=int)
    p.add_argument("--out", help="write the JSON report here")
    g = p.add_argument_group("selftest")
    g.add_argument("--list", action="store_true", help="list the criteria without running")
    g.add_argument("--only", help="comma-separated criterion numbers")
    g.add_argument("--inject-fault", action="store_true",
                   help="corrupt the radius tolerance (negative control)")
    return p


def _write(path: Optional[str], payload: dict) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2))


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    try:
        if args.command == "selftest":
            return _selftest(args)
        inp = load_inputs(args.files)
        if args.command == "axioms":
            reports = _axioms_command(args, inp)
            for path, rep in reports:
                print(f"{path} {rep.summary()}")
                for v in rep.violations[:5]:
                    print(f"    violation: {v.description}: lhs {fmt(v.lhs)} rhs {fmt(v.rhs)} "
                          f"margin {v.margin:.3e}")
            _write(args.out, {"command": "axioms",
                              "reports": [dict(r.to_json(), input=p) for p, r in reports]})
            return 0 if all(r.passed for _, r in reports) else 1
        if args.command == "tensor":
            results = _tensor_command(args, inp)
        else:
            results = _norm_command(args, inp)
    except InputError as exc:
        print(f"wradius: error: {exc}", file=sys.stderr)
        return 2
    for label, est in results:
        print(render(label, est))
    _write(args.out, {"command": args.command,
                      "results": [dict(est.to_json(), input=label) for label, est in results]})
    return 0


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
