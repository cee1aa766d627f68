"""Command line front end.

Every subcommand writes a deterministic UTF-8 JSON document (to ``--out``
or standard output) and a short text summary. Exit status is 0 on success,
1 when a verification fails and 2 on invalid input or an exceeded cap.
The log level is read from the ``NCINV_LOG`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from . import __version__
from .algebras import EnvelopingAlgebra, RelFreeContext, dim_F, dim_T, dim_U
from .commutative import beta_commutative, minimal_generators
from .errors import CapExceeded, NCInvError, OracleMismatch, ValidationError
from .groups import DEFAULT_GROUP_CAP, MatrixGroup, as_lie_group, close
from .lie import GradedLieAlgebra, free_nilpotent_lie
from .linalg import Matrix
from .pipeline import (
    DEFAULT_MAX_DEGREE,
    PipelineResult,
    VerificationReport,
    construct_invariants_F,
    construct_invariants_U,
    verify_generation,
    verify_invariance,
)
from .polarize import verify_polarization
from .tensor import NCPolynomial

log = logging.getLogger("ncinv")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
INVARIANT_MODES = ("relfree", "enveloping", "comm-only", "polarize")


def load_schema(name: str) -> dict:
    return json.loads(resources.files("ncinv").joinpath("schemas", name).read_text(encoding="utf-8"))


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    mode: str
    dim_v: int | None = None
    p: int | None = None
    group: list | None = None
    group_basis: str = "V"
    external_generators: Path | None = None
    lie: GradedLieAlgebra | None = None
    degree_bound: int | None = None
    verify_degree: int | None = None
    prune: bool = True
    group_cap: int = DEFAULT_GROUP_CAP
    max_degree: int = DEFAULT_MAX_DEGREE
    polarize: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict, base: Path | None = None) -> RunConfig:
        try:
            jsonschema.validate(data, load_schema("config.schema.json"))
        except jsonschema.ValidationError as exc:
            where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
            raise ValidationError(f"config invalid at {where}: {exc.message}") from None
        caps = data.get("caps", {})
        cfg = cls(
            mode=data["mode"],
            dim_v=data.get("dim_v"),
            p=data.get("p"),
            degree_bound=data.get("degree_bound"),
            verify_degree=data.get("verify_degree"),
            prune=data.get("prune", True),
            group_cap=caps.get("group_order", DEFAULT_GROUP_CAP),
            max_degree=caps.get("max_degree", DEFAULT_MAX_DEGREE),
            polarize=dict(data.get("polarize", {})),
            raw=data,
        )
        if "group" in data:
            cfg.group = [Matrix.from_rows(g) for g in data["group"]["generators"]]
            cfg.group_basis = data["group"].get("basis", "V")
        if "external_generators" in data:
            path = Path(data["external_generators"])
            cfg.external_generators = path if path.is_absolute() or base is None else base / path
        if "lie" in data:
            cfg.lie = GradedLieAlgebra.from_json(data["lie"])
        cfg.check()
        return cfg

    def check(self) -> None:
        if self.mode in INVARIANT_MODES:
            if self.p is None:
                raise ValidationError(f"mode {self.mode} needs p")
            if self.mode != "polarize" and self.dim_v is None and self.lie is None:
                raise ValidationError(f"mode {self.mode} needs dim_v")
            has_group = bool(self.group)
            has_external = self.external_generators is not None
            if self.group is not None and not self.group:
                raise ValidationError("group.generators is empty; list at least one matrix "
                                      "(use the identity for the trivial group)")
            if has_group == has_external and self.mode == "relfree":
                raise ValidationError("give exactly one of group or external_generators")
            if self.mode != "relfree" and not has_group:
                raise ValidationError(f"mode {self.mode} needs a group")
            if self.mode == "polarize" and not self.polarize:
                raise ValidationError("mode polarize needs a polarize section")
        if self.mode == "dims" and (self.dim_v is None or self.p is None):
            raise ValidationError("mode dims needs dim_v and p")
        if self.lie is not None and self.mode != "enveloping":
            raise ValidationError("a custom Lie algebra is only used in enveloping mode")

    def apply_flags(self, args: argparse.Namespace) -> None:
        raw = json.loads(json.dumps(self.raw))
        if getattr(args, "max_degree", None) is not None:
            self.max_degree = args.max_degree
            raw.setdefault("caps", {})["max_degree"] = args.max_degree
        if getattr(args, "group_cap", None) is not None:
            self.group_cap = args.group_cap
            raw.setdefault("caps", {})["group_order"] = args.group_cap
        if getattr(args, "verify_degree", None) is not None:
            self.verify_degree = args.verify_degree
            raw["verify_degree"] = args.verify_degree
        self.raw = raw


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("config must be a JSON object")
    return RunConfig.from_dict(data, path.parent)


# ---------------------------------------------------------------------------
# modes
# ---------------------------------------------------------------------------


@dataclass
class Outcome:
    mode: str
    status: str
    result: dict
    summary: list

    def exit_code(self) -> int:
        return EXIT_FAIL if self.status == "FAIL" else EXIT_OK


def _group(cfg: RunConfig, n: int) -> MatrixGroup:
    return close(cfg.group, cap=cfg.group_cap, n=n)


def _verification_lines(rep: VerificationReport | None) -> list[str]:
    if rep is None:
        return ["verification: not run (no finite group)"]
    lines = [f"verification up to degree {rep.max_checked_degree}: {'PASS' if rep.passed else 'FAIL'}",
             "   d  subalgebra  invariants"]
    lines += [f"  {r.degree:2d}  {r.dim_subalgebra:10d}  {r.dim_invariants:10d}" + ("" if r.equal else "  <-")
              for r in rep.table]
    return lines


def _pipeline_outcome(mode: str, res: PipelineResult) -> Outcome:
    names = res.lie.labels if mode == "enveloping" else None
    lines = [f"{len(res.generators)} generators ({len(res.dropped)} pruned)"]
    lines += [f"  deg {g.f_degree}: {g.nc.pretty(names)}" for g in res.generators]
    lines += _verification_lines(res.verification)
    b = res.bounds
    lines.append(f"bounds: beta_comm={b.beta_comm} beta_nc={b.beta_nc} p*beta_comm={b.p * b.beta_comm}"
                 + (f" p*|G|={b.p * b.group_order}" if b.group_order is not None else ""))
    if res.verification is None:
        status = "OK"
    else:
        status = "PASS" if res.verification.passed else "FAIL"
    return Outcome(mode, status, res.to_json(), lines)


def run_relfree(cfg: RunConfig) -> Outcome:
    G = _group(cfg, cfg.dim_v) if cfg.group else None
    res = construct_invariants_F(G, cfg.dim_v, cfg.p, D=cfg.degree_bound, max_degree=cfg.max_degree,
                                 verify_degree=cfg.verify_degree, external=cfg.external_generators,
                                 prune=cfg.prune)
    return _pipeline_outcome("relfree", res)


def _lie_and_group(cfg: RunConfig) -> tuple[GradedLieAlgebra, MatrixGroup]:
    lie = cfg.lie if cfg.lie is not None else free_nilpotent_lie(cfg.dim_v, cfg.p)
    if cfg.lie is not None or cfg.group_basis == "L":
        G = _group(cfg, lie.dim)
    else:
        G = _group(cfg, cfg.dim_v)
    return lie, G


def run_enveloping(cfg: RunConfig) -> Outcome:
    lie, G = _lie_and_group(cfg)
    res = construct_invariants_U(lie, G, D=cfg.degree_bound, max_degree=cfg.max_degree,
                                 verify_degree=cfg.verify_degree)
    return _pipeline_outcome("enveloping", res)


def run_comm(cfg: RunConfig) -> Outcome:
    lie, G = _lie_and_group(cfg)
    records = minimal_generators(G, lie, cfg.degree_bound, max_weight=cfg.max_degree)
    result = {"lie_basis": {"degrees": list(lie.degrees), "labels": list(lie.labels)},
              "commutative_generators": [r.to_json() for r in records],
              "beta_comm": beta_commutative(records)}
    lines = [f"{len(records)} multihomogeneous generators of S(L)^G"]
    lines += [f"  alpha={list(r.alpha)}: {r.poly.pretty(lie.labels)}" for r in records]
    return Outcome("comm-only", "OK", result, lines)


def run_polarize(cfg: RunConfig) -> Outcome:
    pz = cfg.polarize
    dim_u = pz.get("dim_u", 0)
    G = _group(cfg, dim_u + pz["dim_w"])
    d_max = cfg.verify_degree if cfg.verify_degree is not None else cfg.max_degree
    rep = verify_polarization(G, pz["dim_w"], pz["h"], cfg.p, pz["copies_target"], d_max,
                              dim_u=dim_u, source_copies=pz.get("copies_source"))
    verdict = "PASS" if rep.passed else "FAIL"
    status = verdict if rep.asserted else "REPORT"
    lines = [f"polarization {rep.source.copies} -> {rep.target.copies} copies, p={cfg.p}, h={pz['h']}: "
             f"{verdict}" + ("" if rep.asserted else " (report only; h is user supplied)")]
    lines += _verification_lines(rep.verification)[1:]
    return Outcome("polarize", status, rep.to_json(), lines)


def dims_table(n: int, p: int, max_degree: int) -> dict:
    rf = RelFreeContext(n, p, max_degree)
    env = EnvelopingAlgebra(free_nilpotent_lie(n, p))
    rows = [{"degree": d, "dim_T": dim_T(n, d), "dim_F": dim_F(rf, d), "dim_U": dim_U(env, d)}
            for d in range(max_degree + 1)]
    return {"n": n, "p": p, "table": rows}


def run_dims(cfg: RunConfig) -> Outcome:
    result = dims_table(cfg.dim_v, cfg.p, cfg.max_degree)
    lines = ["   d      dim T      dim F      dim U"]
    lines += [f"  {r['degree']:2d} {r['dim_T']:10d} {r['dim_F']:10d} {r['dim_U']:10d}" for r in result["table"]]
    return Outcome("dims", "OK", result, lines)


MODES = {"relfree": run_relfree, "enveloping": run_enveloping, "comm-only": run_comm,
         "polarize": run_polarize, "dims": run_dims}


def run_config(cfg: RunConfig) -> Outcome:
    return MODES[cfg.mode](cfg)


def verify_result_file(cfg: RunConfig, result_path: str | Path) -> Outcome:
    """Re-check generators stored in an earlier result file against the config's group."""
    try:
        doc = json.loads(Path(result_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read result file {result_path}: {exc}") from None
    if doc.get("mode") not in ("relfree", "enveloping") or "generators" not in doc.get("result", {}):
        raise ValidationError("result file holds no relfree or enveloping generators")
    if not cfg.group:
        raise ValidationError("verification needs a group in the config")
    if doc["mode"] == "relfree":
        G = _group(cfg, cfg.dim_v)
        arena = RelFreeContext(cfg.dim_v, cfg.p, cfg.max_degree)
        p = cfg.p
    else:
        lie, G0 = _lie_and_group(cfg)
        G = as_lie_group(G0, lie)
        arena = EnvelopingAlgebra(lie)
        p = max(lie.max_degree, 1)
    gens = [NCPolynomial.from_json(arena, g["nc"]) for g in doc["result"]["generators"]]
    d_max = cfg.verify_degree
    if d_max is None:
        stored = doc["result"].get("verification") or {}
        d_max = stored.get("max_checked_degree", min(p * G.order, cfg.max_degree))
    invariant = verify_invariance(G, gens)
    rep = verify_generation(G, gens, d_max, arena=arena)
    ok = invariant and rep.passed
    lines = [f"generators invariant: {invariant}"] + _verification_lines(rep)
    return Outcome("verify", "PASS" if ok else "FAIL",
                   {"invariant": invariant, "verification": rep.to_json()}, lines)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="write the JSON result here instead of standard output")
    common.add_argument("--max-degree", type=int, help="degree cap (overrides caps.max_degree)")
    common.add_argument("--verify-degree", type=int, help="verify generation up to this degree")
    common.add_argument("--group-cap", type=int, help="largest group order accepted by the closure")
    common.add_argument("--quiet", action="store_true", help="suppress the text summary")

    parser = argparse.ArgumentParser(prog="ncinv", description="Invariants of relatively free and enveloping algebras.")
    parser.add_argument("--version", action="version", version=f"ncinv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run the mode named in the config")
    for name, help_ in (("comm", "commutative generators of S(L)^G"),
                        ("polarize", "polarization check from a config"),
                        ("dims", "dimension table of T, F and U")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if name == "dims":
            sp.add_argument("--n", type=int)
            sp.add_argument("--p", type=int)
    lb = sub.add_parser("lie-basis", parents=[common], help="Lyndon basis and brackets of L_p(K^n)")
    lb.add_argument("--n", type=int, required=True)
    lb.add_argument("--p", type=int, required=True)
    vf = sub.add_parser("verify", parents=[common], help="re-verify generators from a result file")
    vf.add_argument("--result", required=True, help="result file written by run")
    st = sub.add_parser("selftest", parents=[common], help="run the built-in property checks")
    st.add_argument("--seed", type=int, default=0, help="seed for the randomized checks")
    return parser


def _require_config(args, expected: str | None = None) -> RunConfig:
    if not args.config:
        raise ValidationError(f"{args.command} needs --config")
    cfg = load_config(args.config)
    if expected is not None and cfg.mode != expected:
        raise ValidationError(f"{args.command} expects a config with mode {expected}, got {cfg.mode}")
    cfg.apply_flags(args)
    return cfg


def _dispatch(args) -> tuple[Outcome, dict]:
    cmd = args.command
    if cmd == "run":
        cfg = _require_config(args)
        return run_config(cfg), cfg.raw
    if cmd == "comm":
        cfg = _require_config(args, "comm-only")
        return run_comm(cfg), cfg.raw
    if cmd == "polarize":
        cfg = _require_config(args, "polarize")
        return run_polarize(cfg), cfg.raw
    if cmd == "dims":
        if args.config:
            cfg = _require_config(args, "dims")
        else:
            if args.n is None or args.p is None:
                raise ValidationError("dims needs --config or both --n and --p")
            cfg = RunConfig.from_dict({"mode": "dims", "dim_v": args.n, "p": args.p})
            cfg.apply_flags(args)
        return run_dims(cfg), cfg.raw
    if cmd == "lie-basis":
        if args.n < 1 or args.p < 1:
            raise ValidationError("need --n >= 1 and --p >= 1")
        lie = free_nilpotent_lie(args.n, args.p)
        lines = [f"{lie.labels[i]}  (degree {lie.degrees[i]})" for i in range(lie.dim)]
        lines += [f"[{lie.labels[i]}, {lie.labels[j]}] = "
                  + " + ".join(f"({c})*{lie.labels[k]}" for k, c in sorted(img.items()))
                  for (i, j), img in sorted(lie.table.items())]
        return Outcome("lie-basis", "OK", lie.to_json(), lines), {"n": args.n, "p": args.p}
    if cmd == "verify":
        cfg = _require_config(args)
        return verify_result_file(cfg, args.result), cfg.raw
    raise ValidationError(f"unknown command {cmd}")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("NCINV_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        from .selftest import run_selftest

        results = run_selftest(args.seed)
        for r in results:
            if not args.quiet or not r.ok:
                print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}" + (f"  ({r.detail})" if r.detail else ""))
        return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL
    try:
        outcome, config_echo = _dispatch(args)
    except CapExceeded as exc:
        print(f"error: cap '{exc.cap}' exceeded: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OracleMismatch as exc:
        print(f"error: oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NCInvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    doc = {"tool": "ncinv", "version": __version__, "mode": outcome.mode, "status": outcome.status,
           "config": config_echo, "result": outcome.result}
    text = dumps(doc)
    summary = "\n".join([f"ncinv {outcome.mode}: {outcome.status}"] + outcome.summary) + "\n"
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_INPUT
        if not args.quiet:
            sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
        if not args.quiet:
            sys.stderr.write(summary)
    return outcome.exit_code()


if __name__ == "__main__":
    sys.exit(main())
