"""``relcheck`` command line: verify, fuzz, run and bench.

Exit codes: 0 proved (or nothing found), 1 not proved (or a distinguishing
sequence found), 2 usage, parse or validation errors, 3 solver missing.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__, interp, ir, smt
from .fuzz import fuzz
from .interp import Invocation, TraceError
from .pairing import PairingError, pair_programs
from .refine import RefineVerdict, verify_refinement
from .synth import EquivVerdict, VerifyConfig, verify_equivalence
from .tra import printer as P

EXIT_OK, EXIT_NOT_PROVED, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3

log = logging.getLogger("relcheck")


class UsageError(Exception):
    pass


# ------------------------------------------------------------ inputs

def load(path: str) -> ir.Program:
    try:
        return ir.load_program(path)
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror or e}") from e
    except ir.IRError as e:
        raise UsageError(f"{path}:{e}") from e


def load_pairs(path: Optional[str]) -> Optional[dict[str, str]]:
    if path is None:
        return None
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise UsageError(f"{path}: cannot read pairing file: {e}") from e
    if not isinstance(data, dict) or not all(isinstance(k, str) and isinstance(v, str)
                                             for k, v in data.items()):
        raise UsageError(f"{path}: pairing file must be a JSON object of names")
    return data


def load_trace(path: str) -> list[Invocation]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise UsageError(f"{path}: cannot read trace: {e}") from e
    if not isinstance(data, list):
        raise UsageError(f"{path}: trace must be a JSON array")
    seq = []
    for k, step in enumerate(data):
        if (not isinstance(step, dict) or not isinstance(step.get("txn"), str)
                or not isinstance(step.get("args", {}), dict)):
            raise UsageError(f"{path}: step {k} must be {{\"txn\": name, \"args\": {{...}}}}")
        seq.append(Invocation(step["txn"], step.get("args", {})))
    return seq


# ------------------------------------------------------------ reports

@dataclass
class VerdictReport:
    mode: str
    old: str
    new: str
    verdict: EquivVerdict
    wall_s: float
    counterexample: Optional[dict] = None

    @property
    def status(self) -> str:
        return "proved" if self.verdict.proved else "not-proved"

    def as_dict(self, timing: bool = False) -> dict[str, Any]:
        v = self.verdict
        d: dict[str, Any] = {
            "mode": self.mode,
            "old": self.old,
            "new": self.new,
            "status": self.status,
            "reason": v.reason,
            "failing_query": v.failing_query,
            "universe_size": v.universe_size,
            "iterations": v.iterations,
            "invariant": {
                "conjuncts": [str(c) for c in v.invariant],
                "pretty": P.show(v.formula),
                "sexpr": P.sexpr(v.formula),
            },
            "removed": [{"iteration": r.iteration, "conjunct": r.conjunct, "update": r.update,
                         "verdict": r.verdict} for r in v.removed],
            "queries": v.stats.as_dict(),
        }
        if isinstance(v, RefineVerdict):
            d["mappings"] = {k: m.as_dict() for k, m in sorted(v.mappings.items())}
        if self.counterexample is not None and not v.proved:
            d["counterexample"] = self.counterexample
        if timing:
            d["wall_s"] = round(self.wall_s, 3)
            d["solver_ms"] = round(v.stats.solver_ms, 1)
        return d

    def human(self, timing: bool = False) -> str:
        v = self.verdict
        lines = [f"{self.mode}: {self.status}" + ("" if v.proved else f" ({v.reason})")]
        lines.append(f"  universe {v.universe_size}, iterations {v.iterations}, "
                     f"queries {v.stats.total} (fast path {v.stats.fast_path}, "
                     f"framed {v.stats.framed}, solver {v.stats.solver_calls})")
        if v.proved:
            lines.append("  invariant:")
            lines += [f"    {c}" for c in v.invariant] or ["    true"]
        for r in v.removed:
            lines.append(f"  - iteration {r.iteration}: dropped {r.conjunct} at {r.update} [{r.verdict}]")
        if isinstance(v, RefineVerdict):
            for k, m in sorted(v.mappings.items()):
                cols = ", ".join(f"{a}->{b}" for a, b in m.names)
                lines.append(f"  mapping {k}: {cols}")
        if self.counterexample is not None and not v.proved:
            lines.append("  distinguishing sequence:")
            lines += [f"    {s['txn']}({_args(s['args'])})" for s in self.counterexample["old_trace"]]
        if timing:
            lines.append(f"  wall {self.wall_s:.2f} s")
        return "\n".join(lines)


def _args(args: dict) -> str:
    return ", ".join(f"{k}={v!r}" for k, v in args.items())


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def emit(text: str) -> None:
    sys.stdout.write(text + "\n")


# ------------------------------------------------------------ commands

def solver_config(a) -> smt.SolverConfig:
    cache = smt.VerdictCache(a.cache) if a.cache else None
    try:
        cfg = smt.SolverConfig(cmd=a.solver_cmd or smt.DEFAULT_CMD, timeout_ms=a.query_timeout_ms,
                               emit_dir=a.emit_smt, cache=cache)
    except ValueError as e:
        raise UsageError(str(e)) from e
    return cfg


def verify(old_path: str, new_path: str, mode: str, cfg: VerifyConfig,
           mapping=None, fuzz_seqs: int = 0, seed: int = 0) -> tuple[VerdictReport, Any]:
    old, new = load(old_path), load(new_path)
    try:
        pairing = pair_programs(old, new, mode, mapping)
    except PairingError as e:
        raise UsageError(str(e)) from e
    t0 = time.perf_counter()
    run = verify_equivalence if mode == "equiv" else verify_refinement
    v = run(old, new, cfg, pairing=pairing)
    wall = time.perf_counter() - t0
    cx = None
    if not v.proved and fuzz_seqs > 0:
        res = fuzz(old, new, fuzz_seqs, 5, seed, mode, pairing=pairing)
        cx = res.counterexample.as_dict() if res.found else None
    return VerdictReport(mode, Path(old_path).name, Path(new_path).name, v, wall, cx), pairing


def cmd_verify(a) -> int:
    cfg = solver_config(a)
    if cfg.cache is None or not cfg.cache.path or not cfg.cache.path.exists():
        smt.check_environment(cfg)
    vcfg = VerifyConfig(cfg, max_iters=a.max_iters, jobs=a.jobs)
    report, _ = verify(a.old, a.new, a.mode, vcfg, load_pairs(a.pairs), a.fuzz, a.seed)
    if cfg.cache is not None:
        cfg.cache.save()
    emit(dumps(report.as_dict(a.timing)) if a.json else report.human(a.timing))
    return EXIT_OK if report.verdict.proved else EXIT_NOT_PROVED


def cmd_fuzz(a) -> int:
    if a.seqs < 0 or a.len < 1:
        raise UsageError("--seqs must be >= 0 and --len >= 1")
    old, new = load(a.old), load(a.new)
    try:
        pairing = pair_programs(old, new, a.mode, load_pairs(a.pairs))
    except PairingError as e:
        raise UsageError(str(e)) from e
    res = fuzz(old, new, a.seqs, a.len, a.seed, a.mode, pairing=pairing)
    if a.json:
        emit(dumps({"mode": a.mode, "seqs": a.seqs, "len": a.len, "seed": a.seed, "tried": res.tried,
                    "found": res.found,
                    "counterexample": res.counterexample.as_dict() if res.found else None}))
    elif res.found:
        cx = res.counterexample
        emit(f"distinguishing sequence after {res.tried} tries (length {len(cx.old_trace)}):")
        for s, s2 in zip(cx.old_trace, cx.new_trace):
            emit(f"  {s.txn}({_args(s.args)})  ~  {s2.txn}({_args(s2.args)})")
        emit(f"  old: {json.dumps(cx.old_result, ensure_ascii=False)}")
        emit(f"  new: {json.dumps(cx.new_result, ensure_ascii=False)}")
    else:
        emit(f"none found in {res.tried} sequences")
    return EXIT_NOT_PROVED if res.found else EXIT_OK


def cmd_run(a) -> int:
    prog = load(a.prog)
    seq = load_trace(a.trace)
    try:
        out = interp.eval_program(prog, seq)
    except TraceError as e:
        raise UsageError(f"{a.trace}: {e}") from e
    emit(json.dumps(out, ensure_ascii=False))
    return EXIT_OK


# ------------------------------------------------------------ bench

def corpus_entries(root: Path) -> list[Path]:
    return sorted(p.parent for p in root.glob("*/meta.json"))


def bench_rows(root: Path, vcfg: VerifyConfig, fuzz_seqs: int, seed: int,
               mutants: bool = True) -> list[dict[str, Any]]:
    rows = []
    for d in corpus_entries(root):
        meta = json.loads((d / "meta.json").read_text(encoding="utf-8"))
        mode = meta.get("mode", "equiv")
        variants = [("original", "new.ir", meta.get("expected", "proved"))]
        if mutants and (d / meta.get("mutant", "mutant.ir")).exists():
            variants.append(("mutant", meta.get("mutant", "mutant.ir"), "not-proved"))
        for kind, new_name, expected in variants:
            report, pairing = verify(str(d / "old.ir"), str(d / new_name), mode, vcfg,
                                     None, 0, seed)
            res = fuzz(pairing.old, pairing.new, fuzz_seqs, 5, seed, mode, pairing=pairing)
            st = report.verdict.stats
            rows.append({"benchmark": d.name, "variant": kind, "category": meta.get("category", ""),
                         "mode": mode, "expected": expected, "status": report.status,
                         "iterations": report.verdict.iterations,
                         "universe": report.verdict.universe_size, "queries": st.total,
                         "fast_path": st.fast_path, "solver_queries": st.solver_calls,
                         "time_s": round(report.wall_s, 3), "fuzz_found": res.found})
    return rows


def plot(rows: list[dict[str, Any]], out: Path) -> list[Path]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    for kind in sorted({r["variant"] for r in rows}):
        sub = [r for r in rows if r["variant"] == kind]
        fig, ax = plt.subplots(figsize=(5.5, 4))
        for status, marker in (("proved", "o"), ("not-proved", "x")):
            pts = [r for r in sub if r["status"] == status]
            ax.scatter([r["queries"] for r in pts], [r["time_s"] for r in pts], marker=marker,
                       label=status)
            for r in pts if status == "not-proved" else ():
                ax.annotate(r["benchmark"], (r["queries"], r["time_s"]), fontsize=7,
                            xytext=(3, 3), textcoords="offset points")
        ax.set_xlabel("validity queries")
        ax.set_ylabel("wall time (s)")
        ax.set_title(f"verification cost ({kind} pairs)")
        ax.legend(frameon=False)
        fig.tight_layout()
        p = out / f"time_vs_queries_{kind}.png"
        fig.savefig(p, dpi=120)
        plt.close(fig)
        paths.append(p)
    return paths


def cmd_bench(a) -> int:
    cfg = solver_config(a)
    smt.check_environment(cfg)
    root = Path(a.corpus)
    if not corpus_entries(root):
        raise UsageError(f"{root}: no corpus entries (directories with meta.json)")
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = bench_rows(root, VerifyConfig(cfg, max_iters=a.max_iters, jobs=a.jobs), a.fuzz, a.seed,
                      not a.no_mutants)
    if cfg.cache is not None:
        cfg.cache.save()
    with open(out / "results.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    figs = plot(rows, out)
    for r in rows:
        emit(f"{r['benchmark']:<22} {r['variant']:<8} {r['status']:<10} (expected {r['expected']}) "
             f"iters {r['iterations']:>3} queries {r['queries']:>4} {r['time_s']:>7.2f} s"
             + ("  fuzz: distinguished" if r["fuzz_found"] else ""))
    emit(f"wrote {out / 'results.csv'} and {', '.join(str(p) for p in figs)}")
    ok = all(r["status"] == r["expected"] for r in rows)
    return EXIT_OK if ok else EXIT_NOT_PROVED


# ------------------------------------------------------------ argument parsing

def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver-cmd", help="solver command line (default: z3 -in -smt2)")
    p.add_argument("--query-timeout-ms", type=int, default=2000, metavar="N")
    p.add_argument("--max-iters", type=int, default=None, metavar="N")
    p.add_argument("--jobs", type=int, default=1, metavar="N")
    p.add_argument("--emit-smt", metavar="DIR", help="write every script as DIR/q<n>.smt2")
    p.add_argument("--cache", metavar="FILE", help="JSON file of cached solver verdicts")
    p.add_argument("--seed", type=int, default=0)


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relcheck", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"relcheck {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="prove two programs equivalent (or a refinement)")
    v.add_argument("old")
    v.add_argument("new")
    v.add_argument("--mode", choices=("equiv", "refine"), default="equiv")
    v.add_argument("--pairs", metavar="FILE", help="JSON object {oldTxn: newTxn}")
    v.add_argument("--json", action="store_true")
    v.add_argument("--timing", action="store_true", help="include wall times in the report")
    v.add_argument("--fuzz", type=int, default=0, metavar="N",
                   help="on failure, fuzz N sequences for a counterexample")
    _solver_flags(v)
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("fuzz", help="search for a distinguishing invocation sequence")
    f.add_argument("old")
    f.add_argument("new")
    f.add_argument("--mode", choices=("equiv", "refine"), default="equiv")
    f.add_argument("--pairs", metavar="FILE")
    f.add_argument("--seqs", type=int, default=1000)
    f.add_argument("--len", type=int, default=5)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--json", action="store_true")
    f.set_defaults(func=cmd_fuzz)

    r = sub.add_parser("run", help="evaluate a trace against one program")
    r.add_argument("prog")
    r.add_argument("trace")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="verify a corpus, write results.csv and plots")
    b.add_argument("corpus", nargs="?", default="corpus")
    b.add_argument("--out", default="bench-out")
    b.add_argument("--fuzz", type=int, default=200, metavar="N", help="fuzz sequences per pair")
    b.add_argument("--no-mutants", action="store_true")
    _solver_flags(b)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(a.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except UsageError as e:
        sys.stderr.write(f"relcheck: {e}\n")
        return EXIT_USAGE
    except smt.SolverEnvironmentError as e:
        sys.stderr.write(f"relcheck: {e}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
