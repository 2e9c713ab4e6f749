"""Command-line front end.  Every subcommand writes JSON lines
``{"suite", "case", "status", "witness"}`` sorted by case id, and exits 0
exactly when no line has status FAIL.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import cube_calculus as cc
from . import flow_category as fc
from . import polytope_lab as pl
from .errors import SchemaError, StratcatError
from .poset_core import FinitePoset, IncreasingSequence, sequence_maps
from .rational import format_rational, parse_grid
from .simplicial_kit import infinity_check, make_shape, spine_bijection

MAX_SIMPLICIAL_DIM = 6
MAX_JACOBIAN_N = 7


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    grid: tuple[Fraction, ...]
    bound: int | None
    output: str | None
    jobs: int

    def __post_init__(self):
        if self.command == "nerve-check" and not 0 <= (self.bound or 0) <= MAX_SIMPLICIAL_DIM:
            raise SchemaError(f"--dim must lie in 0..{MAX_SIMPLICIAL_DIM}")
        if self.command == "qbar-audit" and not 1 <= (self.bound or 0) <= MAX_JACOBIAN_N:
            raise SchemaError(f"--max-n must lie in 1..{MAX_JACOBIAN_N}")
        if self.jobs < 1:
            raise SchemaError("--jobs must be positive")


def _line(suite: str, case: str, status: str, witness=None) -> dict:
    return {"suite": suite, "case": case, "status": status, "witness": witness}


def _seq_id(seq: IncreasingSequence) -> str:
    return ",".join(map(str, seq.entries))


def _rat(x) -> str:
    return format_rational(Fraction(x))


def _coords(xs) -> list[str]:
    return [_rat(x) for x in xs]


# ---------------------------------------------------------------- case bodies
def case_canonical(seq: IncreasingSequence, s: Fraction, grid) -> tuple[str, object]:
    bad = cc.oracle_mismatches(seq, s, grid)
    if bad:
        return "FAIL", {"mismatches": len(bad), "first": repr(bad[0])}
    for x in cc.grid_points(seq.length, grid):
        p = cc.cube_point(seq.length, x)
        rep = cc.canonical_form(seq, p, s)
        if rep.s != s:
            return "FAIL", {"point": _coords(x), "reason": "level changed"}
        if cc.stratum_of(seq, p, s) != cc.stratum_of(seq, rep.point, s):
            return "FAIL", {"point": _coords(x), "reason": "stratum not constant on class"}
        if s < seq.heights()[0] and all(t != 1 for t in x) and cc.stratum_of(seq, p, s) != seq[-1]:
            return "FAIL", {"point": _coords(x), "reason": "unbroken point off the last stratum"}
    return "PASS", None


def case_recompose(n: int, grid) -> tuple[str, object]:
    for x in cc.grid_points(n, grid):
        p = cc.cube_point(n, x)
        if cc.recompose(cc.unbroken_decomposition(p)) != p:
            return "FAIL", {"point": _coords(x)}
    return "PASS", None


def _levels_and_points(seq: IncreasingSequence, grid):
    for s in cc.critical_and_midpoint_levels(seq):
        for x in cc.grid_points(seq.length, grid):
            yield s, cc.leveled(seq, x, s)


def case_functorial(phi, psi, grid) -> tuple[str, object]:
    both = phi.then(psi)
    for s, lp in _levels_and_points(phi.source, grid):
        direct = cc.ca_structural_map(both, lp)
        stepwise = cc.ca_structural_map(psi, cc.ca_structural_map(phi, lp))
        if direct != stepwise:
            return "FAIL", {"coords": _coords(lp.coords), "s": _rat(s),
                            "direct": _coords(direct.coords), "stepwise": _coords(stepwise.coords)}
    return "PASS", None


def case_padding(phi, grid) -> tuple[str, object]:
    m = phi.target.length
    lo, hi = phi.map[0], phi.map[-1]
    for s, lp in _levels_and_points(phi.source, grid):
        base = cc.ca_structural_map(phi, lp)
        if phi == type(phi).identity(phi.source) and base != cc.canonical_form(lp.seq, lp.point, s):
            return "FAIL", {"coords": _coords(lp.coords), "reason": "identity"}
        for d in cc.grid_points(lo, grid):
            for t in cc.grid_points(m - hi, grid):
                delta = cc.CubePoint(m, 0, lo, d)
                theta = cc.CubePoint(m, hi, m, t)
                if cc.ca_structural_map_padded(phi, lp, delta, theta) != base:
                    return "FAIL", {"coords": _coords(lp.coords), "s": _rat(s),
                                    "delta": _coords(d), "theta": _coords(t)}
    return "PASS", None


def case_fiber(seq: IncreasingSequence, i: int) -> tuple[str, object]:
    P = pl.build_P(seq, i)
    Q = pl.simplex_fiber(seq, seq.band_midpoint(i))
    ok = pl.comb_equiv(P, Q)
    witness = {"vertices": len(P.vertices), "faces": len(P.faces)}
    return ("PASS" if ok else "FAIL"), witness


def case_lemmas(seq: IncreasingSequence, i: int, grid, mutated: bool = False) -> tuple[str, object]:
    vmap = pl.q_vertex_without_k1_zeroing if mutated else pl.q_vertex
    rep = pl.verify_qbar_lemmas(seq, i, grid, vmap)
    found = rep.total_counterexamples()
    if mutated:
        return ("PASS" if found else "FAIL"), {"counterexamples": found}
    if found:
        first = next((k, v[0]) for k, v in rep.counterexamples.items() if v)
        return "FAIL", {"counterexamples": found, "lemma": first[0], "witness": first[1]}
    return "PASS", {"samples": rep.cases["zero_coordinate"]}


def case_jacobian(n: int, i: int) -> tuple[str, object]:
    audit = pl.jacobian_class_audit(n, i)
    return ("PASS" if audit.ok else "FAIL"), audit.to_json()


def _run_case(item):
    suite, case, fn, args = item
    status, witness = fn(*args)
    return _line(suite, case, status, witness)


# ---------------------------------------------------------------- suites
Case = tuple[str, str, Callable, tuple]


def _sequences(A: FinitePoset, max_len: int):
    for n in range(max_len + 1):
        yield from A.increasing_sequences(n)


def cubes_cases(A: FinitePoset, max_len: int, grid) -> list[Case]:
    cases: list[Case] = []
    seqs = list(_sequences(A, max_len))
    for seq in seqs:
        for s in cc.critical_and_midpoint_levels(seq):
            cases.append(("cubes", f"canonical/{_seq_id(seq)}/s={_rat(s)}", case_canonical, (seq, s, grid)))
    for n in range(1, max_len + 1):
        cases.append(("cubes", f"recompose/n={n}", case_recompose, (n, grid)))
    maps = {(a, b): sequence_maps(a, b) for a in seqs for b in seqs}
    for a in seqs:
        for b in seqs:
            for k, phi in enumerate(maps[a, b]):
                tag = f"{_seq_id(a)}->{_seq_id(b)}#{''.join(map(str, phi.map))}"
                cases.append(("cubes", f"padding/{tag}", case_padding, (phi, grid)))
                for c in seqs:
                    for psi in maps[b, c]:
                        cases.append(("cubes", f"functor/{tag}->{_seq_id(c)}#{''.join(map(str, psi.map))}",
                                      case_functorial, (phi, psi, grid)))
    return cases


def fiber_cases(A: FinitePoset, max_len: int) -> list[Case]:
    return [("fiber", f"{_seq_id(seq)}/band={i}", case_fiber, (seq, i))
            for seq in _sequences(A, max_len) for i in seq.bands()]


def pattern_sequences(max_n: int):
    """One sequence per pattern of equalities a_k = a_{k+1}, over a long chain."""
    A = FinitePoset.chain([f"c{k}" for k in range(max_n + 1)])
    for n in range(1, max_n + 1):
        for steps in range(2 ** n):
            level, entries = 0, ["c0"]
            for k in range(n):
                if steps >> k & 1:
                    level += 1
                entries.append(f"c{level}")
            yield IncreasingSequence(A, tuple(entries))


def qbar_cases(max_n: int, grid) -> list[Case]:
    cases: list[Case] = []
    for seq in pattern_sequences(max_n):
        for i in seq.bands():
            cases.append(("qbar", f"lemmas/{_seq_id(seq)}/band={i}", case_lemmas, (seq, i, grid)))
    for n in range(1, max_n + 1):
        for i in range(n):
            cases.append(("qbar", f"jacobian/n={n}/i={i}", case_jacobian, (n, i)))
    if max_n >= 3:
        A = FinitePoset.chain(["c0", "c1", "c2", "c3"])
        seq = IncreasingSequence(A, ("c0", "c1", "c2", "c3"))
        cases.append(("qbar", "mutation/skip-k1-zeroing", case_lemmas, (seq, 2, grid, True)))
    return cases


def run_cases(cases: Sequence[Case], jobs: int) -> list[dict]:
    if jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            lines = list(pool.map(_run_case, cases, chunksize=8))
    else:
        lines = [_run_case(c) for c in cases]
    return sorted(lines, key=lambda line: line["case"])


# ---------------------------------------------------------------- commands
def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from None


def cmd_homology(args) -> list[dict]:
    if args.input in fc.BUILTINS:
        data = fc.builtin_example(args.input)
    else:
        data = fc.StratifiedCategoryData.from_json(_load_json(args.input))
    report = fc.validate_category(data)
    lines = [_line("homology", "validate", "PASS" if report.ok else "FAIL",
                   {"violations": list(report.violations), "warnings": list(report.warnings)})]
    if not report.ok:
        return lines
    coeffs = fc.CoefficientFunctor.from_json(_load_json(args.coeffs)) if args.coeffs else None
    try:
        cx = fc.morse_complex(data, args.ring, coeffs)
    except fc.DataError as exc:
        return lines + [_line("homology", "d_squared", "FAIL", str(exc))]
    lines.append(_line("homology", "d_squared", "PASS", None))
    groups = fc.homology(cx)
    for g in groups:
        lines.append(_line("homology", f"H{g.degree}", "PASS",
                           {"rank": g.rank, "torsion": list(g.torsion), "group": g.describe()}))
    top = max(g.degree for g in groups) if groups else -1
    ranks = {g.degree: g.rank for g in groups}
    lines.append(_line("homology", "betti", "PASS", [ranks.get(k, 0) for k in range(top + 1)]))
    return sorted(lines, key=lambda line: line["case"])


def cmd_verify_cubes(args) -> list[dict]:
    A = FinitePoset.from_json(_load_json(args.poset))
    return run_cases(cubes_cases(A, args.max_len, parse_grid(args.grid)), args.jobs)


def cmd_fiber_compare(args) -> list[dict]:
    A = FinitePoset.from_json(_load_json(args.poset))
    return run_cases(fiber_cases(A, args.max_len), args.jobs)


def cmd_qbar_audit(args) -> list[dict]:
    return run_cases(qbar_cases(args.max_n, parse_grid(args.grid)), args.jobs)


def cmd_nerve_check(args) -> list[dict]:
    raw = _load_json(args.input)
    if isinstance(raw, dict) and "homs" in raw:
        S = fc.nerve(fc.StratifiedCategoryData.from_json(raw), args.dim)
    elif isinstance(raw, dict) and "elements" in raw:
        S = make_shape("poset_nerve", poset=FinitePoset.from_json(raw), max_dim=args.dim)
    else:
        raise SchemaError("expected a category or poset JSON object")
    verdict = infinity_check(S, args.dim)
    lines = [
        _line("nerve", "inner_fillers_exist", "PASS" if verdict.inner_fillers_exist else "FAIL",
              verdict.witness if not verdict.inner_fillers_exist else None),
        _line("nerve", "inner_fillers_unique", "PASS" if verdict.inner_fillers_unique else "FAIL",
              verdict.witness if not verdict.inner_fillers_unique else None),
        _line("nerve", "is_kan", "INFO", {"is_kan": verdict.is_kan, "horns_checked": verdict.horns_checked,
                                           "kan_witness": verdict.kan_witness}),
    ]
    for n in range(args.dim + 1):
        ok = spine_bijection(S, n)
        lines.append(_line("nerve", f"spine/n={n}", "PASS" if ok else "FAIL", None))
    return sorted(lines, key=lambda line: line["case"])


COMMANDS = {
    "homology": cmd_homology,
    "verify-cubes": cmd_verify_cubes,
    "fiber-compare": cmd_fiber_compare,
    "qbar-audit": cmd_qbar_audit,
    "nerve-check": cmd_nerve_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stratcat", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--output", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("homology", parents=[common], help="Morse homology of a category")
    p.add_argument("input", help="category JSON file or builtin name (other_sphere, round_sphere)")
    p.add_argument("--ring", choices=("z", "z2"), default="z2")
    p.add_argument("--coeffs", help="coefficient functor JSON")

    p = sub.add_parser("verify-cubes", parents=[common], help="canonical forms, strata, functoriality")
    p.add_argument("--poset", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--grid", default="default")

    p = sub.add_parser("fiber-compare", parents=[common], help="P^a_i versus simplex fibers")
    p.add_argument("--poset", required=True)
    p.add_argument("--max-len", type=int, required=True)

    p = sub.add_parser("qbar-audit", parents=[common], help="q̄ lemma suite and determinant audit")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--grid", default="default")

    p = sub.add_parser("nerve-check", parents=[common], help="horn filling verdicts for a nerve")
    p.add_argument("input", help="category or poset JSON")
    p.add_argument("--dim", type=int, required=True)
    return parser


def _config(args) -> RunConfig:
    inputs = tuple(x for x in (getattr(args, "input", None), getattr(args, "poset", None),
                               getattr(args, "coeffs", None)) if x)
    bound = next((getattr(args, k) for k in ("max_len", "max_n", "dim") if hasattr(args, k)), None)
    grid = parse_grid(getattr(args, "grid", "default"))
    return RunConfig(args.command, inputs, grid, bound, args.output, args.jobs)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config(args)
        lines = COMMANDS[args.command](args)
    except SchemaError as exc:
        print(f"stratcat: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"stratcat: internal assertion failed: {exc}", file=sys.stderr)
        return 3
    except StratcatError as exc:
        print(f"stratcat: {exc}", file=sys.stderr)
        return 2
    text = "".join(json.dumps(line, sort_keys=True, ensure_ascii=False) + "\n" for line in lines)
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 1 if any(line["status"] == "FAIL" for line in lines) else 0


if __name__ == "__main__":
    sys.exit(main())
