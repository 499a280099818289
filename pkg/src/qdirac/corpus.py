"""Line-oriented assertion files and the runner that checks them.

File format, one statement per line:

    # comment
    DEF name = <term expression>
    HYP norm(a,b)
    NAME: KIND <lhs> == <rhs>

KIND is EQ (normal-form equality), MATEQ (numeric matrix equivalence),
OBS (equality up to global phase) or MIXEQ (mixed-state equality).
DEF names are usable in later lines; HYP declares a normalization
constraint |a|^2 + |b|^2 = 1 applied to every later assertion.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, QDiracError
from .oracle import (
    DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, DENSE_DIM_LIMIT,
    mat_equiv, obs_equiv,
)
from .parser import Parser
from .quantum import MixedState, mix_equal
from .rewrite import NormalForm, Rewriter, render_nf
from .scalar import Scalar
from .term import Term

KINDS = ("EQ", "MATEQ", "OBS", "MIXEQ")


@dataclass
class Assertion:
    name: str
    kind: str
    lhs: str
    rhs: str
    hypotheses: tuple[tuple[str, str], ...]
    line: int


@dataclass
class CorpusFile:
    defs: list[tuple[str, str]]          # (name, source), in file order
    assertions: list[Assertion]


def parse_corpus(text: str) -> CorpusFile:
    defs: list[tuple[str, str]] = []
    assertions: list[Assertion] = []
    hyps: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        # '#' is the tensor operator, so comments are whole-line only
        if not line or line.startswith("#"):
            continue
        if line.startswith("DEF "):
            body = line[4:]
            if "=" not in body:
                raise ParseError("DEF needs 'name = expr'", lineno, 1)
            name, src = body.split("=", 1)
            defs.append((name.strip(), src.strip()))
            continue
        if line.startswith("HYP "):
            body = line[4:].strip()
            if not (body.startswith("norm(") and body.endswith(")")):
                raise ParseError("HYP needs norm(a,b)", lineno, 1)
            names = [n.strip() for n in body[5:-1].split(",")]
            if len(names) != 2:
                raise ParseError("norm takes two atom names", lineno, 1)
            hyps.append((names[0], names[1]))
            continue
        if ":" not in line:
            raise ParseError(f"unrecognized corpus line: {line!r}", lineno, 1)
        name, rest = line.split(":", 1)
        parts = rest.strip().split(None, 1)
        if len(parts) != 2 or parts[0] not in KINDS:
            raise ParseError(f"expected 'NAME: KIND lhs == rhs': {line!r}", lineno, 1)
        kind, body = parts
        if "==" not in body:
            raise ParseError("assertion needs '=='", lineno, 1)
        lhs, rhs = body.split("==", 1)
        assertions.append(
            Assertion(name.strip(), kind, lhs.strip(), rhs.strip(), tuple(hyps), lineno)
        )
    return CorpusFile(defs, assertions)


# A ket literal inside a DEF expands immediately, so defs are plain Terms.
def build_defs(defs: list[tuple[str, str]]) -> dict[str, Term]:
    env: dict[str, Term] = {}
    for name, src in defs:
        env[name] = Parser(src, env).parse_term()
    return env


@dataclass
class RunConfig:
    tol: float = DEFAULT_TOL
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    oracle: bool = True
    timings: bool = False
    trace_dir: Optional[str] = None
    dense_limit: int = DENSE_DIM_LIMIT


@dataclass
class AssertionResult:
    name: str
    kind: str
    verdict: str                      # pass | fail | error
    ms_symbolic: float = 0.0
    ms_oracle: float = 0.0
    steps: int = 0
    witness: str = ""
    oracle_note: str = ""
    trace_path: str = ""

    def as_json_dict(self, timings: bool) -> dict:
        out = {
            "name": self.name,
            "kind": self.kind,
            "verdict": self.verdict,
            "steps": self.steps,
        }
        if self.witness:
            out["witness"] = self.witness
        if self.oracle_note:
            out["oracle"] = self.oracle_note
        if timings:
            out["ms_symbolic"] = round(self.ms_symbolic, 3)
            out["ms_oracle"] = round(self.ms_oracle, 3)
        return out


@dataclass
class RunReport:
    path: str
    results: list[AssertionResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.verdict == "pass" for r in self.results)

    def counts(self) -> tuple[int, int, int]:
        p = sum(1 for r in self.results if r.verdict == "pass")
        f = sum(1 for r in self.results if r.verdict == "fail")
        e = sum(1 for r in self.results if r.verdict == "error")
        return p, f, e


def _apply_hyp_nf(nf: NormalForm, hyps) -> NormalForm:
    if not hyps:
        return nf
    return nf.map_scalars(lambda s: s.apply_norm_hypothesis(hyps))


def _sym_obs_equal(a: NormalForm, b: NormalForm) -> bool:
    """Proportionality by a unit-modulus constant, decided exactly."""
    if a.is_zero() and b.is_zero():
        return True
    if a.is_zero() or b.is_zero() or len(a.summands) != len(b.summands):
        return False
    if any(fa != fb for (_, fa), (_, fb) in zip(a.summands, b.summands)):
        return False
    try:
        ratios = {
            sb * sa.reciprocal() for (sa, _), (sb, _) in zip(a.summands, b.summands)
        }
    except QDiracError:
        return False
    if len(ratios) != 1:
        return False
    c = ratios.pop()
    return (c * c.conj()).is_one()


def _sym_mix_equal(a: MixedState, b: MixedState, hyps, rewriter: Rewriter) -> bool:
    if len(a.branches) != len(b.branches):
        return False
    for (pa, oa), (pb, ob) in zip(a.branches, b.branches):
        diff = pa - pb
        if hyps:
            diff = diff.apply_norm_hypothesis(hyps)
        if not diff.is_zero():
            return False
        if oa.dims != ob.dims:
            return False
        nfa = _apply_hyp_nf(rewriter.normalize(oa), hyps)
        nfb = _apply_hyp_nf(rewriter.normalize(ob), hyps)
        if nfa != nfb:
            return False
    return True


def run_assertion(a: Assertion, defs: dict[str, Term], cfg: RunConfig) -> AssertionResult:
    res = AssertionResult(a.name, a.kind, "error")
    rewriter = Rewriter()
    try:
        t0 = time.perf_counter()
        if a.kind == "MIXEQ":
            lhs = _parse_mix(a.lhs, defs, a.hypotheses)
            rhs = _parse_mix(a.rhs, defs, a.hypotheses)
            sym_ok = _sym_mix_equal(lhs, rhs, a.hypotheses, rewriter)
            if not sym_ok:
                res.witness = f"mixed states differ: [{lhs}] vs [{rhs}]"
        else:
            lhs = Parser(a.lhs, defs).parse_term()
            rhs = Parser(a.rhs, defs).parse_term()
            nf_l = _apply_hyp_nf(rewriter.normalize(lhs), a.hypotheses)
            nf_r = _apply_hyp_nf(rewriter.normalize(rhs), a.hypotheses)
            if a.kind == "OBS":
                sym_ok = _sym_obs_equal(nf_l, nf_r)
            else:
                sym_ok = nf_l == nf_r
            if not sym_ok:
                res.witness = f"normal forms differ: {render_nf(nf_l)} vs {render_nf(nf_r)}"
        res.ms_symbolic = (time.perf_counter() - t0) * 1000
        res.steps = rewriter.steps

        oracle_ok = True
        if cfg.oracle:
            t1 = time.perf_counter()
            if a.kind == "MIXEQ":
                dim = lhs.dims[0] if lhs.branches else 0
                if dim > cfg.dense_limit:
                    res.oracle_note = f"skipped (dim {dim})"
                else:
                    oracle_ok = mix_equal(
                        lhs, rhs, samples=cfg.samples, tol=cfg.tol,
                        seed=cfg.seed, norm_pairs=a.hypotheses,
                    )
                    if not oracle_ok and not res.witness:
                        res.witness = "oracle refutes mixed-state equality"
            else:
                dim = max(lhs.rows, lhs.cols, rhs.rows, rhs.cols)
                if dim > cfg.dense_limit:
                    res.oracle_note = f"skipped (dim {dim})"
                elif a.kind == "OBS":
                    obs = obs_equiv(lhs, rhs, samples=cfg.samples, tol=cfg.tol,
                                    seed=cfg.seed, norm_pairs=a.hypotheses)
                    oracle_ok = obs.equivalent
                    if not oracle_ok and not res.witness:
                        res.witness = str(obs)
                else:
                    oracle_ok = mat_equiv(lhs, rhs, samples=cfg.samples, tol=cfg.tol,
                                          seed=cfg.seed, norm_pairs=a.hypotheses)
                    if not oracle_ok and not res.witness:
                        res.witness = "oracle refutes matrix equality"
            res.ms_oracle = (time.perf_counter() - t1) * 1000

        res.verdict = "pass" if (sym_ok and oracle_ok) else "fail"
    except QDiracError as exc:
        res.verdict = "error"
        res.witness = f"{type(exc).__name__}: {exc}"
    return res


def _parse_mix(src: str, defs, hyps) -> MixedState:
    p = Parser(src, defs)
    p.norm_pairs = hyps
    return p.parse_mixed()


def run_file(path: str, cfg: RunConfig | None = None) -> RunReport:
    cfg = cfg or RunConfig()
    with open(path, encoding="utf-8") as fh:
        corpus = parse_corpus(fh.read())
    defs = build_defs(corpus.defs)
    report = RunReport(path)
    for a in corpus.assertions:
        report.results.append(run_assertion(a, defs, cfg))
    return report
