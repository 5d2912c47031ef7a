"""The acceptance suite: ten desk-scale checks, one per criterion.

Each check returns a CheckResult with a pass flag and the measured
numbers, so `razorlab verify` and the pytest acceptance module share one
implementation. Tolerances are pinned here, not in the callers.
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import config
from .census import (build_padded, cached_sweep, monte_carlo_m,
                     naive_census, vote_census)
from .combinators import COPY, constant_band
from .complexity import (best_witness, chain_rule_gap, joint_bounds,
                         k_prime, neutrality_check, ComplexityEstimate)
from .ledger import (Definition, ModelManifest, Registry, model_complexity)
from .machine import Gas, Status, run, is_valid_run
from .predictor import OddsReport, democratic_odds, odds
from .terms import App, Lam, Var, decode_term, encode_term

GAS_ACCEPT = Gas(10_000)

# candidate pair for the coherence check: past observations ε, candidates
# "0" vs "1", with the experiment settings z = "0" so both candidates have
# desk-scale vote sets
COHERENCE = dict(o="", a="0", b="1", z="0", ns=(24, 26))


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    summary: str
    rows: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.number:2d} {self.name}: {self.summary}"


def check_kraft():
    """Criterion 1: Kraft inequality over all valid programs <= 20 bits."""
    t0 = time.time()
    table = cached_sweep(20, "", GAS_ACCEPT)
    total = table.kraft_sum(20)
    count = sum(1 for _ in table.valid_programs())
    passed = total <= 1
    rows = [["max_len", "valid_programs", "kraft_sum", "gas"],
            ["20", str(count), f"{float(total):.12f}",
             str(GAS_ACCEPT.max_steps)]]
    return CheckResult(1, "kraft-inequality", passed,
                       f"sum 2^-|p| = {float(total):.6f} over {count} "
                       f"valid programs (exact {total})",
                       rows, time.time() - t0)


def check_prefix_free():
    """Criterion 2: no valid program is a proper prefix of another."""
    t0 = time.time()
    table = cached_sweep(20, "", GAS_ACCEPT)
    pairs = table.prefix_violations(20)
    rows = [["max_len", "violations"], ["20", str(len(pairs))]]
    return CheckResult(2, "prefix-freeness", not pairs,
                       f"{len(pairs)} proper-prefix pairs among valid "
                       "programs up to 20 bits",
                       rows, time.time() - t0)


def check_census_oracle():
    """Criterion 3: demand-tree census equals the all-strings oracle."""
    t0 = time.time()
    rows = [["n", "outputs", "match"]]
    all_ok = True
    for n in range(4, 13):
        fast = vote_census(n, "", GAS_ACCEPT)
        slow = naive_census(n, "", GAS_ACCEPT)
        ok = (fast.counts == slow.counts
              and fast.unresolved == slow.unresolved)
        all_ok &= ok
        rows.append([str(n), str(sum(fast.counts.values())), str(ok)])
    return CheckResult(3, "tiny-census-oracle", all_ok,
                       "demand-tree counts equal naive 2^n enumeration "
                       "for n = 4..12",
                       rows, time.time() - t0)


def check_padding():
    """Criterion 4: the pad construction yields 2^k same-length programs,
    all valid with output x, and the census engine confirms the counts."""
    t0 = time.time()
    x, z = "0", "0"
    rows = [["pad_len", "n", "family_valid", "census_count",
             "census_mode"]]
    all_ok = True
    for k in range(0, 9):
        padded = build_padded(x, z, k, gas=GAS_ACCEPT)
        n = padded.n
        valid = 0
        for program in padded.all_programs():
            out = run(program, z, GAS_ACCEPT)
            if (is_valid_run(out, n - out.code_bits)
                    and out.output == x):
                valid += 1
        family_ok = valid == 2 ** k
        # census cross-check: the family's code explored at exactly n
        code = padded.r + padded.chi
        census = vote_census(n, z, GAS_ACCEPT, codes=[code])
        census_ok = census.count_lo(x) >= 2 ** k
        all_ok &= family_ok and census_ok
        rows.append([str(k), str(n), f"{valid}/{2 ** k}",
                     str(census.count_lo(x)), "code-shard"])
    # fully enumerated cross-check where the whole program space fits:
    # k = 0 via the copy program, k = 1 via a one-bit reader that returns z
    from .terms import parse_term
    read1_copy = parse_term(r"\z d. d (\b t. z)")
    for k, term in ((0, COPY), (1, read1_copy)):
        n = len(encode_term(term)) + k
        census = vote_census(n, z, GAS_ACCEPT)
        ok = census.count_lo(x) >= 2 ** k
        all_ok &= ok
        rows.append([str(k), str(n), "-", str(census.count_lo(x)),
                     "full-enumeration"])
    return CheckResult(4, "padding-family", all_ok,
                       "2^k padded programs valid for k = 0..8; census "
                       "counts meet the 2^k floor",
                       rows, time.time() - t0)


def check_coding_theorem():
    """Criterion 5: m_hat(x) + 3 stderr >= 2^-K'(x) for frequent outputs."""
    t0 = time.time()
    mc = monte_carlo_m(1_000_000, "", GAS_ACCEPT, seed=config.DEFAULT_SEED)
    rows = [["x", "hits", "m_hat", "stderr", "k_prime", "bound_ok"]]
    all_ok = True
    checked = 0
    for x in mc.outputs():
        if mc.hits[x] < 100 or x == config.OVERFLOW_KEY:
            continue
        est = k_prime(x, "", 20, GAS_ACCEPT)
        lower = 2.0 ** -est.value_bits
        ok = mc.m_hat(x) + 3 * mc.stderr(x) >= lower
        all_ok &= ok
        checked += 1
        rows.append([x, str(mc.hits[x]), f"{mc.m_hat(x):.6e}",
                     f"{mc.stderr(x):.3e}", str(est.value_bits), str(ok)])
    passed = all_ok and checked >= 1
    return CheckResult(5, "coding-theorem-band", passed,
                       f"{checked} outputs with >= 100 hits in 10^6 trials "
                       "all clear the 2^-K' floor",
                       rows, time.time() - t0)


def check_coherence():
    """Criterion 6: census vote ratios track the K' difference within the
    published band, at two neutral lengths, stably."""
    t0 = time.time()
    o, a, b, z = (COHERENCE[k] for k in ("o", "a", "b", "z"))
    ns = COHERENCE["ns"]
    band = constant_band()
    rep = odds(o, a, b, z, max_len=max(ns), gas=GAS_ACCEPT)
    delta = rep.delta_bits  # K'(ob|z) - K'(oa|z)
    rows = [["n", "neutral_a", "neutral_b", "log2_lo", "log2_hi",
             "delta_bits", "within_band"]]
    mids = []
    all_ok = True
    for n in ns:
        neutral = neutrality_check(n, [o + a, o + b], z, max_len=14,
                                   gas=GAS_ACCEPT)
        dem = democratic_odds(o, a, b, z, n=n, gas=GAS_ACCEPT)
        # the democratic ratio log2(V(oa)/V(ob)) should sit within the
        # band of delta = K'(ob)-K'(oa); interval endpoints both checked
        ok = (abs(dem.log2_lo - delta) <= band
              and abs(dem.log2_hi - delta) <= band)
        mids.append(dem.midpoint)
        all_ok &= ok and all(r.neutral for r in neutral)
        rows.append([str(n), str(neutral[0].neutral),
                     str(neutral[1].neutral), f"{dem.log2_lo:.3f}",
                     f"{dem.log2_hi:.3f}", str(delta), str(ok)])
    stability = abs(mids[0] - mids[1]) <= band
    all_ok &= stability
    rows.append(["midpoint-shift", "", "", f"{abs(mids[0] - mids[1]):.3f}",
                 f"band {band}", "", str(stability)])
    return CheckResult(6, "census-odds-coherence", all_ok,
                       f"delta {delta} bits vs intervals "
                       f"[{rows[1][3]}, {rows[1][4]}] at n={ns[0]}, "
                       f"[{rows[2][3]}, {rows[2][4]}] at n={ns[1]}; "
                       f"band {band}",
                       rows, time.time() - t0)


CONSTRUCTIVE_CORPUS = [
    ("", ""), ("0", ""), ("", "1"), ("0", "1"), ("1", "0"),
    ("0", "0"), ("01", "1"), ("10", "01"), ("11", "00"), ("010", "10"),
]


def check_constructive():
    """Criterion 7: pairing, swap, projection, and chain-composition
    witnesses run and certify their inequalities on a 10-case corpus."""
    t0 = time.time()
    rows = [["x", "y", "joint_ok", "chain_ok", "gap_bits"]]
    all_ok = True
    gaps = []
    for x, y in CONSTRUCTIVE_CORPUS:
        jr = joint_bounds(x, y, "", max_len=16, gas=GAS_ACCEPT)
        cr = chain_rule_gap(x, y, "", max_len=16, gas=GAS_ACCEPT)
        all_ok &= jr.all_ok and cr.composed_ok
        gaps.append(cr.gap_bits)
        rows.append([x, y, str(jr.all_ok), str(cr.composed_ok),
                     str(cr.gap_bits)])
    rows.append(["gap-band", "", "", "",
                 f"[{min(gaps)}, {max(gaps)}]"])
    return CheckResult(7, "constructive-inequalities", all_ok,
                       f"all 10 cases certified; chain gaps in "
                       f"[{min(gaps)}, {max(gaps)}] bits",
                       rows, time.time() - t0)


def _wrap6(term):
    """(\\w. w) term: +6 code bits, same behavior."""
    return App(Lam(Var(1)), term)


def _wrap8(term):
    """(\\w. term) (\\v. v): +8 code bits, same behavior (term closed)."""
    return App(Lam(term), Lam(Var(1)))


def check_odds_arithmetic():
    """Criterion 8: a 30-bit complexity difference prints as 2^30."""
    t0 = time.time()
    k_oa = best_witness("0", "", 24, GAS_ACCEPT)
    base_b = best_witness("1", "", 24, GAS_ACCEPT)
    term_b, _ = decode_term(base_b.witness)
    # pad the b-witness so the delta lands exactly on 30 bits; identity
    # wraps add 6 or 8 code bits each without changing behavior
    need = 30 - (base_b.value_bits - k_oa.value_bits)
    padded = term_b
    while need >= 8 and need % 6 != 0:
        padded = _wrap8(padded)
        need -= 8
    while need > 0:
        padded = _wrap6(padded)
        need -= 6
    wb = encode_term(padded)
    out = run(wb, "", GAS_ACCEPT)
    wrapped_ok = out.status == Status.HALTED and out.output == "1"
    k_ob = ComplexityEstimate(subject="1", condition="", witness=wb,
                              value_bits=len(wb), status="heuristic",
                              exhaustive_to=None,
                              gas_steps=GAS_ACCEPT.max_steps)
    delta = k_ob.value_bits - k_oa.value_bits
    rep = OddsReport(o="", a="0", b="1", z="", k_oa=k_oa, k_ob=k_ob,
                     delta_bits=delta)
    exact = rep.ratio == Fraction(2 ** 30)
    text_ok = rep.ratio_text().startswith("2^30")
    passed = wrapped_ok and delta == 30 and exact and text_ok
    rows = [["k_oa", "k_ob", "delta", "ratio", "ratio_text"],
            [str(k_oa.value_bits), str(k_ob.value_bits), str(delta),
             str(rep.ratio), rep.ratio_text()]]
    return CheckResult(8, "odds-arithmetic", passed,
                       f"delta {delta} bits -> ratio {rep.ratio_text()} "
                       f"(exact {rep.ratio})",
                       rows, time.time() - t0)


def _closure_oracle(defs, roots):
    """Independent recursive-traversal closure for the dedup check."""
    seen = set()

    def visit(name):
        if name in seen:
            return
        seen.add(name)
        for dep in defs[name]:
            visit(dep)

    for r in roots:
        visit(r)
    return seen


def check_ledger_dedup():
    """Criterion 9: shared definitions are counted once; closure totals
    match an independent traversal oracle on random DAGs."""
    import random as _random
    t0 = time.time()
    reg = Registry()
    reg.register(Definition("lim", (), None, 40, "audited: textbook"))
    reg.register(Definition("integral", ("lim",), None, 60, "audited"))
    reg.register(Definition("derivative", ("lim",), None, 50, "audited"))
    manifest = ModelManifest(
        name="calculus-model", problem_id="demo",
        referenced_defs=(("integral", 1), ("derivative", 1)), glue_bits=7)
    breakdown = model_complexity(manifest, reg)
    lim_once = breakdown.definition_bits == 40 + 60 + 50
    rows = [["case", "ok", "detail"],
            ["lim-counted-once", str(lim_once),
             f"definition_bits={breakdown.definition_bits}"]]

    rng = _random.Random(7)
    dag_ok = True
    for trial in range(50):
        size = rng.randint(3, 12)
        names = [f"d{trial}_{i}" for i in range(size)]
        defs = {}
        r = Registry()
        for i, name in enumerate(names):
            deps = tuple(sorted(set(
                names[j] for j in range(i)
                if i and rng.random() < 0.4)))
            defs[name] = deps
            r.register(Definition(name, deps, None, 10 + i, "audited"))
        roots = tuple(sorted(set(
            rng.choice(names) for _ in range(rng.randint(1, 3)))))
        m = ModelManifest(name="m", problem_id="p",
                          referenced_defs=tuple((n, 1) for n in roots))
        got = set(model_complexity(m, r).closure_names)
        want = _closure_oracle(defs, roots)
        if got != want:
            dag_ok = False
            break
    rows.append(["random-dags", str(dag_ok), "50 closures vs oracle"])
    passed = lim_once and dag_ok
    return CheckResult(9, "ledger-dedup", passed,
                       "shared definition counted once; closure matches "
                       "traversal oracle on 50 random DAGs",
                       rows, time.time() - t0)


def check_determinism():
    """Criterion 10: identical configs give byte-identical CSV."""
    t0 = time.time()
    from .cli import census_csv_text, mc_csv_text
    a1 = census_csv_text(n=12, z="", gas=GAS_ACCEPT, workers=1)
    a2 = census_csv_text(n=12, z="", gas=GAS_ACCEPT, workers=4)
    b1 = mc_csv_text(samples=20_000, z="", gas=GAS_ACCEPT, seed=11,
                     workers=1)
    b2 = mc_csv_text(samples=20_000, z="", gas=GAS_ACCEPT, seed=11,
                     workers=4)
    census_same = a1 == a2
    mc_same = b1 == b2
    passed = census_same and mc_same
    rows = [["stream", "identical"],
            ["census n=12", str(census_same)],
            ["mc 2e4 seed=11", str(mc_same)]]
    return CheckResult(10, "determinism", passed,
                       "census and sampling CSVs byte-identical across "
                       "worker settings",
                       rows, time.time() - t0)


ALL_CHECKS = {
    "kraft": check_kraft,
    "prefix-free": check_prefix_free,
    "census-oracle": check_census_oracle,
    "padding": check_padding,
    "coding": check_coding_theorem,
    "coherence": check_coherence,
    "constructive": check_constructive,
    "odds-arith": check_odds_arithmetic,
    "ledger-dedup": check_ledger_dedup,
    "determinism": check_determinism,
}


def run_acceptance(names=None):
    """Run the named criteria (all by default); returns CheckResults."""
    selected = names or list(ALL_CHECKS)
    results = []
    for name in selected:
        if name not in ALL_CHECKS:
            raise ValueError(f"unknown criterion {name!r}; "
                             f"choose from {sorted(ALL_CHECKS)}")
        results.append(ALL_CHECKS[name]())
    return results
