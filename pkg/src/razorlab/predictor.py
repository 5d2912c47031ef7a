"""Prediction odds, democratic ratios, stochastic evaluation, and
regularized loss.

Two independent routes to the same ratio: the complexity route reads
2^(K'(ob|z) - K'(oa|z)) straight off the searched witnesses; the
democratic route counts votes in a census at a fixed program length and
brackets the ratio with the [lo, hi] count bounds. Their agreement, up to
the published glue-term band, is what the acceptance suite checks.
"""

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from . import config
from .census import vote_census
from .complexity import ComplexityEstimate, best_witness
from .errors import WitnessMissing, ZeroVotes
from .machine import Gas, Status, run
from .terms import decode_term

HAMMING = "hamming"
CORRECTION_K = "correction-k"
SURPRISAL = "surprisal"


@dataclass(frozen=True)
class OddsReport:
    o: str
    a: str
    b: str
    z: str
    k_oa: ComplexityEstimate
    k_ob: ComplexityEstimate
    delta_bits: int

    @property
    def ratio_log2(self):
        return self.delta_bits

    @property
    def ratio(self):
        """P(oa|z) / P(ob|z) as an exact rational."""
        if self.delta_bits >= 0:
            return Fraction(2 ** self.delta_bits)
        return Fraction(1, 2 ** -self.delta_bits)

    def ratio_text(self):
        r = self.ratio
        approx = f" ~ {float(r):.6g}" if r.denominator != 1 else f" = {r}"
        return f"2^{self.delta_bits}{approx}"


def odds(o, a, b, z="", max_len=config.SEARCH_CEILING, gas=None,
         allow_construction=True):
    """Probability ratio for candidate futures a vs b after observing o."""
    try:
        k_oa = best_witness(o + a, z, max_len, gas,
                            allow_construction=allow_construction)
    except Exception as exc:
        raise WitnessMissing(f"no witness for o+a: {exc}") from exc
    try:
        k_ob = best_witness(o + b, z, max_len, gas,
                            allow_construction=allow_construction)
    except Exception as exc:
        raise WitnessMissing(f"no witness for o+b: {exc}") from exc
    return OddsReport(o=o, a=a, b=b, z=z, k_oa=k_oa, k_ob=k_ob,
                      delta_bits=k_ob.value_bits - k_oa.value_bits)


def probability_vector(o, candidates, z="", max_len=config.SEARCH_CEILING,
                       gas=None):
    """Relative weights 2^-K' normalized over the listed candidates only.

    The list is never exhaustive, so these are odds among the named
    options, not absolute probabilities.
    """
    values = {}
    for cand in candidates:
        est = best_witness(o + cand, z, max_len, gas)
        values[cand] = est.value_bits
    weights = {c: Fraction(1, 2 ** v) for c, v in values.items()}
    total = sum(weights.values())
    return {c: float(w / total) for c, w in weights.items()}


@dataclass(frozen=True)
class DemocraticOdds:
    o: str
    a: str
    b: str
    z: str
    n: int
    count_a_lo: int
    count_a_hi: int
    count_b_lo: int
    count_b_hi: int
    unresolved: int

    @property
    def log2_lo(self):
        return math.log2(self.count_a_lo / self.count_b_hi)

    @property
    def log2_hi(self):
        return math.log2(self.count_a_hi / self.count_b_lo)

    @property
    def midpoint(self):
        return (self.log2_lo + self.log2_hi) / 2


def democratic_odds(o, a, b, z="", n=None, gas=None):
    """Vote-count ratio interval at program length n.

    Callers are responsible for picking an n the neutrality check accepts
    for both candidates.
    """
    if n is None:
        raise ValueError("democratic odds need an explicit n")
    census = vote_census(n, z, gas)
    oa, ob = o + a, o + b
    ca, cb = census.count_lo(oa), census.count_lo(ob)
    if ca == 0:
        raise ZeroVotes(oa, n)
    if cb == 0:
        raise ZeroVotes(ob, n)
    return DemocraticOdds(o=o, a=a, b=b, z=z, n=n,
                          count_a_lo=ca, count_a_hi=census.count_hi(oa),
                          count_b_lo=cb, count_b_hi=census.count_hi(ob),
                          unresolved=census.unresolved)


@dataclass(frozen=True)
class StochasticEval:
    q_code: str
    z: str
    samples: int
    seed: int
    gas_steps: int
    outcome_counts: dict
    divergent: int
    invalid: int

    def frequency(self, o):
        return self.outcome_counts.get(o, 0) / self.samples

    def surprisal_bits(self, o):
        f = self.frequency(o)
        return math.inf if f == 0 else -math.log2(f)

    def outcomes(self):
        return sorted(self.outcome_counts,
                      key=lambda o: (-self.outcome_counts[o], o))


def stochastic_eval(q_code, z="", n_samples=config.DEFAULT_SAMPLES,
                    gas=None, seed=config.DEFAULT_SEED):
    """Sample a randomized model: q_code run on fair-coin data streams.

    Each trial's noise is exactly the bits the run demands, so q followed
    by its demanded noise is always a self-delimiting program.
    """
    from .machine import _execute
    from .terms import bits_to_list, is_closed
    term, consumed = decode_term(q_code)
    if consumed != len(q_code) or not is_closed(term):
        raise ValueError("q_code must be one closed code with no data tail")
    rng = random.Random(seed)
    counts = {}
    divergent = 0
    invalid = 0
    gas = gas or Gas()
    z_term = bits_to_list(z)
    for _ in range(n_samples):
        out = _execute(term, z_term,
                       lambda pos: "1" if rng.getrandbits(1) else "0",
                       gas.max_steps, consumed)
        if out.status == Status.HALTED:
            key = (out.output if len(out.output) <= config.MAX_TRACKED_OUTPUT
                   else config.OVERFLOW_KEY)
            counts[key] = counts.get(key, 0) + 1
        elif out.status == Status.OUT_OF_GAS and not out.divergence_proven:
            divergent += 1
        else:
            invalid += 1
    return StochasticEval(q_code=q_code, z=z, samples=n_samples, seed=seed,
                          gas_steps=gas.max_steps, outcome_counts=counts,
                          divergent=divergent, invalid=invalid)


@dataclass(frozen=True)
class RegularizedLoss:
    model: str
    kind: str
    complexity_bits: int
    empirical_loss_bits: float
    notes: str = ""

    @property
    def total_bits(self):
        return self.complexity_bits + self.empirical_loss_bits


def hamming_loss(observed, produced):
    """Bit mismatches over the shared prefix plus the length difference."""
    short = min(len(observed), len(produced))
    mism = sum(1 for i in range(short) if observed[i] != produced[i])
    return mism + abs(len(observed) - len(produced))


def regularized_loss(model_code, o, z="", kind=HAMMING, gas=None,
                     n_samples=config.DEFAULT_SAMPLES,
                     seed=config.DEFAULT_SEED,
                     max_len=config.SEARCH_CEILING):
    """Model complexity plus empirical loss, in bits."""
    gas = gas or Gas()
    complexity = len(model_code)
    if kind in (HAMMING, CORRECTION_K):
        out = run(model_code, z, gas)
        if out.status != Status.HALTED:
            raise WitnessMissing(
                f"model did not produce an output ({out.status})")
        produced = out.output
        if kind == HAMMING:
            loss = float(hamming_loss(o, produced))
            notes = f"o'={produced}"
        else:
            est = best_witness(o, produced, max_len, gas)
            loss = float(est.value_bits)
            notes = f"o'={produced} correction witness {est.value_bits} bits"
    elif kind == SURPRISAL:
        ev = stochastic_eval(model_code, z, n_samples, gas, seed)
        freq = ev.frequency(o)
        if freq == 0.0:
            loss = math.inf
            notes = (f"outcome never sampled in {n_samples} trials; "
                     f"surprisal > {math.log2(n_samples):.2f} bits")
        else:
            loss = -math.log2(freq)
            notes = f"frequency {freq:.6g} over {n_samples} trials"
    else:
        raise ValueError(f"unknown loss kind {kind!r}")
    return RegularizedLoss(model=model_code, kind=kind,
                           complexity_bits=complexity,
                           empirical_loss_bits=loss, notes=notes)
