"""Program-space exploration: exact vote censuses and Monte Carlo sampling.

The workhorse is the sweep: for every closed code of length <= L, walk the
binary tree of data-bit demands. Each tree leaf settles the fate of one
demanded prefix e: the program code ++ e halted (a valid program), can
never produce a bit list (invalid), or ran out of gas (unknown). One sweep
answers every question this module gets asked up to length L: vote counts
per output at each n, the Kraft sum, prefix-freeness, and shortest found
programs per output.

Counting convention at length n: a halted leaf (code, e) is one member of
the vote set for its output when len(code) + len(e) == n. A gas leaf with
len(code) + len(e) <= n leaves 2^(n - len(code) - len(e)) completions of
length n unresolved; resolved counts are certified lower bounds and
count + unresolved is the matching upper bound at this gas.
"""

import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import config
from .combinators import COPY, PAD_READER, const_program
from .errors import BudgetExceeded, WitnessMissing
from .machine import Gas, Status, run, run_term, is_valid_run
from .terms import (App, Lam, Var, bits_to_list, decode_term,
                    encode_term, is_closed)

HALT = "halt"
BAD = "bad"          # provably never a bit list (or wrong shape)
GAS = "gas"          # out of gas, genuinely unknown
DIVERGED = "divg"    # out of gas with a recurrence proof: resolved invalid
FRONTIER = "front"   # still demanding at the sweep depth limit


def _min_size(depth):
    return 2 if depth >= 1 else 4


@lru_cache(maxsize=None)
def count_closed(n, depth=0):
    """Closed-term codes of exactly n bits under `depth` binders (DP)."""
    if n < 2:
        return 0
    total = 0
    if 1 <= n - 1 <= depth:
        total += 1
    total += count_closed(n - 2, depth + 1)
    for sf in range(2, n - 3):
        left = count_closed(sf, depth)
        if left:
            total += left * count_closed(n - 2 - sf, depth)
    return total


def _gen(depth, lo, hi):
    """Yield (term, size) for codes of size in [lo, hi], in code-lex order."""
    sub_min = _min_size(depth + 1)
    if hi >= 2 + sub_min:
        for body, s in _gen(depth + 1, max(lo - 2, sub_min), hi - 2):
            yield Lam(body), s + 2
    here_min = _min_size(depth)
    if hi >= 2 + 2 * here_min:
        for f, sf in _gen(depth, here_min, hi - 2 - here_min):
            lo_a = max(lo - 2 - sf, here_min)
            hi_a = hi - 2 - sf
            if lo_a <= hi_a:
                for a, sa in _gen(depth, lo_a, hi_a):
                    yield App(f, a), 2 + sf + sa
    for i in range(1, depth + 1):
        if lo <= i + 1 <= hi:
            yield Var(i), i + 1


def enumerate_codes(max_len):
    """Every closed-term code of length <= max_len, exactly once, in
    length-then-lexicographic order."""
    if max_len > config.ENUM_CEILING:
        raise ValueError(f"max_len above ceiling {config.ENUM_CEILING}")
    for n in range(4, max_len + 1):
        for term, _ in _gen(0, n, n):
            yield encode_term(term), term


class _Budget:
    def __init__(self, cap):
        self.cap = cap
        self.used = 0

    def spend(self, k=1):
        self.used += k
        if self.used > self.cap:
            raise BudgetExceeded(f"demand-tree node cap {self.cap} exceeded")


def _explore_code(term, z_term, z, depth_limit, gas, budget):
    """Demand-tree DFS for one code; returns leaf records (e, kind, x)."""
    leaves = []
    stack = [""]
    while stack:
        e = stack.pop()
        budget.spend()
        out = run_term(term, z, e, gas=gas, z_term=z_term)
        status = out.status
        if status == Status.NEEDS_MORE_INPUT:
            if len(e) < depth_limit:
                stack.append(e + "1")
                stack.append(e + "0")
            else:
                leaves.append((e, FRONTIER, None))
        elif status == Status.HALTED:
            leaves.append((e, HALT, out.output))
        elif status == Status.OUT_OF_GAS:
            leaves.append((e, DIVERGED if out.divergence_proven else GAS,
                           None))
        else:
            leaves.append((e, BAD, None))
    return leaves


@dataclass
class SweepTable:
    """Leaf records for every closed code of length <= max_len."""
    max_len: int
    z: str
    gas_steps: int
    entries: list = field(default_factory=list)  # (code, leaves)
    restricted: bool = False

    def valid_programs(self):
        """Yield (program_bits, output) over halted leaves."""
        for code, leaves in self.entries:
            for e, kind, x in leaves:
                if kind == HALT:
                    yield code + e, x

    def kraft_sum(self, max_len=None):
        """Exact sum of 2^-|p| over valid programs of length <= max_len."""
        cap = max_len if max_len is not None else self.max_len
        total = Fraction(0)
        for program, _ in self.valid_programs():
            if len(program) <= cap:
                total += Fraction(1, 2 ** len(program))
        return total

    def prefix_violations(self, max_len=None):
        cap = max_len if max_len is not None else self.max_len
        programs = sorted(p for p, _ in self.valid_programs()
                          if len(p) <= cap)
        bad = []
        for a, b in zip(programs, programs[1:]):
            if b.startswith(a):
                bad.append((a, b))
        return bad

    def shortest_by_output(self):
        """Map output -> (program, code_bits) of its first valid program in
        length-then-lex order."""
        best = {}
        ordered = []
        for code, leaves in self.entries:
            for e, kind, x in leaves:
                if kind == HALT:
                    ordered.append((len(code) + len(e), code + e, x,
                                    len(code)))
        ordered.sort(key=lambda r: (r[0], r[1]))
        for _, program, x, cb in ordered:
            best.setdefault(x, (program, cb))
        return best

    def census(self, n):
        counts = {}
        unresolved = 0
        invalid = 0
        halted_leaves = 0
        gas_leaves = 0
        for code, leaves in self.entries:
            c = len(code)
            if c > n:
                continue
            for e, kind, x in leaves:
                total = c + len(e)
                if kind == HALT:
                    if total == n:
                        halted_leaves += 1
                        key = (x if len(x) <= config.MAX_TRACKED_OUTPUT
                               else config.OVERFLOW_KEY)
                        counts[key] = counts.get(key, 0) + 1
                    elif total < n:
                        invalid += 2 ** (n - total)  # unread completions
                elif kind == GAS:
                    if total <= n:
                        gas_leaves += 1
                        unresolved += 2 ** (n - total)
                elif kind in (BAD, DIVERGED):
                    if total <= n:
                        invalid += 2 ** (n - total)
                # FRONTIER leaves sit at depth max_len - len(code); their
                # completions of length n <= max_len demanded past n: invalid
                elif total <= n:
                    invalid += 2 ** (n - total)
        return VoteCensus(n=n, z=self.z, counts=counts,
                          unresolved=unresolved, invalid=invalid,
                          gas_steps=self.gas_steps,
                          halted_leaves=halted_leaves, gas_leaves=gas_leaves,
                          restricted=self.restricted)


@dataclass
class VoteCensus:
    """Vote-set tallies at one exact program length."""
    n: int
    z: str
    counts: dict
    unresolved: int
    invalid: int
    gas_steps: int
    halted_leaves: int = 0
    gas_leaves: int = 0
    restricted: bool = False

    def count_lo(self, x):
        return self.counts.get(x, 0)

    def count_hi(self, x):
        return self.counts.get(x, 0) + self.unresolved

    def total_resolved(self):
        return sum(self.counts.values())


def _checkpoint_write(path, header, done_entries):
    payload = dict(header)
    payload["entries"] = [
        [code, [[e, kind, x] for e, kind, x in leaves]]
        for code, leaves in done_entries]
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def _checkpoint_read(path, header):
    if not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    for key, val in header.items():
        if payload.get(key) != val:
            return None
    return [(code, [tuple(leaf) for leaf in leaves])
            for code, leaves in payload["entries"]]


def sweep(max_len, z="", gas=None, node_cap=None, codes=None,
          checkpoint=None, checkpoint_every=5000):
    """Explore every closed code of length <= max_len against z.

    `codes` restricts the sweep to an explicit code shard (an iterable of
    code bit strings); counts from a restricted sweep are still certified
    lower bounds, but its upper bounds and Kraft/prefix checks only speak
    for the shard.
    """
    gas = gas or Gas()
    budget = _Budget(node_cap or config.NODE_CAP)
    z_term = bits_to_list(z)
    header = {"version": config.CHECKPOINT_VERSION, "max_len": max_len,
              "z": z, "gas": gas.max_steps}

    if codes is None:
        source = enumerate_codes(max_len)
        restricted = False
    else:
        pairs = []
        for c in codes:
            term, consumed = decode_term(c)
            if consumed != len(c) or not is_closed(term):
                raise ValueError(f"not a closed code: {c}")
            pairs.append((c, term))
        source = iter(pairs)
        restricted = True

    entries = []
    skip = 0
    if checkpoint and not restricted:
        prior = _checkpoint_read(checkpoint, header)
        if prior is not None:
            entries = prior
            skip = len(prior)

    for idx, (code, term) in enumerate(source):
        if idx < skip:
            continue
        depth_limit = max_len - len(code)
        leaves = _explore_code(term, z_term, z, depth_limit, gas, budget)
        entries.append((code, leaves))
        if checkpoint and not restricted and (idx + 1) % checkpoint_every == 0:
            _checkpoint_write(checkpoint, header, entries)

    if checkpoint and not restricted:
        _checkpoint_write(checkpoint, header, entries)
    return SweepTable(max_len=max_len, z=z, gas_steps=gas.max_steps,
                      entries=entries, restricted=restricted)


_SWEEP_CACHE = {}


def cached_sweep(max_len, z="", gas=None, node_cap=None):
    """Sweep with reuse: a stored table at larger max_len answers smaller."""
    gas = gas or Gas()
    key = (z, gas.max_steps)
    hit = _SWEEP_CACHE.get(key)
    if hit is not None and hit.max_len >= max_len:
        return hit
    table = sweep(max_len, z, gas, node_cap)
    _SWEEP_CACHE[key] = table
    return table


def vote_census(n, z="", gas=None, node_cap=None, codes=None):
    """Exact vote-set census at program length n (Def.-2 tallies)."""
    if codes is None and n > config.CENSUS_CEILING:
        raise ValueError(
            f"census length {n} above ceiling {config.CENSUS_CEILING}; "
            "pass an explicit code shard for certified lower bounds")
    if codes is not None:
        table = sweep(n, z, gas, node_cap, codes=codes)
    else:
        table = cached_sweep(n, z, gas, node_cap)
    return table.census(n)


def spot_check(table, n, sample=100, seed=0):
    """Re-run counted programs standalone and confirm their census entry.

    Census soundness: every halted leaf at length n, re-executed via run,
    must reproduce (halted, same output, bits_read == n - code bits).
    """
    members = [(code + e, x, len(code))
               for code, leaves in table.entries
               for e, kind, x in leaves
               if kind == HALT and len(code) + len(e) == n]
    rng = random.Random(seed)
    if len(members) > sample:
        members = rng.sample(members, sample)
    gas = Gas(table.gas_steps)
    for program, x, code_bits in members:
        out = run(program, table.z, gas)
        if not (out.status == Status.HALTED and out.output == x
                and out.bits_read == n - code_bits
                and out.code_bits == code_bits):
            return False
    return True


def naive_census(n, z="", gas=None):
    """Oracle census: run all 2^n bit strings and keep the valid ones."""
    counts = {}
    invalid = 0
    unresolved = 0
    for i in range(2 ** n):
        p = format(i, f"0{n}b") if n else ""
        out = run(p, z, gas)
        if is_valid_run(out, n - out.code_bits):
            key = (out.output if len(out.output) <= config.MAX_TRACKED_OUTPUT
                   else config.OVERFLOW_KEY)
            counts[key] = counts.get(key, 0) + 1
        elif out.status == Status.OUT_OF_GAS and not out.divergence_proven:
            unresolved += 1
        else:
            invalid += 1
    return VoteCensus(n=n, z=z, counts=counts, unresolved=unresolved,
                      invalid=invalid,
                      gas_steps=(gas or Gas()).max_steps)


@dataclass(frozen=True)
class PaddedProgram:
    """The vote-multiplicity construction: r ++ chi ++ eta ++ g.

    r is the fixed pad-reader code, chi the witness code for x given z,
    eta the unary pad count, and g any pad of that length; the program
    output never depends on g's contents.
    """
    r: str
    chi: str
    eta: str
    g: str
    x: str
    z: str

    @property
    def program(self):
        return self.r + self.chi + self.eta + self.g

    @property
    def n(self):
        return len(self.program)

    def all_programs(self):
        k = len(self.g)
        for i in range(2 ** k):
            pad = format(i, f"0{k}b") if k else ""
            yield self.r + self.chi + self.eta + pad


def build_padded(x, z, pad_len, chi_term=None, gas=None):
    """Assemble the 2^pad_len-member program family for x given z."""
    if chi_term is None:
        chi_term = COPY if z == x else const_program(x)
    probe = run_term(chi_term, z, "", gas=gas)
    if not (probe.status == Status.HALTED and probe.output == x
            and probe.bits_read == 0):
        raise WitnessMissing(
            "chi must be a pure-code witness for x given z; bake data "
            "bits first (combinators.bake_data)")
    r = "01" + encode_term(PAD_READER)
    chi = encode_term(chi_term)
    eta = "1" * pad_len + "0"
    return PaddedProgram(r=r, chi=chi, eta=eta, g="0" * pad_len, x=x, z=z)


@dataclass
class MonteCarloEstimate:
    """Fair-coin sampling of the universal machine's output distribution."""
    samples: int
    z: str
    seed: int
    gas_steps: int
    hits: dict
    invalid: int
    gas_outs: int

    def m_hat(self, x):
        return self.hits.get(x, 0) / self.samples

    def stderr(self, x):
        p = self.m_hat(x)
        return (p * (1 - p) / self.samples) ** 0.5

    def outputs(self):
        return sorted(self.hits, key=lambda x: (-self.hits[x], x))


_TRIAL_UNKNOWN = 0
_TRIAL_INTERNAL = 1


class _TrieNode:
    __slots__ = ("state", "zero", "one")

    def __init__(self):
        self.state = _TRIAL_UNKNOWN
        self.zero = None
        self.one = None


def monte_carlo_m(n_samples, z="", gas=None, seed=config.DEFAULT_SEED):
    """Estimate m(x) by N fair-coin trials of the universal machine.

    Demand prefixes are memoized in a trie, so repeated trials down common
    prefixes cost one machine run in total. Deterministic given the seed.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    gas = gas or Gas()
    rng = random.Random(seed)
    root = _TrieNode()
    hits = {}
    invalid = 0
    gas_outs = 0

    def resolve(node, prefix):
        def oracle(pos):
            if pos >= len(prefix):
                from .machine import _NeedInputSignal
                raise _NeedInputSignal(pos)
            return prefix[pos]
        out, consumed, ok_parse = _universal_scripted(oracle, z, gas)
        if out.status == Status.NEEDS_MORE_INPUT:
            node.state = _TRIAL_INTERNAL
        else:
            node.state = (out.status, out.output, out.divergence_proven)

    for _ in range(n_samples):
        node = root
        prefix = []
        while True:
            if node.state == _TRIAL_UNKNOWN:
                resolve(node, prefix)
                continue
            if node.state == _TRIAL_INTERNAL:
                bit = "1" if rng.getrandbits(1) else "0"
                prefix.append(bit)
                if bit == "0":
                    if node.zero is None:
                        node.zero = _TrieNode()
                    node = node.zero
                else:
                    if node.one is None:
                        node.one = _TrieNode()
                    node = node.one
                continue
            status, output, proven = node.state
            if status == Status.HALTED:
                key = (output if len(output) <= config.MAX_TRACKED_OUTPUT
                       else config.OVERFLOW_KEY)
                hits[key] = hits.get(key, 0) + 1
            elif status == Status.OUT_OF_GAS and not proven:
                gas_outs += 1
            else:
                invalid += 1
            break

    return MonteCarloEstimate(samples=n_samples, z=z, seed=seed,
                              gas_steps=gas.max_steps, hits=hits,
                              invalid=invalid, gas_outs=gas_outs)


def _universal_scripted(oracle, z, gas):
    from .machine import run_universal, _NeedInputSignal, RunOutcome
    try:
        return run_universal(oracle, z, gas)
    except _NeedInputSignal:
        return (RunOutcome(Status.NEEDS_MORE_INPUT), "", True)
