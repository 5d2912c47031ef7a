"""Model-complexity ledger: a registry of costed definitions, model
manifests that reference them, and per-problem rankings.

A definition carries either a term payload (cost = its code length) or an
externally audited bit cost with a mandatory provenance note. A model's
total is the cost of the transitive closure of everything it references,
each definition counted once no matter how many manifests pull it in,
plus a small per-use reference cost, plus numeric-constant costs, plus
the model-specific glue.

The registry persists as canonical JSON (sorted keys, fixed separators),
so save/load round-trips are byte-exact and rankings reproduce bit for
bit.
"""

import json
import math
from dataclasses import dataclass

from .errors import (CycleDetected, DuplicateName, InvalidPrecision,
                     UnknownDep)
from .terms import encode_term, decode_term
from .bits import bits_to_hex, hex_to_bits

LN2 = math.log(2)

# frozen numeric-constant layout: sign bit + 8 exponent bits + significand
SIGN_BITS = 1
EXPONENT_BITS = 8


def to_nats(bits):
    return bits * LN2


def constant_cost(value, significand_bits=None, decimal_digits=None):
    """Bit cost of a numeric constant under the frozen layout.

    Precision comes either as explicit significand bits or as equivalent
    decimal digits (converted by ceil(d * log2 10)).
    """
    if (significand_bits is None) == (decimal_digits is None):
        raise InvalidPrecision(
            "give exactly one of significand_bits / decimal_digits")
    if decimal_digits is not None:
        if decimal_digits < 1:
            raise InvalidPrecision("decimal digits must be positive")
        significand_bits = math.ceil(decimal_digits * math.log2(10))
    if significand_bits < 1:
        raise InvalidPrecision("significand bits must be positive")
    del value  # recorded by the caller; the layout only prices precision
    return SIGN_BITS + EXPONENT_BITS + significand_bits


@dataclass(frozen=True)
class Definition:
    name: str
    deps: tuple = ()
    payload_code: str | None = None   # term code bits, when formalized
    audited_cost: int | None = None   # else an externally audited cost
    provenance: str = ""

    @property
    def cost_bits(self):
        if self.payload_code is not None:
            return len(self.payload_code)
        return self.audited_cost

    def validate(self):
        if (self.payload_code is None) == (self.audited_cost is None):
            raise ValueError(
                f"{self.name}: exactly one of payload/audited cost")
        if self.payload_code is not None:
            term, consumed = decode_term(self.payload_code)
            if consumed != len(self.payload_code):
                raise ValueError(f"{self.name}: payload is not one code")
        else:
            if self.audited_cost <= 0:
                raise ValueError(f"{self.name}: cost must be positive")
            if not self.provenance:
                raise ValueError(
                    f"{self.name}: audited costs need a provenance note")


@dataclass(frozen=True)
class ConstantSpec:
    value: float
    significand_bits: int | None = None
    decimal_digits: int | None = None

    def cost(self):
        return constant_cost(self.value, self.significand_bits,
                             self.decimal_digits)


@dataclass(frozen=True)
class ModelManifest:
    name: str
    problem_id: str
    referenced_defs: tuple = ()       # (name, use_count) pairs
    constants: tuple = ()             # ConstantSpec entries
    glue_bits: int = 0
    notes: str = ""


class Registry:
    def __init__(self):
        self._defs = {}

    def __contains__(self, name):
        return name in self._defs

    def __len__(self):
        return len(self._defs)

    def get(self, name):
        if name not in self._defs:
            raise UnknownDep(name)
        return self._defs[name]

    def names(self):
        return sorted(self._defs)

    def register(self, definition):
        definition.validate()
        if definition.name in self._defs:
            raise DuplicateName(definition.name)
        for dep in definition.deps:
            if dep == definition.name:
                raise CycleDetected(f"{definition.name} depends on itself")
            if dep not in self._defs:
                raise UnknownDep(dep)
        # deps resolve against already-registered names only, so the graph
        # stays acyclic by construction; check anyway for belt and braces
        self._defs[definition.name] = definition
        if self._has_cycle():
            del self._defs[definition.name]
            raise CycleDetected(definition.name)
        return self

    def _has_cycle(self):
        seen, done = set(), set()

        def visit(name):
            if name in done:
                return False
            if name in seen:
                return True
            seen.add(name)
            for dep in self._defs[name].deps:
                if dep in self._defs and visit(dep):
                    return True
            seen.discard(name)
            done.add(name)
            return False

        return any(visit(n) for n in list(self._defs))

    def closure(self, names):
        """Transitive dependency closure, each definition once."""
        out = set()
        stack = list(names)
        while stack:
            name = stack.pop()
            if name in out:
                continue
            out.add(name)
            stack.extend(self.get(name).deps)
        return out

    def reference_cost_bits(self):
        """Per-use cost of citing a registry entry: one registry index."""
        return math.ceil(math.log2(len(self._defs) + 1))

    # persistence: canonical JSON, stable key order

    def to_json(self):
        defs = {}
        for name in self.names():
            d = self._defs[name]
            defs[name] = {
                "deps": sorted(d.deps),
                "payload_hex": (None if d.payload_code is None
                                else bits_to_hex(d.payload_code)),
                "audited_cost": d.audited_cost,
                "provenance": d.provenance,
            }
        return json.dumps({"version": 1, "definitions": defs},
                          sort_keys=True, separators=(",", ":"),
                          ensure_ascii=False)

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        reg = cls()
        pending = dict(payload["definitions"])
        # insert in dependency order
        while pending:
            progressed = False
            for name in sorted(pending):
                rec = pending[name]
                if all(dep in reg._defs for dep in rec["deps"]):
                    reg.register(Definition(
                        name=name, deps=tuple(sorted(rec["deps"])),
                        payload_code=(None if rec["payload_hex"] is None
                                      else hex_to_bits(rec["payload_hex"])),
                        audited_cost=rec["audited_cost"],
                        provenance=rec["provenance"]))
                    del pending[name]
                    progressed = True
                    break
            if not progressed:
                raise CycleDetected("unresolvable dependencies in file")
        return reg

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


@dataclass(frozen=True)
class ComplexityBreakdown:
    model: str
    definition_bits: int
    reference_bits: int
    constant_bits: int
    glue_bits: int
    closure_names: tuple
    total_bits: int


def model_complexity(manifest, registry):
    """Itemized total complexity with shared definitions counted once."""
    direct = [name for name, _ in manifest.referenced_defs]
    for name in direct:
        registry.get(name)
    closure = sorted(registry.closure(direct))
    definition_bits = sum(registry.get(n).cost_bits for n in closure)
    ref_cost = registry.reference_cost_bits()
    uses = sum(count for _, count in manifest.referenced_defs)
    if any(count < 1 for _, count in manifest.referenced_defs):
        raise ValueError("reference counts must be >= 1")
    reference_bits = uses * ref_cost
    constant_bits = sum(spec.cost() for spec in manifest.constants)
    total = (definition_bits + reference_bits + constant_bits
             + manifest.glue_bits)
    return ComplexityBreakdown(
        model=manifest.name, definition_bits=definition_bits,
        reference_bits=reference_bits, constant_bits=constant_bits,
        glue_bits=manifest.glue_bits, closure_names=tuple(closure),
        total_bits=total)


@dataclass(frozen=True)
class RankingEntry:
    model: str
    complexity_bits: int
    empirical_loss_bits: float
    total_bits: float
    odds_note: str = ""


@dataclass(frozen=True)
class Ranking:
    problem_id: str
    entries: tuple


def rank(problem_id, registry, submissions):
    """Order submissions by total bits (complexity + empirical loss).

    `submissions` is a list of (manifest, empirical_loss_bits). Ties break
    by complexity then name; the leader gets an odds note against the
    runner-up.
    """
    rows = []
    for manifest, loss in submissions:
        if manifest.problem_id != problem_id:
            raise ValueError(
                f"{manifest.name} targets {manifest.problem_id!r}, "
                f"not {problem_id!r}")
        breakdown = model_complexity(manifest, registry)
        rows.append((manifest.name, breakdown.total_bits, float(loss)))
    rows.sort(key=lambda r: (r[1] + r[2], r[1], r[0]))
    entries = []
    for i, (name, comp, loss) in enumerate(rows):
        note = ""
        if i + 1 < len(rows):
            gap = (rows[i + 1][1] + rows[i + 1][2]) - (comp + loss)
            if gap > 0 and gap == int(gap):
                note = f"2^{int(gap)} odds over next"
            elif gap > 0:
                note = f"2^{gap:.2f} odds over next"
        entries.append(RankingEntry(model=name, complexity_bits=comp,
                                    empirical_loss_bits=loss,
                                    total_bits=comp + loss, odds_note=note))
    return Ranking(problem_id=problem_id, entries=tuple(entries))


def ranking_csv_rows(ranking):
    rows = [["problem_id", "rank", "model", "complexity_bits",
             "empirical_loss_bits", "total_bits", "odds_note"]]
    for i, e in enumerate(ranking.entries, 1):
        rows.append([ranking.problem_id, str(i), e.model,
                     str(e.complexity_bits), f"{e.empirical_loss_bits:g}",
                     f"{e.total_bits:g}", e.odds_note])
    return rows


def ranking_table(ranking):
    rows = ranking_csv_rows(ranking)
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for r in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths))
                     .rstrip())
    return "\n".join(lines)


def definition_from_term(name, term, deps=(), provenance=""):
    return Definition(name=name, deps=tuple(deps),
                      payload_code=encode_term(term),
                      provenance=provenance)
