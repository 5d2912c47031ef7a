import math

import pytest

from razorlab.errors import (CycleDetected, DuplicateName, InvalidPrecision,
                             UnknownDep)
from razorlab.ledger import (ConstantSpec, Definition, ModelManifest,
                             Registry, constant_cost, definition_from_term,
                             model_complexity, rank, ranking_csv_rows,
                             ranking_table, to_nats)
from razorlab.terms import Lam, Var


def calculus_registry():
    reg = Registry()
    reg.register(Definition("lim", (), None, 40, "audited: analysis text"))
    reg.register(Definition("integral", ("lim",), None, 60, "audited"))
    reg.register(Definition("derivative", ("lim",), None, 50, "audited"))
    return reg


def test_register_and_deps():
    reg = calculus_registry()
    assert "lim" in reg and len(reg) == 3
    with pytest.raises(DuplicateName):
        reg.register(Definition("lim", (), None, 10, "again"))
    with pytest.raises(UnknownDep):
        reg.register(Definition("measure", ("sigma-algebra",), None, 9, "x"))
    with pytest.raises(CycleDetected):
        reg.register(Definition("loop", ("loop",), None, 5, "x"))


def test_definition_validation():
    with pytest.raises(ValueError):
        Definition("bad", (), None, None).validate()
    with pytest.raises(ValueError):
        Definition("bad", (), None, 12, "").validate()  # no provenance
    term_def = definition_from_term("id", Lam(Var(1)), provenance="demo")
    term_def.validate()
    assert term_def.cost_bits == 4


def test_shared_definition_counted_once():
    reg = calculus_registry()
    manifest = ModelManifest(
        name="m", problem_id="p",
        referenced_defs=(("integral", 1), ("derivative", 1)), glue_bits=5)
    b = model_complexity(manifest, reg)
    assert set(b.closure_names) == {"lim", "integral", "derivative"}
    assert b.definition_bits == 150          # lim once, not twice
    assert b.reference_bits == 2 * reg.reference_cost_bits()
    assert b.total_bits == 150 + b.reference_bits + 5


def test_empty_manifest_costs_glue():
    reg = calculus_registry()
    manifest = ModelManifest(name="m", problem_id="p", glue_bits=9)
    assert model_complexity(manifest, reg).total_bits == 9


def test_diamond_dependency_counted_once():
    reg = Registry()
    reg.register(Definition("D", (), None, 11, "x"))
    reg.register(Definition("B", ("D",), None, 13, "x"))
    reg.register(Definition("C", ("D",), None, 17, "x"))
    reg.register(Definition("A", ("B", "C"), None, 19, "x"))
    manifest = ModelManifest(name="m", problem_id="p",
                             referenced_defs=(("A", 1),))
    b = model_complexity(manifest, reg)
    assert b.definition_bits == 11 + 13 + 17 + 19


def test_dedup_idempotence():
    reg = calculus_registry()
    totals = []
    for k in (1, 2, 5):
        manifest = ModelManifest(name="m", problem_id="p",
                                 referenced_defs=(("integral", k),))
        totals.append(model_complexity(manifest, reg).total_bits)
    ref = reg.reference_cost_bits()
    assert totals[1] - totals[0] == ref
    assert totals[2] - totals[0] == 4 * ref


def test_constant_cost():
    # sign + 8-bit exponent + significand
    assert constant_cost(1.0, significand_bits=1) == 10
    assert constant_cost(3.14159, decimal_digits=7) == 1 + 8 + 24
    costs = [constant_cost(1.0, significand_bits=b) for b in range(1, 30)]
    assert costs == sorted(costs)
    with pytest.raises(InvalidPrecision):
        constant_cost(1.0)
    with pytest.raises(InvalidPrecision):
        constant_cost(1.0, significand_bits=2, decimal_digits=2)
    with pytest.raises(InvalidPrecision):
        constant_cost(1.0, decimal_digits=0)


def test_to_nats():
    assert to_nats(0) == 0
    assert abs(to_nats(1) - 0.6931) < 1e-4
    assert abs(to_nats(8) - 5.5452) < 1e-4


def _manifest(name, glue):
    return ModelManifest(name=name, problem_id="p", glue_bits=glue)


def test_rank_single_submission():
    reg = Registry()
    ranking = rank("p", reg, [(_manifest("only", 50), 0.0)])
    assert len(ranking.entries) == 1
    assert ranking.entries[0].model == "only"


def test_rank_simpler_first_with_odds_note():
    reg = Registry()
    ranking = rank("p", reg, [(_manifest("big", 130), 0.0),
                              (_manifest("small", 100), 0.0)])
    assert [e.model for e in ranking.entries] == ["small", "big"]
    assert ranking.entries[0].odds_note == "2^30 odds over next"


def test_rank_total_decides_not_complexity():
    reg = Registry()
    ranking = rank("p", reg, [(_manifest("simple", 10), 25.0),
                              (_manifest("precise", 30), 0.0)])
    assert [e.model for e in ranking.entries] == ["precise", "simple"]


def test_rank_order_independent_of_submission_order():
    reg = Registry()
    subs = [(_manifest("a", 30), 1.0), (_manifest("b", 20), 11.0),
            (_manifest("c", 31), 0.0)]
    r1 = rank("p", reg, subs)
    r2 = rank("p", reg, list(reversed(subs)))
    assert r1 == r2


def test_rank_rejects_wrong_problem():
    reg = Registry()
    bad = ModelManifest(name="m", problem_id="other")
    with pytest.raises(ValueError):
        rank("p", reg, [(bad, 0.0)])


def test_registry_round_trip_is_byte_exact(tmp_path):
    reg = calculus_registry()
    path = tmp_path / "registry.json"
    reg.save(path)
    loaded = Registry.load(path)
    assert loaded.to_json() == reg.to_json()
    loaded.save(tmp_path / "second.json")
    assert (tmp_path / "second.json").read_bytes() == path.read_bytes()
    # and the ranking built from the loaded registry matches bit for bit
    manifest = ModelManifest(name="m", problem_id="p",
                             referenced_defs=(("integral", 2),))
    r1 = rank("p", reg, [(manifest, 3.0)])
    r2 = rank("p", loaded, [(manifest, 3.0)])
    assert ranking_csv_rows(r1) == ranking_csv_rows(r2)


def test_ranking_table_renders():
    reg = calculus_registry()
    manifest = ModelManifest(name="calculus", problem_id="p",
                             referenced_defs=(("integral", 1),))
    table = ranking_table(rank("p", reg, [(manifest, 2.0)]))
    assert "calculus" in table and "total_bits" in table


def test_constants_in_manifest():
    reg = Registry()
    manifest = ModelManifest(
        name="m", problem_id="p",
        constants=(ConstantSpec(2.718, decimal_digits=3),
                   ConstantSpec(1.0, significand_bits=1)),
        glue_bits=0)
    b = model_complexity(manifest, reg)
    assert b.constant_bits == (1 + 8 + math.ceil(3 * math.log2(10))) + 10
