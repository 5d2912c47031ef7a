"""Command-line entry point.

Every subcommand echoes its effective configuration as a leading `#`
comment line on each output stream, so any run can be reproduced from its
own output. CSV output is frozen: header row, LF newlines, '.' decimals.

Exit codes: 0 ok, 1 internal error, 2 usage, 3 search exhausted
(NotFound), 4 zero votes in a census, 5 witness missing, 6 node budget
exceeded.
"""

import argparse
import io
import json
import os
import sys

from . import config
from .bits import (bits_to_hex, check_bits, read_bits, write_bits)
from .census import enumerate_codes, monte_carlo_m, vote_census
from .combinators import measured_constants
from .complexity import (best_witness, k_prime, to_csv_rows,
                         use_witness_store)
from .errors import (BudgetExceeded, NotFound, RazorlabError, WitnessMissing,
                     ZeroVotes)
from .ledger import (ConstantSpec, Definition, ModelManifest, Registry,
                     model_complexity, rank, ranking_csv_rows,
                     ranking_table, to_nats)
from .machine import Gas, run, is_valid_run
from .predictor import (democratic_odds, odds, regularized_loss,
                        stochastic_eval)
from .terms import decode_term, encode_term, parse_term, render_term

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NOTFOUND = 3
EXIT_ZEROVOTES = 4
EXIT_WITNESS = 5
EXIT_BUDGET = 6


def _echo(command, **params):
    parts = [f"{k}={params[k]}" for k in sorted(params)]
    return f"# razorlab {command} " + " ".join(parts)


def _csv_text(echo_line, rows):
    buf = io.StringIO()
    buf.write(echo_line + "\n")
    import csv as _csv
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {out_path}")
    else:
        sys.stdout.write(text)


def _maybe_plot(kind, csv_text, plot_path):
    if not plot_path:
        return
    import tempfile
    from . import report
    with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False,
                                     encoding="utf-8") as fh:
        fh.write(csv_text)
        tmp = fh.name
    try:
        report.render(kind, tmp, plot_path)
        print(f"wrote {plot_path}")
    finally:
        os.unlink(tmp)


def _read_program(value):
    """A program argument: literal bits or @path (text) or @@path (packed)."""
    if value.startswith("@@"):
        return read_bits(value[2:])
    if value.startswith("@"):
        with open(value[1:], encoding="utf-8") as fh:
            return check_bits(fh.read().strip())
    return check_bits(value)


def census_csv_text(n, z, gas, workers=1, seed="-"):
    # workers is a scheduling hint only; it stays out of the echo so runs
    # with different worker counts produce byte-identical streams
    del workers
    census = vote_census(n, z, gas)
    rows = [["n", "x", "count_lo", "count_hi", "unresolved", "gas", "seed"]]
    for x in sorted(census.counts):
        rows.append([str(n), x, str(census.count_lo(x)),
                     str(census.count_hi(x)), str(census.unresolved),
                     str(census.gas_steps), str(seed)])
    echo = _echo("census", n=n, z=z or "''", gas=gas.max_steps)
    return _csv_text(echo, rows)


def mc_csv_text(samples, z, gas, seed, workers=1, with_k=False,
                k_max_len=config.SEARCH_CEILING):
    del workers  # scheduling hint; see census_csv_text
    mc = monte_carlo_m(samples, z, gas, seed)
    header = ["x", "hits", "m_hat", "stderr", "samples", "seed", "gas"]
    if with_k:
        header.append("k_prime")
    rows = [header]
    for x in mc.outputs():
        row = [x, str(mc.hits[x]), f"{mc.m_hat(x):.10g}",
               f"{mc.stderr(x):.6g}", str(samples), str(seed),
               str(gas.max_steps)]
        if with_k:
            try:
                row.append(str(k_prime(x, z, k_max_len, gas).value_bits))
            except NotFound:
                row.append("")
        rows.append(row)
    rows.append(["(invalid)", str(mc.invalid), "", "", str(samples),
                 str(seed), str(gas.max_steps)] + ([""] if with_k else []))
    rows.append(["(out-of-gas)", str(mc.gas_outs), "", "", str(samples),
                 str(seed), str(gas.max_steps)] + ([""] if with_k else []))
    echo = _echo("mc", samples=samples, z=z or "''", gas=gas.max_steps,
                 seed=seed)
    return _csv_text(echo, rows)


def _registry_path(args):
    path = args.registry or os.environ.get(config.REGISTRY_ENV)
    if not path:
        raise RazorlabError(
            f"no registry path: pass --registry or set {config.REGISTRY_ENV}")
    return path


def _load_registry(path):
    if os.path.exists(path):
        return Registry.load(path)
    return Registry()


def _manifest_from_dict(d):
    constants = tuple(
        ConstantSpec(value=c.get("value", 0.0),
                     significand_bits=c.get("significand_bits"),
                     decimal_digits=c.get("decimal_digits"))
        for c in d.get("constants", ()))
    return ModelManifest(
        name=d["name"], problem_id=d["problem_id"],
        referenced_defs=tuple((r[0], int(r[1]))
                              for r in d.get("refs", ())),
        constants=constants, glue_bits=int(d.get("glue_bits", 0)),
        notes=d.get("notes", ""))


def _cmd_encode(args):
    if args.text:
        source = args.text
    else:
        with open(args.file, encoding="utf-8") as fh:
            source = fh.read()
    term = parse_term(source)
    bits = encode_term(term)
    print(_echo("encode", length=len(bits)))
    print(bits)
    if args.out:
        write_bits(args.out, bits)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_decode(args):
    bits = _read_program(args.bits)
    term, consumed = decode_term(bits)
    print(_echo("decode", consumed=consumed, total=len(bits)))
    print(render_term(term))
    if consumed < len(bits):
        print(f"# {len(bits) - consumed} bits unconsumed: {bits[consumed:]}")
    return EXIT_OK


def _cmd_run(args):
    p = _read_program(args.program)
    gas = Gas(args.gas)
    out = run(p, args.z, gas)
    print(_echo("run", gas=gas.max_steps, program_bits=len(p),
                z=args.z or "''"))
    print(f"status: {out.status}")
    if out.output is not None:
        print(f"output: {out.output or 'ε'}")
    print(f"bits_read: {out.bits_read}")
    print(f"steps: {out.steps}")
    print(f"code_bits: {out.code_bits}")
    valid = is_valid_run(out, len(p) - out.code_bits)
    print(f"valid_self_delimiting: {valid}")
    if out.divergence_proven:
        print("divergence_proven: true")
    return EXIT_OK


def _cmd_enumerate(args):
    rows = [["length", "code"]]
    for code, _ in enumerate_codes(args.max_len):
        rows.append([str(len(code)), code])
    text = _csv_text(_echo("enumerate", max_len=args.max_len), rows)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_census(args):
    gas = Gas(args.gas)
    text = census_csv_text(args.n, args.z, gas, workers=args.workers)
    _emit(text, args.out)
    _maybe_plot("census", text, args.plot)
    return EXIT_OK


def _cmd_mc(args):
    gas = Gas(args.gas)
    text = mc_csv_text(args.samples, args.z, gas, args.seed,
                       workers=args.workers, with_k=args.with_k,
                       k_max_len=args.max_len)
    _emit(text, args.out)
    _maybe_plot("mc", text, args.plot)
    return EXIT_OK


def _cmd_ksearch(args):
    gas = Gas(args.gas)
    if args.witness_store:
        use_witness_store(args.witness_store)
    x = check_bits(args.x)
    if args.search_only:
        est = k_prime(x, args.z, args.max_len, gas)
    else:
        est = best_witness(x, args.z, args.max_len, gas)
    echo = _echo("ksearch", x=x or "''", z=args.z or "''",
                 max_len=args.max_len, gas=gas.max_steps,
                 search_only=args.search_only)
    text = _csv_text(echo, to_csv_rows([est]))
    _emit(text, args.out)
    if not args.out:
        print(f"# K'({x or 'ε'}|{args.z or 'ε'}) <= {est.value_bits} "
              f"[{est.status}] witness={est.witness}")
    return EXIT_OK


def _cmd_odds(args):
    gas = Gas(args.gas)
    if args.witness_store:
        use_witness_store(args.witness_store)
    rep = odds(args.o, args.a, args.b, args.z, args.max_len, gas,
               allow_construction=not args.search_only)
    echo = _echo("odds", o=args.o or "''", a=args.a, b=args.b,
                 z=args.z or "''", max_len=args.max_len, gas=gas.max_steps)
    rows = [["o", "a", "b", "z", "k_oa", "k_ob", "delta_bits", "ratio",
             "witness_a_hex", "witness_b_hex"],
            [args.o, args.a, args.b, args.z,
             str(rep.k_oa.value_bits), str(rep.k_ob.value_bits),
             str(rep.delta_bits), str(rep.ratio),
             bits_to_hex(rep.k_oa.witness), bits_to_hex(rep.k_ob.witness)]]
    text = _csv_text(echo, rows)
    _emit(text, args.out)
    if not args.out:
        print(f"# P(oa|z)/P(ob|z) = {rep.ratio_text()}")
    return EXIT_OK


def _cmd_census_odds(args):
    gas = Gas(args.gas)
    dem = democratic_odds(args.o, args.a, args.b, args.z, n=args.n, gas=gas)
    echo = _echo("census-odds", o=args.o or "''", a=args.a, b=args.b,
                 z=args.z or "''", n=args.n, gas=gas.max_steps)
    rows = [["o", "a", "b", "z", "n", "count_a_lo", "count_a_hi",
             "count_b_lo", "count_b_hi", "log2_lo", "log2_hi"],
            [args.o, args.a, args.b, args.z, str(args.n),
             str(dem.count_a_lo), str(dem.count_a_hi),
             str(dem.count_b_lo), str(dem.count_b_hi),
             f"{dem.log2_lo:.6f}", f"{dem.log2_hi:.6f}"]]
    text = _csv_text(echo, rows)
    _emit(text, args.out)
    if not args.out:
        print(f"# log2 vote ratio in [{dem.log2_lo:.3f}, {dem.log2_hi:.3f}]")
    return EXIT_OK


def _cmd_stoch(args):
    gas = Gas(args.gas)
    q = _read_program(args.q)
    ev = stochastic_eval(q, args.z, args.samples, gas, args.seed)
    echo = _echo("stoch", q_bits=len(q), z=args.z or "''",
                 samples=args.samples, seed=args.seed, gas=gas.max_steps)
    rows = [["outcome", "count", "frequency", "surprisal_bits"]]
    for o in ev.outcomes():
        rows.append([o, str(ev.outcome_counts[o]), f"{ev.frequency(o):.8g}",
                     f"{ev.surprisal_bits(o):.6f}"])
    rows.append(["(divergent)", str(ev.divergent), "", ""])
    rows.append(["(invalid)", str(ev.invalid), "", ""])
    text = _csv_text(echo, rows)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_regloss(args):
    gas = Gas(args.gas)
    model = _read_program(args.model)
    rep = regularized_loss(model, args.o, args.z, args.kind, gas,
                           args.samples, args.seed, args.max_len)
    echo = _echo("regloss", kind=args.kind, model_bits=len(model),
                 o=args.o or "''", z=args.z or "''", gas=gas.max_steps,
                 samples=args.samples, seed=args.seed)
    rows = [["model_hex", "kind", "complexity_bits", "empirical_loss_bits",
             "total_bits", "notes"],
            [bits_to_hex(model), rep.kind, str(rep.complexity_bits),
             f"{rep.empirical_loss_bits:g}", f"{rep.total_bits:g}",
             rep.notes]]
    text = _csv_text(echo, rows)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_ledger(args):
    path = _registry_path(args)
    registry = _load_registry(path)
    if args.ledger_cmd == "add":
        if args.term_file:
            with open(args.term_file, encoding="utf-8") as fh:
                term = parse_term(fh.read())
            definition = Definition(
                name=args.name, deps=tuple(args.deps),
                payload_code=encode_term(term), provenance=args.provenance)
        else:
            definition = Definition(
                name=args.name, deps=tuple(args.deps),
                audited_cost=args.cost, provenance=args.provenance)
        registry.register(definition)
        registry.save(path)
        print(_echo("ledger-add", name=args.name,
                    cost=definition.cost_bits, registry=path))
        return EXIT_OK
    if args.ledger_cmd == "cost":
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = _manifest_from_dict(json.load(fh))
        breakdown = model_complexity(manifest, registry)
        print(_echo("ledger-cost", manifest=manifest.name, registry=path))
        for field_name in ("definition_bits", "reference_bits",
                           "constant_bits", "glue_bits", "total_bits"):
            print(f"{field_name}: {getattr(breakdown, field_name)}")
        print(f"closure: {','.join(breakdown.closure_names)}")
        print(f"total_nats: {to_nats(breakdown.total_bits):.4f}")
        return EXIT_OK
    if args.ledger_cmd == "rank":
        with open(args.submissions, encoding="utf-8") as fh:
            subs = json.load(fh)
        pairs = [(_manifest_from_dict(s["manifest"]),
                  float(s["empirical_loss_bits"])) for s in subs]
        ranking = rank(args.problem_id, registry, pairs)
        echo = _echo("ledger-rank", problem=args.problem_id, registry=path,
                     submissions=len(pairs))
        if args.format == "table":
            print(echo)
            print(ranking_table(ranking))
        else:
            text = _csv_text(echo, ranking_csv_rows(ranking))
            _emit(text, args.out)
            _maybe_plot("ranking", text, args.plot)
        return EXIT_OK
    raise RazorlabError(f"unknown ledger command {args.ledger_cmd!r}")


def _cmd_verify(args):
    from .acceptance import run_acceptance
    names = args.criteria or None
    results = run_acceptance(names)
    echo = _echo("verify", criteria=",".join(names or ["all"]),
                 gas=10_000)
    rows = [["criterion", "number", "passed", "summary"]]
    for res in results:
        rows.append([res.name, str(res.number), str(res.passed),
                     res.summary])
    text = _csv_text(echo, rows)
    if args.out:
        _emit(text, args.out)
    for res in results:
        print(res.line())
    _maybe_plot("verify", text, args.plot)
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


def _cmd_report(args):
    from . import report
    report.render(args.kind, args.csv, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_constants(args):
    print(_echo("constants"))
    for name, value in sorted(measured_constants().items()):
        print(f"{name}: {value}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="razorlab",
        description="prefix-free lambda-calculus complexity workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, gas=True, seed=False, out=True, plot=False):
        if gas:
            p.add_argument("--gas", type=int, default=config.DEFAULT_GAS)
        if seed:
            p.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
        if out:
            p.add_argument("--out", help="write CSV here instead of stdout")
        if plot:
            p.add_argument("--plot", help="render a figure to this path")
        p.add_argument("--workers", type=int, default=1,
                       help="scheduling hint; never affects output")

    p = sub.add_parser("encode", help="term text -> prefix-free code")
    p.add_argument("file", nargs="?", help="term file (text notation)")
    p.add_argument("--text", help="inline term text")
    p.add_argument("--out", help="write packed bits here")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="bits -> term text")
    p.add_argument("bits", help="bits, @textfile, or @@packedfile")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("run", help="execute a program bit string")
    p.add_argument("program")
    p.add_argument("--z", default="")
    common(p, out=False)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("enumerate", help="closed codes in order")
    p.add_argument("--max-len", type=int, required=True)
    common(p, gas=False)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("census", help="vote census at one length")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--z", default="")
    common(p, plot=True)
    p.set_defaults(func=_cmd_census)

    p = sub.add_parser("mc", help="Monte Carlo universal-distribution run")
    p.add_argument("--samples", type=int, default=config.DEFAULT_SAMPLES)
    p.add_argument("--z", default="")
    p.add_argument("--with-k", action="store_true",
                   help="annotate outputs with searched K'")
    p.add_argument("--max-len", type=int, default=config.SEARCH_CEILING)
    common(p, seed=True, plot=True)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("ksearch", help="shortest-known-program search")
    p.add_argument("x")
    p.add_argument("--z", default="")
    p.add_argument("--max-len", type=int, default=config.SEARCH_CEILING)
    p.add_argument("--search-only", action="store_true",
                   help="exhaustive search only, no constructed witnesses")
    p.add_argument("--witness-store", help="persistent witness corpus")
    common(p)
    p.set_defaults(func=_cmd_ksearch)

    p = sub.add_parser("odds", help="K'-based probability ratio")
    p.add_argument("o")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--z", default="")
    p.add_argument("--max-len", type=int, default=config.SEARCH_CEILING)
    p.add_argument("--search-only", action="store_true")
    p.add_argument("--witness-store")
    common(p)
    p.set_defaults(func=_cmd_odds)

    p = sub.add_parser("census-odds", help="vote-count ratio interval")
    p.add_argument("o")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--z", default="")
    p.add_argument("--n", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_census_odds)

    p = sub.add_parser("stoch", help="sample a randomized model")
    p.add_argument("q", help="model code bits")
    p.add_argument("--z", default="")
    p.add_argument("--samples", type=int, default=config.DEFAULT_SAMPLES)
    common(p, seed=True)
    p.set_defaults(func=_cmd_stoch)

    p = sub.add_parser("regloss", help="regularized loss of a model")
    p.add_argument("model", help="model program bits")
    p.add_argument("o", help="observed data bits")
    p.add_argument("--z", default="")
    p.add_argument("--kind", choices=["hamming", "correction-k",
                                      "surprisal"], default="hamming")
    p.add_argument("--samples", type=int, default=config.DEFAULT_SAMPLES)
    p.add_argument("--max-len", type=int, default=config.SEARCH_CEILING)
    common(p, seed=True)
    p.set_defaults(func=_cmd_regloss)

    p = sub.add_parser("ledger", help="model-complexity ledger")
    p.add_argument("--registry", help=f"registry path "
                   f"(default ${config.REGISTRY_ENV})")
    lsub = p.add_subparsers(dest="ledger_cmd", required=True)
    pa = lsub.add_parser("add")
    pa.add_argument("--name", required=True)
    pa.add_argument("--deps", nargs="*", default=[])
    pa.add_argument("--cost", type=int, help="audited cost in bits")
    pa.add_argument("--term-file", help="term payload (text notation)")
    pa.add_argument("--provenance", default="")
    pc = lsub.add_parser("cost")
    pc.add_argument("manifest", help="manifest JSON file")
    pr = lsub.add_parser("rank")
    pr.add_argument("problem_id")
    pr.add_argument("submissions", help="submissions JSON file")
    pr.add_argument("--format", choices=["csv", "table"], default="csv")
    pr.add_argument("--out")
    pr.add_argument("--plot")
    p.set_defaults(func=_cmd_ledger)

    p = sub.add_parser("verify", help="run acceptance criteria")
    p.add_argument("criteria", nargs="*",
                   help="subset of criteria (default: all)")
    common(p, gas=False, plot=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="render a figure from a CSV")
    p.add_argument("kind", choices=["census", "mc", "ranking", "verify"])
    p.add_argument("csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("constants", help="print the frozen glue sizes")
    p.set_defaults(func=_cmd_constants)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except NotFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOTFOUND
    except ZeroVotes as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ZEROVOTES
    except WitnessMissing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WITNESS
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except RazorlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
