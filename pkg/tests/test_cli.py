import json
import os

from razorlab.cli import main, EXIT_OK, EXIT_ZEROVOTES, EXIT_NOTFOUND
from razorlab.bits import write_bits


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def test_encode_identity(capsys):
    code, out = run_cli(capsys, "encode", "--text", r"\x. x")
    assert code == EXIT_OK
    assert out.splitlines()[1] == "0010"


def test_encode_from_file(tmp_path, capsys):
    f = tmp_path / "term.lam"
    f.write_text(r"\z d. z  # the copy program")
    code, out = run_cli(capsys, "encode", str(f))
    assert out.splitlines()[1] == "0000110"


def test_decode_round(capsys):
    code, out = run_cli(capsys, "decode", "0100100010")
    assert code == EXIT_OK
    assert out.splitlines()[1] == r"(\ 1) (\ 1)"


def test_run_command(capsys):
    code, out = run_cli(capsys, "run", "0000110", "--z", "101")
    assert code == EXIT_OK
    assert "status: halted" in out
    assert "output: 101" in out
    assert "valid_self_delimiting: True" in out


def test_run_packed_program(tmp_path, capsys):
    path = tmp_path / "prog.bits"
    write_bits(path, "0000110")
    code, out = run_cli(capsys, "run", f"@@{path}", "--z", "11")
    assert "output: 11" in out


def test_enumerate(capsys):
    code, out = run_cli(capsys, "enumerate", "--max-len", "6")
    lines = out.splitlines()
    assert lines[0].startswith("# razorlab enumerate")
    assert lines[1] == "length,code"
    assert lines[2] == "4,0010"
    assert lines[3] == "6,000010"


def test_census_csv_and_echo(capsys):
    code, out = run_cli(capsys, "census", "--n", "7", "--gas", "10000")
    lines = out.splitlines()
    assert lines[0].startswith("# razorlab census")
    assert "gas=10000" in lines[0]
    assert lines[1] == "n,x,count_lo,count_hi,unresolved,gas,seed"
    assert lines[2].startswith("7,,1,1,0,10000")


def test_census_workers_do_not_change_output(capsys):
    _, a = run_cli(capsys, "census", "--n", "10", "--gas", "5000",
                   "--workers", "1")
    _, b = run_cli(capsys, "census", "--n", "10", "--gas", "5000",
                   "--workers", "3")
    assert a == b


def test_mc_csv(capsys):
    code, out = run_cli(capsys, "mc", "--samples", "5000", "--seed", "2",
                        "--gas", "5000")
    lines = out.splitlines()
    assert lines[1].split(",")[:3] == ["x", "hits", "m_hat"]
    assert any(row.startswith("(invalid)") for row in lines)


def test_ksearch(capsys):
    code, out = run_cli(capsys, "ksearch", "", "--max-len", "12",
                        "--gas", "10000")
    assert code == EXIT_OK
    assert "value_bits" in out
    assert ",7," in out


def test_ksearch_not_found_exit(capsys):
    code, out = run_cli(capsys, "ksearch", "0", "--max-len", "10",
                        "--search-only", "--gas", "5000")
    assert code == EXIT_NOTFOUND


def test_odds(capsys):
    code, out = run_cli(capsys, "odds", "", "0", "1", "--max-len", "24",
                        "--gas", "10000")
    assert code == EXIT_OK
    assert "P(oa|z)/P(ob|z) = 2^2" in out


def test_census_odds_and_zero_votes(capsys):
    code, out = run_cli(capsys, "census-odds", "", "0", "1", "--z", "0",
                        "--n", "24", "--gas", "10000")
    assert code == EXIT_OK
    assert "log2 vote ratio in [" in out
    code, _ = run_cli(capsys, "census-odds", "", "0", "1", "--n", "24",
                      "--gas", "10000")
    assert code == EXIT_ZEROVOTES


def test_stoch(capsys):
    # the one-bit echo model
    from razorlab.combinators import ECHO1
    from razorlab.terms import encode_term
    code, out = run_cli(capsys, "stoch", encode_term(ECHO1), "--samples",
                        "2000", "--seed", "1")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[1] == "outcome,count,frequency,surprisal_bits"
    freqs = {r.split(",")[0]: float(r.split(",")[2])
             for r in lines[2:4]}
    assert abs(freqs["0"] + freqs["1"] - 1.0) < 1e-9


def test_regloss(capsys):
    from razorlab.combinators import const_program
    from razorlab.terms import encode_term
    model = encode_term(const_program("01"))
    code, out = run_cli(capsys, "regloss", model, "01", "--kind", "hamming")
    assert code == EXIT_OK
    assert ",0," in out.splitlines()[2]


def test_ledger_flow(tmp_path, capsys):
    reg = str(tmp_path / "registry.json")
    for args in (
        ["ledger", "--registry", reg, "add", "--name", "lim",
         "--cost", "40", "--provenance", "audited"],
        ["ledger", "--registry", reg, "add", "--name", "integral",
         "--deps", "lim", "--cost", "60", "--provenance", "audited"],
        ["ledger", "--registry", reg, "add", "--name", "derivative",
         "--deps", "lim", "--cost", "50", "--provenance", "audited"],
    ):
        assert main(args) == EXIT_OK
    capsys.readouterr()

    manifest = {"name": "calculus", "problem_id": "demo",
                "refs": [["integral", 1], ["derivative", 1]],
                "glue_bits": 5}
    mpath = tmp_path / "manifest.json"
    mpath.write_text(json.dumps(manifest))
    code, out = run_cli(capsys, "ledger", "--registry", reg, "cost",
                        str(mpath))
    assert code == EXIT_OK
    assert "definition_bits: 150" in out

    subs = [{"manifest": manifest, "empirical_loss_bits": 1.0},
            {"manifest": {"name": "tiny", "problem_id": "demo",
                          "glue_bits": 30}, "empirical_loss_bits": 2.0}]
    spath = tmp_path / "subs.json"
    spath.write_text(json.dumps(subs))
    code, out = run_cli(capsys, "ledger", "--registry", reg, "rank",
                        "demo", str(spath), "--format", "table")
    assert code == EXIT_OK
    assert out.splitlines()[1].split()[0] == "problem_id"
    assert "tiny" in out


def test_ledger_env_var(tmp_path, capsys, monkeypatch):
    reg = str(tmp_path / "registry.json")
    monkeypatch.setenv("RAZORLAB_REGISTRY", reg)
    code, _ = run_cli(capsys, "ledger", "add", "--name", "lim",
                      "--cost", "40", "--provenance", "audited")
    assert code == EXIT_OK
    assert os.path.exists(reg)


def test_term_payload_definition(tmp_path, capsys):
    reg = str(tmp_path / "registry.json")
    tpath = tmp_path / "copy.lam"
    tpath.write_text(r"\z d. z")
    code, out = run_cli(capsys, "ledger", "--registry", reg, "add",
                        "--name", "copy", "--term-file", str(tpath))
    assert code == EXIT_OK
    assert "cost=7" in out


def test_verify_subset_and_csv(tmp_path, capsys):
    out_path = str(tmp_path / "verify.csv")
    code, out = run_cli(capsys, "verify", "kraft", "prefix-free",
                        "--out", out_path)
    assert code == EXIT_OK
    assert "PASS   1 kraft-inequality" in out
    text = open(out_path).read()
    assert text.splitlines()[1] == "criterion,number,passed,summary"


def test_verify_determinism_bytes(tmp_path, capsys):
    p1, p2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    run_cli(capsys, "verify", "kraft", "--out", p1)
    run_cli(capsys, "verify", "kraft", "--out", p2, "--workers", "2")
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_report_and_plot(tmp_path, capsys):
    csv_path = str(tmp_path / "census.csv")
    fig_path = str(tmp_path / "census.png")
    run_cli(capsys, "census", "--n", "10", "--gas", "5000",
            "--out", csv_path)
    code, out = run_cli(capsys, "report", "census", csv_path,
                        "--out", fig_path)
    assert code == EXIT_OK
    assert os.path.getsize(fig_path) > 1000


def test_census_plot_flag(tmp_path, capsys):
    fig_path = str(tmp_path / "fig.png")
    code, out = run_cli(capsys, "census", "--n", "10", "--gas", "5000",
                        "--plot", fig_path)
    assert code == EXIT_OK
    assert os.path.exists(fig_path)


def test_constants_command(capsys):
    code, out = run_cli(capsys, "constants")
    assert "c_pair: 103" in out
    assert "pad_reader_bits: 127" in out
