import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from unibench.cli import build_parser, main
from unibench.ingestion import parse_canonical, parse_results

FIXTURES = Path(__file__).parent / "fixtures"
FAST = ["--workload-bytes", "4800", "--repetitions", "1", "--warmup", "0"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_measure_two_ciphers(capsys):
    code, out, err = run(capsys, "measure", "--ciphers", "xtea,aes128", *FAST)
    assert code == 0
    recs = parse_canonical(out)
    assert [r.subject_id for r in recs] == ["xtea", "aes128"]
    detail = recs[0].measurements["sw.et"].detail
    assert "repetitions=1" in detail and "warmup=0" in detail and "workload_bytes=4800" in detail


def test_measure_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("UNIBENCH_SEED", "0x2a")
    code, out, _ = run(capsys, "measure", "--ciphers", "xtea", *FAST)
    assert code == 0 and "seed=0x2a" in out


def test_measure_bad_seed(capsys, monkeypatch):
    monkeypatch.setenv("UNIBENCH_SEED", "banana")
    code, _, err = run(capsys, "measure", "--ciphers", "xtea", *FAST)
    assert code == 2 and "error" in err


def test_measure_unknown_cipher(capsys):
    code, out, err = run(capsys, "measure", "--ciphers", "xtea,blowfish", *FAST)
    assert code == 2
    assert out == "" and "blowfish" in err


def test_measure_misaligned_workload(capsys):
    code, _, err = run(capsys, "measure", "--ciphers", "threeway", "--workload-bytes", "4096",
                       "--repetitions", "1", "--warmup", "0")
    assert code == 2 and "threeway" in err


def test_measure_to_out_dir(capsys, tmp_path):
    code, out, err = run(capsys, "measure", "--ciphers", "hight", *FAST, "--out", tmp_path)
    assert code == 0 and out == ""
    assert parse_canonical((tmp_path / "measurements.json").read_text())[0].subject_id == "hight"


def test_ingest_merges_sources(capsys):
    code, out, _ = run(capsys, "ingest", "--profiler-csv", FIXTURES / "profiler.csv",
                       "--synthesis", FIXTURES / "aes128.synth", "--synthesis", FIXTURES / "hight.synth")
    assert code == 0
    recs = {r.subject_id: r for r in parse_canonical(out)}
    assert set(recs["aes128"].measurements) == {"sw.et", "sw.cpi", "sw.cmr", "hw.et", "hw.th", "hw.pd",
                                                "hw.lut", "hw.lr", "hw.pc"}


def test_ingest_conflict(capsys, tmp_path):
    other = tmp_path / "p.csv"
    other.write_text((FIXTURES / "profiler.csv").read_text().replace("0.0061", "0.0062"))
    code, _, err = run(capsys, "ingest", "--profiler-csv", FIXTURES / "profiler.csv", "--profiler-csv", other)
    assert code == 3 and "sw.et" in err and "aes128" in err


def test_ingest_empty_list(capsys):
    code, _, err = run(capsys, "ingest")
    assert code == 3 and "at least one" in err


def test_ingest_schema_error_has_context(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("subject,et_s,instructions,cycles,cache_accesses,cache_misses\naes,x,1,1,1,0\n")
    code, _, err = run(capsys, "ingest", "--profiler-csv", bad)
    assert code == 3 and "bad.csv" in err and "row 2" in err


def test_ingest_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "ingest", "--synthesis", tmp_path / "nope.synth")
    assert code == 3


def test_ingest_zero_cmr_clamp(capsys, tmp_path):
    csv = tmp_path / "z.csv"
    csv.write_text("subject,et_s,instructions,cycles,cache_accesses,cache_misses\naes,1,1,1,1,0\n")
    code, _, _ = run(capsys, "ingest", "--profiler-csv", csv)
    assert code == 3
    code, out, err = run(capsys, "ingest", "--profiler-csv", csv, "--clamp-epsilon", "1e-6")
    assert code == 0 and "warning" in err and "clamped" in err


def test_compose_identity_fixture(capsys, tmp_path):
    doc = json.loads((FIXTURES / "li_sample.json").read_text())
    ref = doc["subjects"][0]
    doc["subjects"] = [dict(ref, subject_id=s) if s != "aes128" else ref for s in ("aes128", "clone_a", "clone_b")]
    path = tmp_path / "same.json"
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "compose", path)
    assert code == 0
    _, _, results, ranking = parse_results(out)
    assert {r.cmi for r in results} == {1.0}
    assert [(r.rank, r.subject_id) for r in ranking] == [(1, "aes128"), (1, "clone_a"), (1, "clone_b")]
    assert "1.00" in err


def test_compose_reference_only(capsys):
    code, out, _ = run(capsys, "compose", FIXTURES / "aes_only.json")
    assert code == 0
    _, _, results, _ = parse_results(out)
    assert len(results) == 1 and results[0].cmi == 1.0


def test_compose_missing_reference(capsys):
    code, out, err = run(capsys, "compose", FIXTURES / "li_sample.json", "--reference", "des")
    assert code == 4 and out == "" and "des" in err


def test_compose_malformed_document(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "subjects": [\n  {"subject_id": 7}]}')
    code, out, err = run(capsys, "compose", bad)
    assert code == 3 and out == "" and "subject_id" in err


def test_compose_missing_file(capsys, tmp_path):
    assert run(capsys, "compose", tmp_path / "absent.json")[0] == 4


def test_compose_warns_on_partial(capsys, tmp_path):
    code, out, _ = run(capsys, "measure", "--ciphers", "aes128,xtea", *FAST)
    path = tmp_path / "m.json"
    path.write_text(out)
    code, out, err = run(capsys, "compose", path, "--out", tmp_path / "r")
    assert code == 0
    assert "warning: xtea: missing sw.cpi, sw.cmr in profile sw" in err
    assert sorted(line.split()[1] for line in out.splitlines()) == ["aes128", "xtea"]


def test_compose_out_writes_results(capsys, tmp_path):
    code, out, _ = run(capsys, "compose", FIXTURES / "li_sample.json", "--out", tmp_path)
    assert code == 0
    assert (tmp_path / "results.json").exists()
    assert [line.split()[1] for line in out.splitlines()] == ["threeway", "hight", "aes128", "katan64"]


def test_rank_published_scores(capsys):
    code, out, _ = run(capsys, "rank", "--score", "hight=2.49", "--score", "katan64=0.79", "--score",
                       "threeway=3.38")
    assert code == 0
    assert out.splitlines() == ["rank,subject,cmi", "1,threeway,3.38", "2,hight,2.49", "3,katan64,0.79"]


@pytest.mark.parametrize("score", ["hight", "hight=fast", "=2"])
def test_rank_bad_score(capsys, score):
    code, _, err = run(capsys, "rank", "--score", score)
    assert code == 4 and "--score" in err


def test_rank_needs_input(capsys):
    assert run(capsys, "rank")[0] == 4


def test_report_writes_three_files(capsys, tmp_path):
    run(capsys, "compose", FIXTURES / "li_sample.json", "--out", tmp_path)
    code, _, _ = run(capsys, "report", tmp_path / "results.json", "--out", tmp_path / "rep")
    assert code == 0
    assert sorted(p.name for p in (tmp_path / "rep").iterdir()) == ["li_bar.svg", "li_radar.svg", "ranking.csv"]
    first = {p.name: p.read_bytes() for p in (tmp_path / "rep").iterdir()}
    run(capsys, "report", tmp_path / "results.json", "--out", tmp_path / "rep")
    assert first == {p.name: p.read_bytes() for p in (tmp_path / "rep").iterdir()}


def test_report_custom_names(capsys, tmp_path):
    run(capsys, "compose", FIXTURES / "li_sample.json", "--out", tmp_path)
    code, _, _ = run(capsys, "report", tmp_path / "results.json", "--out", tmp_path, "--ranking-name", "r.csv",
                     "--bar-name", "b.svg", "--radar-name", "c.svg")
    assert code == 0 and all((tmp_path / n).exists() for n in ("r.csv", "b.svg", "c.svg"))


def test_report_unwritable_directory(capsys, tmp_path):
    run(capsys, "compose", FIXTURES / "li_sample.json", "--out", tmp_path)
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(capsys, "report", tmp_path / "results.json", "--out", blocker / "sub")
    assert code == 5 and "cannot write" in err


def test_report_input_errors(capsys, tmp_path):
    bad = tmp_path / "r.json"
    bad.write_text("{nope")
    # parse failures keep the ingestion code, unreadable input the command's own
    assert run(capsys, "report", bad, "--out", tmp_path)[0] == 3
    assert run(capsys, "report", tmp_path / "absent.json", "--out", tmp_path)[0] == 5


def test_help_documents_every_flag():
    parser = build_parser()
    subs = parser._subparsers._group_actions[0].choices
    assert set(subs) == {"measure", "ingest", "compose", "rank", "report"}
    for name, sub in subs.items():
        text = sub.format_help()
        for action in sub._actions:
            for opt in action.option_strings:
                assert opt in text
            if action.option_strings and action.dest != "help":
                assert action.help, f"{name} {action.option_strings} lacks help text"
        for flag in ("--out", "--reference", "--clamp-epsilon"):
            assert flag in text


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "unibench", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "measure" in out.stdout


@settings(suppress_health_check=[HealthCheck.function_scoped_fixture], max_examples=60)
@given(st.binary(max_size=300) | st.text(max_size=300).map(str.encode))
def test_malformed_inputs_never_crash(capsys, tmp_path, blob):
    path = tmp_path / "in.bin"
    path.write_bytes(blob)
    assert run(capsys, "compose", path)[0] in (3, 4)
    for flag in ("--profiler-csv", "--synthesis", "--canonical"):
        assert run(capsys, "ingest", flag, path)[0] == 3
    assert run(capsys, "report", path, "--out", tmp_path / "o")[0] == 3
