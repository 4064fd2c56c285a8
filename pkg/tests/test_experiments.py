from pathlib import Path
from xml.etree import ElementTree as ET

import pytest

from rgreedi.cli import main
from rgreedi.experiments import (CSV_HEADER, ConfigError, ExperimentConfig, ResultRow, emit_csv, emit_plot,
                                 parse_k_range, read_csv, run_and_write, run_experiment)

MICRO = Path(__file__).resolve().parents[1] / "src" / "rgreedi" / "data" / "micro.dat"
SVG = "{http://www.w3.org/2000/svg}"


def _row(k=1, alg="greedy", part="central", ratio=0.5, exp="coverage_ratio", stat="value:opt"):
    return ResultRow(exp, "inst", alg, part, k, 1, stat, ratio * 10, ratio, 7, 0.0)


def test_parse_k_range():
    assert parse_k_range("1:5") == [1, 2, 3, 4, 5]
    assert parse_k_range("1:10:3") == [1, 4, 7, 10]
    assert parse_k_range("2, 4,8") == [2, 4, 8]
    with pytest.raises(ConfigError):
        parse_k_range("a:b")


@pytest.mark.parametrize("pairs", [
    {"experiment": "nope"},
    {"k_range": "3,2"},
    {"trials": "0"},
    {"m": "0"},
    {"colour": "red"},
    {"m": "two"},
    {"timing": "maybe"},
    {"reference": "psychic"},
])
def test_config_rejects(pairs):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_pairs(pairs)


def test_config_file_and_overrides(tmp_path):
    p = tmp_path / "exp.cfg"
    p.write_text("# demo\nexperiment = exemplar\nk_range = 1:3\nm = 2  # machines\n\nout = somewhere\n")
    cfg = ExperimentConfig.from_file(p, {"m": "8", "seed": "42"})
    assert (cfg.experiment, cfg.k_range, cfg.m, cfg.seed, cfg.output_dir) == ("exemplar", [1, 2, 3], 8, 42, "somewhere")


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("experiment exemplar\n")
    with pytest.raises(ConfigError, match="bad.cfg:1"):
        ExperimentConfig.from_file(bad)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(tmp_path / "missing.cfg")


def test_csv_single_row(tmp_path):
    p = emit_csv([_row(ratio=2 / 3)], tmp_path / "one.csv")
    lines = p.read_text().split("\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[0] == "experiment,instance,algorithm,partition,k,m,stat,value,ratio,oracle_calls,wall_ms"
    assert lines[2] == "" and len(lines) == 3
    assert lines[1].split(",")[8] == "0.666667"


def test_csv_round_trip(tmp_path):
    rows = [_row(k, ratio=k / 7) for k in range(1, 5)] + [_row(2, "rand_greedi", "random", 1 / 3, stat="mean:opt")]
    p = emit_csv(rows, tmp_path / "rows.csv")
    assert read_csv(p) == rows


def test_csv_rejects_empty_and_reports_path(tmp_path):
    with pytest.raises(ValueError):
        emit_csv([], tmp_path / "x.csv")
    with pytest.raises(OSError, match="nowhere"):
        emit_csv([_row()], tmp_path / "nowhere" / "x.csv")


def test_plot_structure(tmp_path):
    rows = [_row(k, alg, part, 0.5 + k / 10) for k in (1, 2, 3)
            for alg, part in (("greedy", "central"), ("rand_greedi", "random"))]
    rows.append(_row(2, "rand_greedi", "random", 0.01, stat="se:opt"))
    p = emit_plot(rows, tmp_path / "p.svg")
    root = ET.parse(p).getroot()
    lines = root.findall(f"{SVG}polyline")
    assert len(lines) == 2
    assert all(len(pl.get("points").split()) == 3 for pl in lines)
    texts = [t.text for t in root.findall(f"{SVG}text")]
    assert "k" in texts and "ratio" in texts
    assert "rand_greedi (random)" in texts


def test_plot_rejects_bad_input(tmp_path):
    with pytest.raises(ValueError):
        emit_plot([], tmp_path / "p.svg")
    with pytest.raises(ValueError):
        emit_plot([_row(), _row(exp="exemplar")], tmp_path / "p.svg")


def test_tight_instance_experiment():
    """Adversarial GreeDi reaches 21/36 at l = 3 (0.583, above the 0.5 quoted cap); RandGreeDi does better."""
    cfg = ExperimentConfig(experiment="tight_instance", l=3, trials=30, partition_strategies=["random"])
    rows = run_experiment(cfg)
    det = next(r for r in rows if r.partition == "adversarial")
    rand = next(r for r in rows if r.algorithm == "rand_greedi" and r.stat.startswith("mean"))
    assert det.ratio == pytest.approx(21 / 36, rel=1e-6)
    assert rand.ratio > det.ratio


def test_micro_fimi_coverage():
    cfg = ExperimentConfig(fimi_path=str(MICRO), k_range=[1, 2, 3, 4, 5], m=4, trials=40)
    rows = run_experiment(cfg)
    assert all(r.stat.endswith(":opt") for r in rows)
    assert all(r.ratio <= 1 + 1e-9 for r in rows if not r.stat.startswith("se"))
    for k in range(1, 6):
        mean = next(r for r in rows if r.k == k and r.stat == "mean:opt")
        se = next(r for r in rows if r.k == k and r.stat == "se:opt")
        assert mean.ratio >= 0.316 - 3 * se.ratio


def test_rows_sorted():
    rows = run_experiment(ExperimentConfig(experiment="diversity", n=8, k_range=[1, 2], trials=3, m=2))
    assert rows == sorted(rows, key=ResultRow.sort_key)
    assert {r.algorithm for r in rows} == {"greedy", "greedi", "rand_greedi", "nm_rand_greedi"}


@pytest.mark.parametrize("experiment", ["coverage_ratio", "exemplar", "matroid_ellipse", "tight_instance"])
def test_repeatable_csv(tmp_path, experiment):
    blobs = []
    for run in range(2):
        cfg = ExperimentConfig(experiment=experiment, k_range=[1, 2], trials=1, n=10, l=2, n_facilities=4,
                               demand_grid=20, output_dir=str(tmp_path / str(run)))
        _, path = run_and_write(cfg)
        blobs.append(path.read_bytes())
        assert path.with_suffix(".svg").exists()
    assert blobs[0] == blobs[1]


def test_exact_reference_too_large():
    cfg = ExperimentConfig(experiment="exemplar", n=30, k_range=[2], trials=1, reference="opt")
    with pytest.raises(ConfigError):
        run_experiment(cfg)
    cfg.reference = "auto"
    assert all(r.stat.endswith(":greedy") for r in run_experiment(cfg))


def test_unwritable_output_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    cfg = ExperimentConfig(experiment="coverage_ratio", n=8, k_range=[1], trials=1, output_dir=str(blocker / "sub"))
    with pytest.raises(OSError):
        run_and_write(cfg)


def test_cli_run(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(f"experiment = coverage_ratio\nn = 10\nk_range = 1:3\ntrials = 4\nout = {tmp_path / 'o'}\n")
    assert main(["run", str(cfg), "--m", "3", "--seed", "5"]) == 0
    rows = read_csv(tmp_path / "o" / "coverage_ratio.csv")
    assert {r.m for r in rows if r.algorithm != "greedy"} == {3}


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["run", "--experiment", "bogus"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["run", str(tmp_path / "missing.cfg")]) == 2
    assert main(["gen", "coverage", "--out", str(tmp_path / "x.txt")]) == 2
    assert main(["gen", "tight", "--out", str(tmp_path / "x.dat")]) == 2


def test_cli_gen(tmp_path):
    assert main(["gen", "coverage", "--n", "6", "--out", str(tmp_path / "c.dat")]) == 0
    assert len((tmp_path / "c.dat").read_text().splitlines()) == 6
    for kind in ("exemplar", "diversity", "ellipse", "tight"):
        assert main(["gen", kind, "--n", "6", "--k", "2", "--demand-grid", "10", "--out",
                     str(tmp_path / f"{kind}.json")]) == 0


def test_cli_verify_exit_codes(capsys):
    assert main(["verify", "--quick", "--suite", "lemma2"]) == 0
    assert "[PASS]" in capsys.readouterr().out
    assert main(["verify", "--quick", "--suite", "tight"]) == 1


def test_bound_suite_experiment(tmp_path):
    cfg = ExperimentConfig(experiment="bound_suite", output_dir=str(tmp_path))
    rows, path = run_and_write(cfg)
    assert len(rows) == 10 and path.exists()
    assert not path.with_suffix(".svg").exists()


@pytest.mark.parametrize("path", sorted((Path(__file__).resolve().parents[1] / "configs").glob("*.cfg")),
                         ids=lambda p: p.stem)
def test_shipped_configs_parse(path):
    assert ExperimentConfig.from_file(path).experiment == path.stem
