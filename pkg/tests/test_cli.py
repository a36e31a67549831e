"""Command-line behavior: exit codes, error locations, deterministic output
files, block selection, and the coefficient cache mirror."""

from importlib import resources

import pytest

from qgevrey.cli import main


@pytest.fixture(scope="module")
def example_text():
    return (resources.files("qgevrey") / "data" /
            "example_s2.toml").read_text()


def run(args):
    try:
        return main([str(a) for a in args])
    except SystemExit as exc:  # argparse-level usage failures
        return exc.code


def write_cfg(tmp_path, text):
    p = tmp_path / "cfg.toml"
    p.write_text(text)
    return p


def read_files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())
            if p.is_file()}


def test_usage_error_without_arguments(capsys):
    assert run([]) == 2
    capsys.readouterr()


def test_missing_config_file(tmp_path, capsys):
    rc = run(["run", tmp_path / "absent.toml", "--out", tmp_path / "out"])
    assert rc == 2
    assert "absent.toml" in capsys.readouterr().err


def test_malformed_toml(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "problem = [unclosed\n")
    assert run(["run", cfg, "--out", tmp_path / "out"]) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_field_reports_location(tmp_path, capsys, example_text):
    assert "S = 2\n" in example_text
    cfg = write_cfg(tmp_path, example_text.replace("S = 2\n", "\n", 1))
    assert run(["run", cfg, "--out", tmp_path / "out"]) == 2
    assert "problem.S" in capsys.readouterr().err


def test_invalid_value_rejected(tmp_path, capsys, example_text):
    assert example_text.count("q = 0.5") == 1
    cfg = write_cfg(tmp_path, example_text.replace("q = 0.5", "q = 1.5", 1))
    assert run(["run", cfg, "--out", tmp_path / "out"]) == 2
    assert "q" in capsys.readouterr().err


def test_hypothesis_error_message(tmp_path, capsys, example_text):
    assert example_text.count("Delta = 1.1") == 1
    cfg = write_cfg(tmp_path,
                    example_text.replace("Delta = 1.1", "Delta = 0.9", 1))
    rc = run(["run", cfg, "--out", tmp_path / "out", "--only", "dirichlet"])
    assert rc == 2
    assert "hypothesis error: Delta must exceed 1" in capsys.readouterr().err


def test_failed_check_exits_one(tmp_path, capsys, example_text):
    assert example_text.count("d2 = 1.0") == 1
    cfg = write_cfg(tmp_path, example_text.replace("d2 = 1.0", "d2 = 1.5", 1))
    out = tmp_path / "out"
    rc = run(["run", cfg, "--out", out, "--only", "assumptions"])
    assert rc == 1
    assert "assumptions" in capsys.readouterr().err.lower()
    assert (out / "summary.txt").exists()


def test_empty_plan_succeeds(tmp_path, example_text):
    cfg = write_cfg(tmp_path, example_text.split("[[run]]")[0])
    out = tmp_path / "out"
    assert run(["run", cfg, "--out", out]) == 0
    assert (out / "summary.txt").exists()


def test_unknown_block_rejected(tmp_path, capsys, example_text):
    cfg = write_cfg(tmp_path, example_text)
    rc = run(["run", cfg, "--out", tmp_path / "out", "--only", "nosuch"])
    assert rc == 2
    assert "unknown block" in capsys.readouterr().err


def test_deterministic_rerun_and_block_subset(tmp_path, example_text):
    cfg = write_cfg(tmp_path, example_text)
    out_a, out_b, out_c = (tmp_path / n for n in ("a", "b", "c"))
    assert run(["run", cfg, "--out", out_a, "--only", "assumptions,borel",
                "--threads", "2"]) == 0
    assert run(["run", cfg, "--out", out_b,
                "--only", "assumptions,borel"]) == 0
    files_a, files_b = read_files(out_a), read_files(out_b)
    assert set(files_a) == set(files_b)
    assert {"assumptions.csv", "borel_ledger.csv", "summary.txt"} <= \
        set(files_a)
    for name in files_a:
        assert files_a[name] == files_b[name], name

    # a narrower selection reproduces the same bytes for its files
    assert run(["run", cfg, "--out", out_c, "--only", "borel"]) == 0
    assert read_files(out_c)["borel_ledger.csv"] == files_a["borel_ledger.csv"]


def test_cache_mirror_env(tmp_path, monkeypatch, example_text):
    cache = tmp_path / "cache"
    monkeypatch.setenv("QGEVREY_CACHE_DIR", str(cache))
    cfg = write_cfg(tmp_path, example_text)
    assert run(["run", cfg, "--out", tmp_path / "out",
                "--only", "borel"]) == 0
    assert cache.is_dir() and any(cache.rglob("*.csv"))
