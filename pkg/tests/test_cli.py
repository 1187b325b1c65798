import csv
import subprocess
import sys

import numpy as np
import pytest

from pdsplit import cli
from pdsplit.core import DivergenceError
from pdsplit.pgm import read_image, write_image
from pdsplit.imaging import synthetic_image
from pdsplit.solvers import LOG_COLUMNS


@pytest.fixture
def clean(tmp_path):
    path = tmp_path / "clean.pgm"
    write_image(path, synthetic_image("shapes", (24, 24)))
    return path


def test_missing_input_exits_2(tmp_path, capsys):
    assert cli.main(["denoise", "--output", str(tmp_path / "o.pgm")]) == 2
    err = capsys.readouterr().err
    assert "usage:" in err and "--input" in err


def test_no_command_exits_2(capsys):
    assert cli.main([]) == 2


def test_help_exits_0(capsys):
    assert cli.main(["--help"]) == 0


def test_denoise_writes_image_and_log(tmp_path, clean, capsys):
    out, log = tmp_path / "d.pgm", tmp_path / "d.csv"
    rc = cli.main(["denoise", "--input", str(clean), "--output", str(out), "--sigma", "0.12",
                   "--lambda", "0.07", "--algorithm", "alg2", "--iters", "100", "--log", str(log),
                   "--reference", str(clean)])
    assert rc == 0
    x = read_image(out)
    assert x.shape == (24, 24) and np.all(np.isfinite(x))
    rows = list(csv.reader(open(log)))
    assert tuple(rows[0]) == LOG_COLUMNS and len(rows) == 101
    assert "rmse" in capsys.readouterr().out


def test_denoise_bit_reproducible(tmp_path, clean):
    outs = []
    for k in range(2):
        o, l = tmp_path / f"o{k}.pgm", tmp_path / f"l{k}.csv"
        assert cli.main(["denoise", "--input", str(clean), "--output", str(o), "--sigma", "0.1",
                         "--seed", "7", "--iters", "20", "--log", str(l)]) == 0
        outs.append((o.read_bytes(), l.read_bytes()))
    assert outs[0] == outs[1]


def test_inpaint_and_deblur(tmp_path, clean):
    obs = tmp_path / "obs.pgm"
    assert cli.main(["inpaint", "--input", str(clean), "--output", str(tmp_path / "i.pgm"),
                     "--drop", "0.8", "--lambda", "0.05", "--iters", "200", "--observed", str(obs)]) == 0
    seen = read_image(obs)
    assert abs((seen == 0).mean() - 0.8) < 0.05
    assert cli.main(["deblur", "--input", str(clean), "--output", str(tmp_path / "b.pgm"),
                     "--sigma", "1e-3", "--iters", "30", "--ergodic"]) == 0


def test_config_error_exits_2(tmp_path, clean, capsys):
    rc = cli.main(["denoise", "--input", str(clean), "--output", str(tmp_path / "o.pgm"),
                   "--algorithm", "alg2", "--gamma0", "5"])
    assert rc == 2
    assert "gamma0" in capsys.readouterr().err
    assert cli.main(["denoise", "--input", str(tmp_path / "nope.pgm"),
                     "--output", str(tmp_path / "o.pgm")]) == 2
    assert cli.main(["denoise", "--input", str(clean), "--output", str(tmp_path / "o.pgm"),
                     "--algorithm", "alg9"]) == 2


def test_divergence_exits_3(tmp_path, clean, monkeypatch, capsys):
    def boom(*a, **k):
        raise DivergenceError(4, "primal iterate")
    monkeypatch.setattr(cli, "solve", boom)
    rc = cli.main(["denoise", "--input", str(clean), "--output", str(tmp_path / "o.pgm")])
    assert rc == 3
    assert "iteration 4" in capsys.readouterr().err


def test_threads_env_fallback(monkeypatch):
    monkeypatch.setenv("PDSPLIT_THREADS", "3")
    args = cli.build_parser().parse_args(["deblur", "--input", "a", "--output", "b"])
    assert args.threads == 3
    monkeypatch.delenv("PDSPLIT_THREADS")
    args = cli.build_parser().parse_args(["deblur", "--input", "a", "--output", "b"])
    assert args.threads == 1


def test_bench_table_shape(tmp_path):
    out = tmp_path / "bench.csv"
    rc = cli.main(["bench", "--size", "16", "--algorithms", "alg1,pd2", "--tolerances", "1e-2,1e-3",
                   "--reference-iters", "2000", "--max-iters", "2000", "--output", str(out),
                   "--cache-dir", str(tmp_path / "cache")])
    assert rc == 0
    rows = list(csv.DictReader(open(out)))
    assert [(r["algorithm"], float(r["tolerance"])) for r in rows] == [
        ("alg1", 1e-2), ("alg1", 1e-3), ("pd2", 1e-2), ("pd2", 1e-3)]
    assert all(int(r["iterations"]) > 0 for r in rows)
    assert len(list((tmp_path / "cache").glob("*.npy"))) == 1


def test_bench_rejects_unknown_algorithm(capsys):
    assert cli.main(["bench", "--algorithms", "alg1,foo"]) == 2


def test_make_image_and_module_entry(tmp_path):
    out = tmp_path / "t.pgm"
    r = subprocess.run([sys.executable, "-m", "pdsplit", "make-image", "--output", str(out),
                        "--kind", "texture", "--size", "16"], capture_output=True)
    assert r.returncode == 0
    assert read_image(out).shape == (16, 16)
