import math

import numpy as np
import pytest

from sdmafit import (MaBlock, MaParams, NumericalError, load_constraints,
                     save_model)
from sdmafit import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_log_csv(path, f, lo=-1.0, hi=1.0, count=41):
    xs = np.linspace(lo, hi, count)
    with open(path, "w", encoding="utf-8") as fh:
        for x in xs:
            fh.write(f"{float(x)!r},{float(f(x))!r}\n")
    return str(path)


def grab(out: str, key: str) -> str:
    for line in out.splitlines():
        if line.startswith(key):
            return line[len(key):].strip()
    raise AssertionError(f"{key!r} not found in output:\n{out}")


def test_fit_constant_data_reports_zero_rms(tmp_path, capsys):
    src = tmp_path / "const.csv"
    with open(src, "w") as fh:
        for u in np.linspace(0.5, 2.0, 20):
            fh.write(f"{float(u)!r},5.0\n")
    model = tmp_path / "const.model"
    code, out, _ = run(capsys, "fit", "--input", str(src), "--class", "ma",
                       "--order", "1", "--restarts", "1",
                       "--out", str(model))
    assert code == 0
    assert float(grab(out, "rms_fraction:")) < 1e-10
    assert model.exists()


def test_fit_twice_same_seed_is_byte_identical(tmp_path, capsys):
    src = write_log_csv(tmp_path / "d.csv", abs)
    m1, m2 = tmp_path / "a.model", tmp_path / "b.model"
    argv = ["fit", "--input", src, "--space", "log", "--class", "sdma",
            "--k", "2", "--m", "1", "--restarts", "2", "--seed", "9"]
    assert cli.main(argv + ["--out", str(m1)]) == 0
    assert cli.main(argv + ["--out", str(m2)]) == 0
    capsys.readouterr()
    assert m1.read_bytes() == m2.read_bytes()


def test_eval_identity_model_maps_e_to_e(tmp_path, capsys):
    model = tmp_path / "id.model"
    save_model(MaParams(block=MaBlock(b=[0.0], a=[[1.0]])), str(model))
    code, out, _ = run(capsys, "eval", "--model", str(model),
                       "--point", repr(math.e))
    assert code == 0
    u, w = (float(v) for v in out.strip().split(","))
    assert math.isclose(u, math.e, rel_tol=1e-15)
    assert math.isclose(w, math.e, rel_tol=1e-12)


def test_fit_eval_rms_agree_on_training_data(tmp_path, capsys):
    src = write_log_csv(tmp_path / "train.csv", lambda x: x * x)
    model = tmp_path / "m.model"
    code, out, _ = run(capsys, "fit", "--input", src, "--space", "log",
                       "--class", "sdma", "--order", "2", "--restarts", "3",
                       "--seed", "0", "--out", str(model))
    assert code == 0
    fitted_rms = float(grab(out, "rms_fraction:"))

    preds_path = tmp_path / "preds.csv"
    code, _, _ = run(capsys, "eval", "--model", str(model), "--input", src,
                     "--space", "log", "--out", str(preds_path))
    assert code == 0
    rows = np.array([[float(v) for v in ln.split(",")]
                     for ln in preds_path.read_text().splitlines()])
    train = np.array([[float(v) for v in ln.split(",")]
                      for ln in open(src).read().splitlines()])
    recomputed = float(np.sqrt(np.mean((rows[:, 1] - train[:, 1]) ** 2)))
    assert abs(recomputed - fitted_rms) < 1e-12

    code, out, _ = run(capsys, "rms", "--model", str(model), "--input", src,
                       "--space", "log")
    assert code == 0
    assert abs(float(grab(out, "rms_fraction:")) - fitted_rms) < 1e-12


def test_export_sdma_leq_operator_line(tmp_path, capsys):
    # smooth data keeps the fitted softness small enough to exponentiate
    src = write_log_csv(tmp_path / "d.csv",
                        lambda x: math.log1p(math.exp(x)), lo=-2.0, hi=2.0)
    model = tmp_path / "m.model"
    assert cli.main(["fit", "--input", src, "--space", "log", "--class",
                     "sdma", "--order", "2", "--restarts", "2",
                     "--out", str(model)]) == 0
    capsys.readouterr()
    cons = tmp_path / "m.sp"
    code, out, _ = run(capsys, "export", "--model", str(model),
                       "--op", "leq", "--out", str(cons))
    assert code == 0
    assert "operators line: w: <=, p_convex: >=, p_concave: <=" in out
    assert out.splitlines()[0].startswith("w <= ")
    assert cons.exists()


def test_eval_agrees_with_exported_constraint_ratio(tmp_path, capsys):
    src = write_log_csv(tmp_path / "d.csv",
                        lambda x: math.log1p(math.exp(x)), lo=-2.0, hi=2.0)
    model = tmp_path / "m.model"
    assert cli.main(["fit", "--input", src, "--space", "log", "--class",
                     "sdma", "--order", "2", "--restarts", "2",
                     "--out", str(model)]) == 0
    cons = tmp_path / "m.sp"
    assert cli.main(["export", "--model", str(model), "--out",
                     str(cons)]) == 0
    capsys.readouterr()
    cs = load_constraints(str(cons))
    for u in (0.7, 1.0, 1.8):
        code, out, _ = run(capsys, "eval", "--model", str(model),
                           "--point", repr(u))
        assert code == 0
        w = float(out.strip().split(",")[1])
        assert math.isclose(cs.evaluate([u]), w, rel_tol=1e-10)


def test_export_sma_prints_single_posynomial(tmp_path, capsys):
    src = write_log_csv(tmp_path / "d.csv", lambda x: x * x)
    model = tmp_path / "m.model"
    assert cli.main(["fit", "--input", src, "--space", "log", "--class",
                     "sma", "--order", "3", "--restarts", "2",
                     "--out", str(model)]) == 0
    capsys.readouterr()
    cons = tmp_path / "m.gp"
    code, out, _ = run(capsys, "export", "--model", str(model),
                       "--out", str(cons))
    assert code == 0
    assert "operators line: posynomial: =" in out
    first = out.splitlines()[0]
    assert " = w^" in first or first.endswith(" = w")


def test_export_refuses_hard_max_classes(tmp_path, capsys):
    src = write_log_csv(tmp_path / "d.csv", abs)
    for cls in ("ma", "dma"):
        model = tmp_path / f"{cls}.model"
        assert cli.main(["fit", "--input", src, "--space", "log", "--class",
                         cls, "--order", "2", "--restarts", "1",
                         "--out", str(model)]) == 0
        capsys.readouterr()
        code, _, err = run(capsys, "export", "--model", str(model),
                           "--out", str(tmp_path / "c.sp"))
        assert code == 2
        assert "no inverse out of log space" in err


def test_demo2d_runs_and_writes_points(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    code, out, _ = run(capsys, "demo2d", "--class", "ma", "--order", "2",
                       "--restarts", "2", "--out", str(pts))
    assert code == 0
    assert grab(out, "RMS:").endswith("%")
    assert len(pts.read_text().splitlines()) == 101


def test_input_error_exit_codes(tmp_path, capsys):
    good = write_log_csv(tmp_path / "good.csv", abs)
    model = tmp_path / "m.model"
    assert cli.main(["fit", "--input", good, "--space", "log", "--class",
                     "ma", "--order", "1", "--restarts", "1",
                     "--out", str(model)]) == 0
    capsys.readouterr()

    # missing input file
    code, _, err = run(capsys, "fit", "--input", str(tmp_path / "no.csv"),
                       "--class", "ma", "--order", "1", "--out",
                       str(tmp_path / "x.model"))
    assert code == 2 and err

    # malformed CSV row
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0,2.0\n1.0,oops\n")
    code, _, err = run(capsys, "fit", "--input", str(bad), "--class", "ma",
                       "--order", "1", "--out", str(tmp_path / "x.model"))
    assert code == 2 and "row 2" in err

    # nonpositive value under linear ingestion
    neg = tmp_path / "neg.csv"
    neg.write_text("1.0,2.0\n-1.0,2.0\n")
    code, _, err = run(capsys, "fit", "--input", str(neg), "--class", "ma",
                       "--order", "1", "--out", str(tmp_path / "x.model"))
    assert code == 2 and "positive" in err

    # no order and no k
    code, _, err = run(capsys, "fit", "--input", good, "--space", "log",
                       "--class", "ma", "--out", str(tmp_path / "x.model"))
    assert code == 2 and "--order" in err

    # point arity mismatch
    code, _, err = run(capsys, "eval", "--model", str(model),
                       "--point", "1.0,2.0")
    assert code == 2

    # nonpositive inline point in linear space
    code, _, err = run(capsys, "eval", "--model", str(model),
                       "--point", "-1.0")
    assert code == 2 and "positive" in err

    # missing model file
    code, _, err = run(capsys, "eval", "--model", str(tmp_path / "no.model"),
                       "--point", "1.0")
    assert code == 2

    # argparse rejections: unknown class, missing subcommand, bad flag
    assert cli.main(["fit", "--input", good, "--class", "nope",
                     "--order", "1", "--out", "x"]) == 2
    assert cli.main([]) == 2
    assert cli.main(["fit", "--frobnicate"]) == 2
    capsys.readouterr()


def test_numerical_failure_maps_to_exit_3(tmp_path, capsys, monkeypatch):
    src = write_log_csv(tmp_path / "d.csv", abs)

    def exploding_fit(data, spec):
        raise NumericalError("injected failure")

    monkeypatch.setattr(cli, "fit", exploding_fit)
    code, _, err = run(capsys, "fit", "--input", src, "--space", "log",
                       "--class", "ma", "--order", "1",
                       "--out", str(tmp_path / "x.model"))
    assert code == 3
    assert "numerical failure" in err
