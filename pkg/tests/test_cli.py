import json

import pytest

from kikuchi.cli import main


def _json(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_generate_detect_recover(tmp_path, capsys):
    path = str(tmp_path / "i.bin")
    assert main(["generate", "--n", "12", "--p", "4", "--lam", "3", "--seed", "2", "--out", path]) == 0
    capsys.readouterr()
    assert main(["detect", path, "--ell", "2"]) == 0
    rep = _json(capsys)
    assert rep["verdict"] == "planted" and rep["threshold"] == pytest.approx(3 * 45 / 2)
    assert main(["recover", path, "--ell", "2"]) == 0
    rep = _json(capsys)
    assert rep["corr"] > 0.9 and len(rep["x_hat"]) == 12


def test_refute_and_certify(tmp_path, capsys):
    f = str(tmp_path / "f.txt")
    assert main(["generate", "--kind", "formula", "--n", "10", "--k", "2", "--m", "40", "--out", f]) == 0
    capsys.readouterr()
    assert main(["refute-xor", f, "--ell", "1", "--beta", "0.5"]) == 0
    rep = _json(capsys)
    assert set(rep) >= {"m", "bound", "ratio", "converged"} and rep["m"] == 40
    d = str(tmp_path / "d.bin")
    assert main(["generate", "--kind", "sign-tensor", "--n", "6", "--p", "3", "--out", d]) == 0
    capsys.readouterr()
    assert main(["certify-odd", d, "--ell", "2", "--brute-force"]) == 0
    rep = _json(capsys)
    assert rep["bound"] >= rep["brute_force"]


def test_spectrum_csv(capsys):
    assert main(["spectrum", "--n", "6", "--p", "4", "--ell", "2"]) == 0
    assert capsys.readouterr().out.splitlines() == ["m,mu,dim", "0,6,1", "1,-3,5", "2,1,9"]


def test_sweep(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    out = tmp_path / "o.csv"
    cfg.write_text(json.dumps({"schema": 1, "task": "detect", "trials": 2,
                               "grid": {"n": [12], "p": [4], "ell": [2], "lam": [2.0]}}))
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--seed", "4"]) == 0
    assert _json(capsys)["trials"] == 2
    assert len(out.read_text().splitlines()) == 4


def test_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"task": "detect", "grid": {"n": [12]}}))
    assert main(["sweep", "--config", str(cfg)]) == 2
    assert main(["spectrum", "--n", "6", "--p", "3", "--ell", "2"]) == 2
    assert main(["detect", str(tmp_path / "missing.bin"), "--ell", "2"]) == 2
    d = str(tmp_path / "d.bin")
    main(["generate", "--kind", "sign-tensor", "--n", "12", "--p", "3", "--out", d])
    assert main(["certify-odd", d, "--ell", "6"]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["detect"])
    assert exc.value.code == 2
