import json
import math
import os

import numpy as np
import pytest

from tailcert.cli import main
from tailcert.util import canonical_json


def test_net_verb(tmp_path, capsys):
    out = str(tmp_path / "net.txt")
    code = main(["net", "--space", "sphere", "--dim", "2", "--epsilon", "0.5",
                 "--seed", "3", "--strategy", "angular_lattice",
                 "--probes", "20000", "--tolerance", "0.0", "--out", out])
    assert code == 0
    text = open(out).read()
    assert text.startswith("# space:")
    assert "pass" in capsys.readouterr().out


def test_run_emit_check_fit_pipeline(tmp_path, capsys):
    cfg = {
        "scenario": "gaussian-mean",
        "n_grid": [100, 1000, 10000],
        "t_grid": [round(1 + 0.5 * i, 2) for i in range(9)],
        "replicates": 20000,
        "seed": 5,
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    code = main(["run", str(cfg_path), "--out", str(tmp_path)])
    assert code == 0
    report_path = tmp_path / "gaussian-mean_report.json"
    assert report_path.exists()

    code = main(["emit", str(report_path), "--format", "csv",
                 "--out", str(tmp_path)])
    assert code == 0
    printed = capsys.readouterr().out.strip().splitlines()
    assert printed and printed[-1].endswith(".csv")

    # pull the certificate and a tail out of the report for check/fit verbs
    report = json.loads(report_path.read_text())
    cert_path = tmp_path / "cert.json"
    cert_path.write_text(canonical_json(report["certificates"][0]))
    tail_path = tmp_path / "tail.json"
    tail_path.write_text(canonical_json(report["tails"][0]))
    code = main(["check", "--cert", str(cert_path), "--tail", str(tail_path)])
    assert code == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["passed"]

    # a symbolic shape fits against the same tail
    from tailcert.catalog import sample_mean_cert
    from tailcert.sequences import LogNSeq

    shape = sample_mean_cert(2, LogNSeq(1.0))
    shape_path = tmp_path / "shape.json"
    shape_path.write_text(canonical_json(shape.to_document()))
    fitted_path = tmp_path / "fitted.json"
    code = main(["fit", "--cert", str(shape_path), "--tail", str(tail_path),
                 "--search", "hoeffding_c=0.001:10", "--out", str(fitted_path)])
    assert code == 0
    fitted = json.loads(fitted_path.read_text())
    assert fitted["constants_status"] == "concrete"


def test_run_exit_code_on_failure(tmp_path):
    # a quadratic-form run with an impossible coverage demand cannot fail,
    # so force failure through an unknown scenario config error instead
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({
        "scenario": "unknown-thing", "n_grid": [1], "t_grid": [1.0],
        "replicates": 1, "seed": 0}))
    assert main(["run", str(cfg_path)]) == 2


def test_check_verb_failing_certificate(tmp_path, capsys):
    from tailcert.certificates import TailCertificate
    from tailcert.ratefn import PowerRate
    from tailcert.sequences import ConstSeq, ConstSize, LogNSeq, SqrtRateOverNSize
    from tailcert.verify import estimate_tail

    class Var:
        joint = False

        def draw(self, n, count, rng):
            return np.abs(rng.standard_normal(count)) / math.sqrt(n)

        def digest(self):
            return "gm"

    size = SqrtRateOverNSize(LogNSeq(1.0))
    tail = estimate_tail(Var(), size, [100], [1.0, 1.5, 2.0], 50000, 0.01, 3)
    bad = TailCertificate(size=size, rate=LogNSeq(1.0), c1=0.01, c2=1.0,
                          n_threshold=1, f=PowerRate(0.5, 2.0))
    cert_path = tmp_path / "bad_cert.json"
    cert_path.write_text(canonical_json(bad.to_document()))
    tail_path = tmp_path / "tail.json"
    tail_path.write_text(canonical_json(tail.to_document()))
    assert main(["check", "--cert", str(cert_path),
                 "--tail", str(tail_path)]) == 1
