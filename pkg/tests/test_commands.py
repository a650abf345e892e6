import json
from io import StringIO
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

import persistlab
from persistlab.filtration import PointCloud, complex_from_simplices, validate_monotone
from persistlab.io_utils import (
    read_barcode_json,
    read_filtration_json,
    write_barcode_json,
    write_filtration_json,
    write_points_csv,
)
from persistlab.multigrid import SignedBarcode
from persistlab.persistence1 import Bar, Barcode
from tests.factories import generic_cloud

FIXTURE = Path(persistlab.__file__).parent / "fixtures" / "indecomposable_3x3.json"
FILLED_TRIANGLE = validate_monotone([0, 0, 0, 1, 2, 3, 4], complex_from_simplices([(0, 1, 2)]))
TIED_TRIANGLE = validate_monotone([0, 0, 0, 1, 1, 1, 2], complex_from_simplices([(0, 1, 2)]))


def run(name, *args):
    out = StringIO()
    call_command(name, *args, stdout=out, stderr=StringIO())
    return out.getvalue()


@pytest.fixture
def two_points(tmp_path):
    return write_points_csv(PointCloud([[0.0, 0.0], [2.0, 0.0]]), tmp_path / "pontos.csv")


@pytest.fixture
def triangle(tmp_path):
    return write_filtration_json(FILLED_TRIANGLE, tmp_path / "triangulo.json")


def test_rips_two_points(two_points, tmp_path):
    out = tmp_path / "rips.json"
    run("rips", f"--points={two_points}", f"--out={out}")
    filtration = read_filtration_json(out)
    assert filtration.complex.simplices == ((0,), (1,), (0, 1))
    assert filtration.values.ravel().tolist() == [0.0, 0.0, 2.0]


def test_rips_maxdim_zero(two_points, tmp_path):
    out = tmp_path / "rips.json"
    run("rips", f"--points={two_points}", "--maxdim=0", f"--out={out}")
    assert len(read_filtration_json(out)) == 2


def test_rips_usage_errors(two_points, tmp_path):
    empty = tmp_path / "vazio.csv"
    empty.write_text("")
    with pytest.raises(CommandError) as exc:
        run("rips", f"--points={empty}", f"--out={tmp_path / 'x.json'}")
    assert exc.value.returncode == 2

    with pytest.raises(CommandError) as exc:
        run("rips", f"--points={two_points}", "--maxdim=-1", f"--out={tmp_path / 'x.json'}")
    assert exc.value.returncode == 2


def test_barcode_of_filled_triangle(triangle, tmp_path):
    out = tmp_path / "h1.json"
    svg = tmp_path / "h1.svg"
    stdout = run("barcode", f"--filt={triangle}", "--degree=1", f"--out={out}", f"--svg={svg}")
    assert read_barcode_json(out) == Barcode(1, (Bar(3.0, 4.0),))
    assert 'id="bar-0"' in svg.read_text()
    assert "1 barras em grau 1" in stdout

    run("barcode", f"--filt={triangle}", "--degree=0", f"--out={out}")
    assert read_barcode_json(out) == Barcode(1, (Bar(0.0, None), Bar(0.0, 1.0), Bar(0.0, 2.0)))


def test_barcode_of_triangle_with_tied_edges(tmp_path):
    filt = write_filtration_json(TIED_TRIANGLE, tmp_path / "empates.json")
    out = tmp_path / "bar.json"
    run("barcode", f"--filt={filt}", "--degree=0", f"--out={out}")
    assert read_barcode_json(out) == Barcode(1, (Bar(0.0, None), Bar(0.0, 1.0), Bar(0.0, 1.0)))

    run("barcode", f"--filt={filt}", "--degree=1", f"--out={out}")
    assert read_barcode_json(out) == Barcode(1, (Bar(1.0, 2.0),))


def test_barcode_above_complex_dimension_is_empty(triangle, tmp_path):
    out = tmp_path / "h5.json"
    run("barcode", f"--filt={triangle}", "--degree=5", f"--out={out}")
    assert read_barcode_json(out) == Barcode(1)


def test_barcode_errors(tmp_path):
    broken = tmp_path / "quebrado.json"
    broken.write_text("{")
    with pytest.raises(CommandError) as exc:
        run("barcode", f"--filt={broken}", f"--out={tmp_path / 'x.json'}")
    assert exc.value.returncode == 2

    two_parameters = validate_monotone([[0, 0], [0, 0], [1, 1]], complex_from_simplices([(0, 1)]))
    path = write_filtration_json(two_parameters, tmp_path / "bifiltracao.json")
    with pytest.raises(CommandError) as exc:
        run("barcode", f"--filt={path}", f"--out={tmp_path / 'x.json'}")
    assert exc.value.returncode == 1


def test_distance_commands(tmp_path):
    a = write_barcode_json(Barcode(1, (Bar(0.0, 4.0),)), tmp_path / "a.json")
    empty = write_barcode_json(Barcode(1), tmp_path / "vazio.json")

    assert run("distance", f"--a={a}", f"--b={a}").strip() == "0"
    assert run("distance", f"--a={a}", f"--b={empty}").strip() == "2"
    assert run("distance", f"--a={a}", f"--b={empty}", "--metric=dist1").strip() == "2"

    value, witness = run("distance", f"--a={a}", f"--b={empty}", "--witness").splitlines()
    assert value == "2"
    assert json.loads(witness) == {"pairs": [], "unmatched_a": [0], "unmatched_b": []}


def test_distance_signed_metric(tmp_path):
    hook = Bar((0.0, 0.0), (3.0, 1.0))
    s = write_barcode_json(SignedBarcode(2, (hook,)), tmp_path / "s.json")
    zero = write_barcode_json(SignedBarcode(2), tmp_path / "zero.json")
    assert run("distance", f"--a={s}", f"--b={zero}", "--metric=signed").strip() == "0.5"

    unsigned = write_barcode_json(Barcode(2), tmp_path / "u.json")
    with pytest.raises(CommandError) as exc:
        run("distance", f"--a={s}", f"--b={unsigned}")
    assert exc.value.returncode == 1


def test_signed_barcode_of_fixture(tmp_path):
    out = tmp_path / "assinado.json"
    svg = tmp_path / "assinado.svg"
    stdout = run("signed_barcode", f"--module={FIXTURE}", f"--out={out}", f"--svg={svg}")
    S = read_barcode_json(out)
    assert isinstance(S, SignedBarcode)
    assert S.negative
    assert "comprimento 1" in stdout
    assert "indecomponível" in stdout
    assert svg.exists()


def test_signed_barcode_marks_sampled_verdict(monkeypatch, tmp_path):
    monkeypatch.setattr("persistlab.multigrid.ENDOMORPHISM_ENUMERATION_DIM", 0)
    stdout = run("signed_barcode", f"--module={FIXTURE}", f"--out={tmp_path / 's.json'}")
    assert "indecomponível (amostrado" in stdout


def test_optimize_writes_artifacts(settings, tmp_path):
    settings.PERSISTLAB_SEED = None
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"r": 6, "steps": 3, "seed": 1}))
    out_dir = tmp_path / "execucao"
    stdout = run("optimize", f"--config={config}", f"--out-dir={out_dir}")

    assert "r=6, seed=1" in stdout
    trace = pd.read_csv(out_dir / "trace.csv")
    assert list(trace.columns) == ["step", "F", "grad_norm", "sup_norm"]
    assert trace["step"].tolist() == [0, 1, 2]
    for name in ("initial", "final"):
        assert (out_dir / f"{name}_points.csv").exists()
        assert (out_dir / f"{name}_barcode.json").exists()
        assert (out_dir / f"{name}_barcode.svg").exists()


def test_optimize_rejects_invalid_config(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"gamma": 2.0}))
    with pytest.raises(CommandError) as exc:
        run("optimize", f"--config={config}", f"--out-dir={tmp_path}")
    assert exc.value.returncode == 2


def test_check_grad_on_generic_cloud(tmp_path):
    cloud = generic_cloud(np.random.default_rng(21), 8)
    points = write_points_csv(cloud, tmp_path / "pontos.csv")
    lifted = tmp_path / "lift.json"
    jacobian = tmp_path / "jacobiana.csv"
    stdout = run("check_grad", f"--points={points}", "--degree=0", f"--lifted={lifted}", f"--jacobian={jacobian}")
    assert float(stdout.split()[0]) <= 1e-6
    assert json.loads(lifted.read_text())["n"] == 1
    assert pd.read_csv(jacobian, header=None).shape[1] == cloud.m


def test_check_grad_usage_errors(tmp_path):
    points = write_points_csv(generic_cloud(np.random.default_rng(22), 5), tmp_path / "pontos.csv")
    for option in ("--eps=0", "--tol=-1", "--degree=-1"):
        with pytest.raises(CommandError) as exc:
            run("check_grad", f"--points={points}", option)
        assert exc.value.returncode == 2
