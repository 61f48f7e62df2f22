"""Smoke tests for the aeplab Python module (built from the C++ core)."""

import math

import pytest

import aeplab

IID_09 = '{"type":"iid","site_density":[[0.9,0.0],[0.0,0.1]]}'
PERIOD2 = (
    '{"type":"markov","transition":'
    "[[0.0,0.0,0.7,0.3],[0.0,0.0,0.3,0.7],[0.7,0.3,0.0,0.0],[0.3,0.7,0.0,0.0]]}"
)
DRESSED = (
    '{"type":"dressed","transition":[[0.8,0.2],[0.2,0.8]],'
    '"unitary":[[0.7071067811865476,0.7071067811865476],'
    "[0.7071067811865476,-0.7071067811865476]]}"
)

S_IID = 0.3250829733914482  # -0.9 ln 0.9 - 0.1 ln 0.1


@pytest.fixture
def iid():
    return aeplab.parse_model(IID_09)


def test_model_introspection(iid):
    assert iid.site_dim == 2
    assert iid.diagonal_blocks is True
    assert len(iid.hash) == 16
    assert iid.hash in repr(iid)
    assert aeplab.parse_model(IID_09).hash == iid.hash


def test_entropies(iid):
    assert aeplab.mean_entropy(iid) == pytest.approx(S_IID, abs=1e-14)
    assert aeplab.block_entropy(iid, 4) == pytest.approx(4 * S_IID, abs=1e-12)
    spectrum = aeplab.block_spectrum(iid, 2)
    assert spectrum == pytest.approx([0.81, 0.09, 0.09, 0.01], abs=1e-13)


def test_beta(iid):
    result = aeplab.beta(iid, 12, 0.1)
    assert result["count"] == 108
    assert result["rate"] == pytest.approx(math.log(108) / 12, abs=1e-13)
    assert result["epsilon"] == 0.1


def test_sweep_schema(iid):
    report = aeplab.sweep(iid, n_max=12)
    assert report["command"] == "sweep"
    assert len(report["rows"]) == 12
    row = report["rows"][-1]
    assert set(row["betas"]) == {"0.1", "0.01"}
    assert set(row["typical"]["verdicts"]) == {"mass_ok", "window_ok", "dim_ok"}
    trend = next(t for t in report["trends"] if t["epsilon"] == "0.1")
    assert trend["n_first"] == 4
    assert trend["n_last"] == 12
    assert trend["deviation_shrinks"] is True


def test_analyze_empty_window_is_null(iid):
    report = aeplab.analyze(iid, n=8, delta=0.05)
    assert report["rows"][0]["typical"]["log_dim"] is None
    assert report["rows"][0]["typical"]["count"] == 0


def test_decompose_period2():
    model = aeplab.parse_model(PERIOD2)
    report = aeplab.decompose(model, l_max=4)
    assert report["period"] == 2
    row = report["rows"][1]
    assert row["l"] == 2
    assert row["k"] == 2
    assert row["equal_entropy"] is True
    assert row["atypical_fraction"] == 0.0
    assert report["rows"][2]["k"] == 1


def test_compress_determinism(iid):
    a = aeplab.compress(iid, n=8, delta=0.25, delta_prime=0.25, trials=300, seed=5)
    b = aeplab.compress(iid, n=8, delta=0.25, delta_prime=0.25, trials=300, seed=5)
    assert a == b
    assert a["code_dim"] == 9
    assert a["seed"] == 5
    c = aeplab.compress(iid, n=8, delta=0.25, delta_prime=0.25, trials=300, seed=6)
    assert c["mean_fidelity"] != a["mean_fidelity"]


def test_error_types(iid):
    with pytest.raises(aeplab.ContractError):
        aeplab.parse_model('{"type":"iid"}')
    with pytest.raises(aeplab.ParameterError):
        aeplab.load_model("/nonexistent/model.json")
    with pytest.raises(aeplab.CapacityError):
        aeplab.block_entropy(iid, 50)
    with pytest.raises(aeplab.UnsupportedError):
        aeplab.compress(aeplab.parse_model(DRESSED), n=2, delta=0.7, delta_prime=0.7)


def test_selftest():
    report = aeplab.selftest()
    assert report["all_passed"] is True
    assert len(report["suites"]) == 6
