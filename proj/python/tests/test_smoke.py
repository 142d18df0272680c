import math

import numpy as np
import pytest

import ndjac


def test_formulas():
    assert ndjac.tau(2, 3) == -3.0
    assert math.exp(ndjac.mv_gamma_log(1, 1, 0.5)) == pytest.approx(math.sqrt(math.pi))
    assert math.exp(ndjac.stiefel_volume_log(1, 3, 1)) == pytest.approx(4 * math.pi)
    v = ndjac.factor_log("mp-herm", beta=1, m=2, q=1, lambda_=[2.0])
    assert math.exp(v) == pytest.approx(0.0625)
    assert math.exp(ndjac.factor_log("congruence-ns", beta=1, m=2, det_b=2.0)) == pytest.approx(8.0)


def test_sdet_and_sampling():
    assert ndjac.sdet(np.diag([2.0, 3.0])) == pytest.approx(6.0)
    h = ndjac.sample_stiefel(4, 2, beta=2, seed=3)
    assert h.shape == (4, 2, 2)
    c = h[..., 0] + 1j * h[..., 1]
    assert np.allclose(c.conj().T @ c, np.eye(2), atol=1e-10)


def test_psd_density_closed_form():
    s11, s12 = 1.3, 0.8
    s = np.array([[s11, s12], [s12, s12 * s12 / s11]])
    a, b = -s12 * s12 / s11**2, 2 * s12 / s11
    closed = math.sqrt((1 + a * a) * (2 + b * b) - a * a * b * b)
    assert ndjac.hausdorff_density_psd(s, 1) == pytest.approx(closed, rel=1e-7)


def test_verify_chart_task():
    report = ndjac.verify("mp-herm", beta=2, m=3, q=2, points=5, seed=7)
    assert report["pass"] is True
    assert report["engine"] == "chart"
    assert len(report["records"]) == 5


def test_errors_surface_as_exceptions():
    with pytest.raises(ndjac.Error, match="octonion"):
        ndjac.verify("sd", beta=8, m=2, q=1)
    with pytest.raises(ndjac.Error):
        ndjac.verify("sd", colour="blue")
