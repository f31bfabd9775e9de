import numpy as np
import pytest

import rwf


def test_sample_complexity():
    assert rwf.sample_complexity() == 229


def test_mother_wavelets():
    u = np.array([[0.0], [0.25], [0.75], [2.0]])
    haar = rwf.eval_mother("haar", u)
    np.testing.assert_array_equal(haar, [1.0, 1.0, -1.0, 0.0])
    mh = rwf.eval_mother("mexican_hat", np.zeros((1, 1)))
    assert mh[0] == pytest.approx(0.86732507058407752, rel=1e-12)
    with pytest.raises(ValueError):
        rwf.eval_mother("shannon", u)


def test_features_and_kernel():
    fm = rwf.FeatureMap.sample_rwf("mexican_hat", 0.1, 1.0, [-1.0], [1.0], 4000, seed=3)
    x = np.linspace(-0.5, 0.5, 7)[:, None]
    z = fm.featurize(x)
    assert z.shape == (7, 4000)
    np.testing.assert_array_equal(z, fm.featurize(x, workers=3))
    k = rwf.wavelet_kernel("mexican_hat", 0.1, 1.0, [-1.0], [1.0], [0.1], [0.2])
    assert abs(z[3] @ z[3] - rwf.wavelet_kernel("mexican_hat", 0.1, 1.0, [-1.0], [1.0], [0.0], [0.0])) < 0.1
    assert np.isfinite(k)
    back = rwf.FeatureMap.from_json(fm.to_json())
    np.testing.assert_array_equal(back.scales, fm.scales)


def test_duality():
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((15, 6))
    y = rng.standard_normal(15)
    s2 = 0.3
    post = rwf.blr_fit(Z, y, s2)
    Zs = rng.standard_normal((4, 6))
    mean, var = post.predict(Zs)
    K = Z @ Z.T + s2 * np.eye(15)
    Ks = Zs @ Z.T
    np.testing.assert_allclose(mean, Ks @ np.linalg.solve(K, y), atol=1e-10)
    np.testing.assert_allclose(var, np.diag(Zs @ Zs.T - Ks @ np.linalg.solve(K, Ks.T)) + s2, atol=1e-10)
    sign, logdet = np.linalg.slogdet(K)
    dense = -0.5 * y @ np.linalg.solve(K, y) - 0.5 * logdet - 7.5 * np.log(2 * np.pi)
    assert rwf.blr_log_marginal(Z, y, s2) == pytest.approx(dense, abs=1e-9)


@pytest.mark.parametrize("method", ["rwf", "rff", "exact"])
def test_fit_predict_save_load(tmp_path, method):
    xtr, ytr, xte, yte = rwf.gen_multistep(300, 100, seed=5)
    cfg = {"D": 40, "optimizer": {"budget": 30}}
    model = rwf.Model.fit(xtr, ytr, method, cfg)
    assert model.method == method
    assert np.isfinite(model.log_marginal)
    mean, var = model.predict(xte)
    assert np.sqrt(np.mean((mean - yte) ** 2)) < 0.6 * np.std(yte)
    assert np.all(var > 0)
    path = tmp_path / "model.json"
    model.save(path)
    back = rwf.Model.load(path)
    m2, v2 = back.predict(xte)
    np.testing.assert_array_equal(mean, m2)
    np.testing.assert_array_equal(var, v2)
    again = rwf.Model.fit(xtr, ytr, method, cfg)
    np.testing.assert_array_equal(again.predict(xte)[0], mean)


def test_verify_and_benchmark():
    reports = rwf.verify(only=["unbiasedness", "moment_cancellation"])
    assert [r["name"] for r in reports] == ["unbiasedness", "moment_cancellation"]
    assert all(r["passed"] for r in reports)
    with pytest.raises(ValueError):
        rwf.verify(only=["nonsense"])
    doc = rwf.benchmark({"dataset": {"n_train": 150, "n_test": 50}, "D": 20, "repeats": 2,
                         "optimizer": {"budget": 20}})
    assert len(doc["rows"]) == 4
    assert {a["method"] for a in doc["aggregate"]} == {"rwf", "rff"}
    with pytest.raises(ValueError):
        rwf.benchmark({"D": 0})
