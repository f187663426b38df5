import math
import os

import numpy as np
import pytest

import qspike


def test_rx_expectation_is_cosine():
    for w in (0.0, 0.4, 1.3, math.pi):
        s = qspike.StateVector.zero(1).rx(0, w)
        assert s.expectation_z(0) == pytest.approx(math.cos(w), abs=1e-12)


def test_bell_state_amplitudes():
    s = qspike.StateVector.zero(2).hadamard(0).cnot(0, 1)
    amps = s.amplitudes
    assert np.allclose(np.abs(amps) ** 2, [0.5, 0, 0, 0.5])
    assert s.norm_squared() == pytest.approx(1.0)


def test_vqc_gradient_matches_finite_difference():
    rng = np.random.default_rng(0)
    omega = rng.uniform(-1, 1, 6)
    theta = rng.uniform(-1, 1, 24)
    up = rng.uniform(-1, 1, 6)
    d_theta, d_omega = qspike.vqc_gradient(omega, theta, 2, up)
    eps = 1e-5
    for i in range(0, 24, 5):
        tp, tm = theta.copy(), theta.copy()
        tp[i] += eps
        tm[i] -= eps
        fd = (up @ qspike.vqc_forward(omega, tp, 2) - up @ qspike.vqc_forward(omega, tm, 2)) / (2 * eps)
        assert d_theta[i] == pytest.approx(fd, abs=1e-6)
    assert d_omega.shape == (6,)


def test_noise_and_errors():
    img = np.full(784, 0.5)
    out = qspike.corrupt(img, "salt_pepper:p=1", seed=3)
    assert set(np.unique(out)) <= {0.0, 1.0}
    assert np.array_equal(qspike.corrupt(img, "gaussian:sigma=0"), img)
    assert qspike.normalize_noise_spec("perlin:res=14") == "perlin:res=14"
    with pytest.raises(qspike.ArgumentError):
        qspike.corrupt(img, "speckle:p=0.1")
    with pytest.raises(qspike.ShapeError):
        qspike.corrupt(np.zeros(10), "none")


def test_spike_rate_tracks_relu():
    rate = qspike.pooled_spike_rate(np.array([-1.0, 0.25, 0.9]), steps=20000, seed=1)
    assert rate[0] == 0.0
    assert rate[1] == pytest.approx(0.25, abs=0.02)
    assert np.array_equal(qspike.expected_rate(np.array([-1.0, 0.25, 3.0])), [0.0, 0.25, 1.0])


def test_model_predict_and_checkpoint(tmp_path):
    m = qspike.create_model(input=16, n_qubits=3, n_layers=1, n_classes=3, seed=4)
    x = np.random.default_rng(1).uniform(0, 1, (5, 16))
    p = m.probabilities(x[0])
    assert p.sum() == pytest.approx(1.0)
    preds = m.predict(x)
    assert len(preds) == 5
    path = tmp_path / "m.ckpt"
    qspike.save_checkpoint(m, path, seed=9)
    back = qspike.load_checkpoint(path)
    assert back.parameter_count == m.parameter_count
    assert np.array_equal(back.probabilities(x[1]), m.probabilities(x[1]))
    path.write_bytes(b"garbage")
    with pytest.raises(qspike.FormatError):
        qspike.load_checkpoint(path)


def test_metrics_and_loss():
    assert qspike.cross_entropy(np.full(4, 0.25), 0) == pytest.approx(2.2493, abs=1e-4)
    b = qspike.metric_bundle([0, 1, 1, 0], [0, 1, 0, 0], 2)
    assert 0 <= b["acc"] <= 1 and b["ppv"] == pytest.approx(0.75)
    r = qspike.wilcoxon(np.array([1.5, -0.3, 2.2, 0.8, -1.1, 0.4, 3.0, -0.2, 1.9, 0.6]), np.zeros(10))
    assert r["w"] == 9.0 and r["p"] == pytest.approx(0.064453125) and r["exact"]


def test_cli_usage_exit_code():
    code, _, err = qspike.run_cli(["eval", "--noise", "speckle:p=0.1", "--checkpoint", "x"])
    assert code == 2
    assert "unknown noise kind" in err


@pytest.mark.skipif(
    not os.path.exists(os.path.join(os.environ.get("QSPIKE_DATA_DIR", "/root/data"), "mnist", "t10k-labels-idx1-ubyte")),
    reason="MNIST not available",
)
def test_load_real_mnist():
    d = os.path.join(os.environ.get("QSPIKE_DATA_DIR", "/root/data"), "mnist")
    ds = qspike.load_idx(os.path.join(d, "t10k-images-idx3-ubyte"), os.path.join(d, "t10k-labels-idx1-ubyte"))
    assert len(ds) == 10000 and ds.images.shape == (10000, 784)
    four = qspike.filter_classes(ds, [6, 7, 8, 9])
    assert len(four) == 3969 and four.n_classes == 4
