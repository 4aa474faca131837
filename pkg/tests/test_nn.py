import numpy as np
import pytest

from isl_lab.nn import Generator, OptimizerState
from isl_lab.rng import make_rng


def test_init_shapes_and_dims():
    g = Generator.init((2, 5, 3), make_rng(0, 2))
    assert g.latent_dim == 2 and g.output_dim == 3
    assert g.weights[0].shape == (2, 5) and g.biases[1].shape == (3,)
    assert all(np.all(b == 0) for b in g.biases)


def test_forward_matches_numpy_oracle():
    for act in ("elu", "tanh", "relu"):
        g = Generator.init((3, 8, 4, 2), make_rng(7, 2), act)
        z = make_rng(7, 3).standard_normal((11, 3))
        out, params = g.forward(z)
        np.testing.assert_allclose(out.data, g.forward_numpy(z), atol=1e-12)
        assert len(params) == 2 * len(g.weights)


def test_forward_validates_latent_dim():
    g = Generator.init((2, 4, 1), make_rng(0, 2))
    with pytest.raises(ValueError):
        g.forward(np.ones((5, 3)))


def test_forward_accepts_flat_1d_latent():
    g = Generator.init((1, 4, 1), make_rng(0, 2))
    out, _ = g.forward(np.linspace(-1, 1, 7))
    assert out.data.shape == (7, 1)


def test_copy_is_independent():
    g = Generator.init((1, 3, 1), make_rng(1, 2))
    h = g.copy()
    h.weights[0][0, 0] += 1.0
    assert g.weights[0][0, 0] != h.weights[0][0, 0]


def test_checkpoint_roundtrip(tmp_path):
    g = Generator.init((2, 6, 2), make_rng(3, 2), "tanh")
    path = tmp_path / "ck.json"
    g.save(path)
    h = Generator.load(path)
    assert h.layer_sizes == g.layer_sizes and h.activation == "tanh"
    for a, b in zip(g.parameters(), h.parameters()):
        np.testing.assert_allclose(a, b)


def test_checkpoint_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"format": "something-else"}')
    with pytest.raises(ValueError):
        Generator.load(path)


def test_generator_validation():
    with pytest.raises(ValueError):
        Generator.init((2, 3, 1), make_rng(0, 2), "gelu")
    with pytest.raises(ValueError):
        Generator((1,), [], [])
    g = Generator.init((1, 2, 1), make_rng(0, 2))
    g.weights[0][0, 0] = np.nan
    with pytest.raises(ValueError):
        Generator(g.layer_sizes, g.weights, g.biases)


def test_sgd_step_oracle():
    p = np.array([1.0, 2.0])
    opt = OptimizerState(kind="sgd", learning_rate=0.1)
    opt.step([p], [np.array([1.0, -1.0])])
    np.testing.assert_allclose(p, [0.9, 2.1])


def test_adam_first_step_oracle():
    # with bias correction the first step has magnitude ~lr regardless of g
    p = np.array([0.0])
    g = np.array([7.3])
    opt = OptimizerState(kind="adam", learning_rate=0.05)
    opt.step([p], [g])
    assert p[0] == pytest.approx(-0.05, rel=1e-6)


def test_adam_converges_on_quadratic():
    p = np.array([5.0])
    opt = OptimizerState(kind="adam", learning_rate=0.1)
    for _ in range(500):
        opt.step([p], [2 * p])
    assert abs(p[0]) < 1e-3


def test_optimizer_validation():
    with pytest.raises(ValueError):
        OptimizerState(kind="lbfgs")
    with pytest.raises(ValueError):
        OptimizerState(learning_rate=0)
    opt = OptimizerState()
    with pytest.raises(FloatingPointError):
        opt.step([np.array([1.0])], [np.array([np.nan])])
    with pytest.raises(ValueError):
        opt.step([np.array([1.0])], [])
