"""Optimizer updates, ledger accounting exactness, and the epoch loop."""

import numpy as np
import pytest

from qmlfinder import (
    ANGLE,
    BASIC_ENTANGLER,
    BudgetLedger,
    CircuitSpec,
    OptimizerConfig,
    PortableRng,
    QNNClassifier,
    init_opt_state,
    step,
    train_epochs,
)
from qmlfinder.rng import derive_seed

from oracles import qnn_fit_cost


# -- optimizer steps -----------------------------------------------------------


def test_vanilla_step():
    state = init_opt_state(OptimizerConfig(learning_rate=0.1), 1)
    w, _ = step(state, np.array([1.0]), np.array([2.0]), OptimizerConfig(learning_rate=0.1))
    np.testing.assert_allclose(w, [0.8])


def test_zero_gradient_leaves_weights_unchanged():
    for kind in ("vanilla_gd", "momentum_gd", "adam"):
        config = OptimizerConfig(kind=kind, learning_rate=0.3, momentum=0.5)
        state = init_opt_state(config, 3)
        w0 = np.array([1.0, -2.0, 0.5])
        w1, state = step(state, w0, np.zeros(3), config)
        np.testing.assert_array_equal(w1, w0)  # adam included: moments stay exactly 0


def test_momentum_two_steps_match_hand_unrolled():
    # v1 = 0.5*0 + 2 = 2, w1 = 1 - 0.1*2 = 0.8
    # v2 = 0.5*2 + 2 = 3, w2 = 0.8 - 0.1*3 = 0.5
    config = OptimizerConfig(kind="momentum_gd", learning_rate=0.1, momentum=0.5)
    state = init_opt_state(config, 1)
    w = np.array([1.0])
    g = np.array([2.0])
    w, state = step(state, w, g, config)
    np.testing.assert_allclose(w, [0.8])
    w, state = step(state, w, g, config)
    np.testing.assert_allclose(w, [0.5])


def test_adam_first_step_matches_hand_computation():
    # m=0.2, v=0.004, m_hat=2, v_hat=4 -> w = 1 - 0.1 * 2/(2 + 1e-8)
    config = OptimizerConfig(kind="adam", learning_rate=0.1)
    state = init_opt_state(config, 1)
    w, _ = step(state, np.array([1.0]), np.array([2.0]), config)
    np.testing.assert_allclose(w, [1.0 - 0.1 * 2.0 / (2.0 + 1e-8)], atol=1e-15)


def test_step_rejects_bad_input():
    config = OptimizerConfig()
    state = init_opt_state(config, 2)
    with pytest.raises(ValueError):
        step(state, np.zeros(2), np.zeros(3), config)
    with pytest.raises(ValueError):
        step(state, np.zeros(2), np.array([np.nan, 0.0]), config)


def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        OptimizerConfig(kind="momentum_gd", momentum=1.0)
    with pytest.raises(ValueError):
        OptimizerConfig(kind="sgd_magic")


def test_vanilla_descent_converges_on_quadratic():
    # f(w) = |w|^2, grad = 2w
    config = OptimizerConfig(learning_rate=0.1)
    state = init_opt_state(config, 2)
    w = np.array([1.0, 1.0])
    for _ in range(100):
        w, state = step(state, w, 2.0 * w, config)
    assert np.linalg.norm(w) < 1e-4


# -- ledger --------------------------------------------------------------------


def test_ledger_total_is_sum_and_merge_adds():
    a, b = BudgetLedger(), BudgetLedger()
    a.training_gradients.increment(10)
    a.scoring.increment(4)
    b.kernel.increment(7)
    b.training_forward.increment(1)
    a.merge(b)
    assert a.as_dict() == {
        "training_gradients": 10,
        "training_forward": 1,
        "scoring": 4,
        "kernel": 7,
        "total": 22,
    }


# -- train_epochs accounting and control flow -----------------------------------


def _fit_qnn(n_samples, batch_size, n_epochs, n_layers, threshold):
    """1-wire circuit with n_layers params on synthetic two-class data.

    Samples come in duplicate pairs carrying both labels, so accuracy is
    pinned at exactly 0.5 and a threshold of 1.0 is never reached.
    """
    circuit = CircuitSpec(1, ANGLE, (BASIC_ENTANGLER,) * n_layers)
    rng = PortableRng(1)
    X, y = [], []
    for i in range(n_samples // 2):
        value = rng.uniform(-2, 2)
        X += [[value], [value]]
        y += [0, 1]
    model = QNNClassifier(
        circuit,
        batch_size=batch_size,
        n_epochs=n_epochs,
        accuracy_threshold=threshold,
        seed=0,
    )
    ledger = BudgetLedger()
    model.fit(np.array(X), np.array(y), ledger)
    return model, ledger


@pytest.mark.parametrize("p", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [8, 20])
@pytest.mark.parametrize("b", [4, 20])
@pytest.mark.parametrize("e", [0, 1, 2, 3])
def test_cost_model_exact_over_sweep(p, n, b, e):
    model, ledger = _fit_qnn(n, b, e, p, threshold=1.0)  # unreachable: all epochs run
    gradients, scoring = qnn_fit_cost(p, n, e)
    assert ledger.training_gradients.total_calls == gradients
    assert ledger.scoring.total_calls == scoring
    assert ledger.training_forward.total_calls == 0
    assert ledger.total == gradients + scoring


def test_threshold_zero_stops_at_precheck():
    model, ledger = _fit_qnn(12, 4, 5, 2, threshold=0.0)
    assert model.epochs_run == 0
    assert ledger.total == 12  # exactly N scoring calls
    assert ledger.as_dict()["scoring"] == 12


def test_zero_epochs_leaves_weights_unchanged():
    circuit = CircuitSpec(1, ANGLE, (BASIC_ENTANGLER,))
    model = QNNClassifier(circuit, batch_size=4, n_epochs=0, accuracy_threshold=1.0, seed=3)
    before = model.weights.copy()
    ledger = BudgetLedger()
    model.fit(np.array([[0.1], [0.9], [-0.4], [1.2]]), np.array([0, 1, 0, 1]), ledger)
    np.testing.assert_array_equal(model.weights, before)
    assert ledger.total == 4


def test_ledger_example_p4_n20_b20_e2():
    _, ledger = _fit_qnn(20, 20, 2, 4, threshold=1.0)
    assert ledger.training_gradients.total_calls == 2 * 4 * 20 * 2 == 320
    assert ledger.scoring.total_calls == 20 * 3 == 60


def test_batch_order_deterministic_and_epoch_indexed():
    # same seed/epoch -> same permutation; different epoch -> different stream
    order1 = list(range(10))
    order2 = list(range(10))
    PortableRng(derive_seed(5, 1)).shuffle(order1)
    PortableRng(derive_seed(5, 1)).shuffle(order2)
    assert order1 == order2
    order3 = list(range(10))
    PortableRng(derive_seed(5, 2)).shuffle(order3)
    assert order1 != order3


def test_train_epochs_threshold_unreachable_runs_all():
    def forward(w, x, counter):
        counter.increment()
        return float(w[0])

    def gradient(w, x, counter):
        counter.increment(2)
        return np.array([1.0])

    ledger = BudgetLedger()
    result = train_epochs(
        weights=[0.0],
        X=np.zeros((6, 1)),
        targets=np.zeros(6),
        forward_one=forward,
        gradient_one=gradient,
        score_fn=lambda v, t: 0.5,
        ledger=ledger,
        opt_config=OptimizerConfig(learning_rate=0.1),
        batch_size=4,  # last partial batch (2 samples) is kept
        n_epochs=3,
        threshold=1.1,
        seed=0,
    )
    assert result.epochs_run == 3
    assert ledger.training_gradients.total_calls == 2 * 1 * 6 * 3
    assert ledger.scoring.total_calls == 6 * 4


def test_train_epochs_stops_when_threshold_met():
    calls = {"n": 0}

    def score(values, targets):
        calls["n"] += 1
        return 1.0 if calls["n"] >= 3 else 0.0  # met after epoch 2's check

    result = train_epochs(
        weights=[0.0],
        X=np.zeros((4, 1)),
        targets=np.zeros(4),
        forward_one=lambda w, x, c: (c.increment(), 0.0)[1],
        gradient_one=lambda w, x, c: (c.increment(2), np.array([0.1]))[1],
        score_fn=score,
        ledger=BudgetLedger(),
        opt_config=OptimizerConfig(),
        batch_size=2,
        n_epochs=9,
        threshold=1.0,
        seed=0,
    )
    assert result.epochs_run == 2
