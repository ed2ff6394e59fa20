import numpy as np
import pytest

from offdetect.errors import DataError, NumericError
from offdetect.learn import (
    FeatureMatrix,
    logreg_loss_grad,
    predict,
    svm_objective,
    train_gnb,
    train_linear_svm,
    train_logreg,
    train_rlsc,
)
from offdetect.rks import median_heuristic_sigma, sample_map, transform


def blobs_fixture(n=50, dim=3, seed=42):
    rng = np.random.default_rng(seed)
    half = n // 2
    X = np.vstack(
        [
            rng.normal(loc=(1.2, 0.8, 0.0), scale=1.0, size=(half, dim)),
            rng.normal(loc=(-1.0, -0.6, 0.4), scale=1.0, size=(n - half, dim)),
        ]
    )
    y = np.array([1.0] * half + [-1.0] * (n - half))
    return X, y


XOR_X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
XOR_Y = np.array([-1.0, 1.0, 1.0, -1.0])


def train_accuracy(model, X, y):
    preds = predict(model, X)
    signs = np.array([1.0 if label == "OFF" else -1.0 for label, _ in preds])
    return float(np.mean(signs == y))


def batch_subgradient_svm_oracle(X, y, C, steps=200_000, step_scale=0.05):
    """Full-batch subgradient descent on the primal hinge objective; returns
    the best objective value seen (upper bound on the optimum)."""
    n, dim = X.shape
    w = np.zeros(dim)
    b = 0.0
    best = svm_objective(w, b, X, y, C)
    for t in range(1, steps + 1):
        margins = y * (X @ w + b)
        active = margins < 1.0
        gw = w - C * (X[active] * y[active, None]).sum(axis=0)
        gb = -C * float(y[active].sum())
        eta = step_scale / np.sqrt(t)
        w -= eta * gw
        b -= eta * gb
        best = min(best, svm_objective(w, b, X, y, C))
    return best


class TestRlsc:
    def test_separable_pair(self):
        X = np.array([[-1.0], [1.0]])
        y = np.array([-1.0, 1.0])
        model = train_rlsc(X, y, lam=1e-6)
        assert train_accuracy(model, X, y) == 1.0

    def test_orthonormal_design_small_lambda_limit(self):
        rng = np.random.default_rng(0)
        Q, _ = np.linalg.qr(rng.normal(size=(20, 5)))
        y = np.where(rng.random(20) < 0.5, 1.0, -1.0)
        model = train_rlsc(Q, y, lam=1e-12, fit_intercept=False)
        np.testing.assert_allclose(model.w, Q.T @ y, atol=1e-8)

    def test_matches_normal_equations_oracle(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(20, 5))
        y = np.where(rng.random(20) < 0.5, 1.0, -1.0)
        lam = 0.37
        model = train_rlsc(X, y, lam=lam)
        # independent dense solve on the explicitly formed system
        Xa = np.hstack([X, np.ones((20, 1))])
        expected = np.linalg.solve(Xa.T @ Xa + lam * np.eye(6), Xa.T @ y)
        np.testing.assert_allclose(np.append(model.w, model.bias), expected, atol=1e-8)

    def test_normal_equation_residual_invariant(self):
        rng = np.random.default_rng(2)
        for trial in range(5):
            X = rng.normal(size=(30, 7))
            y = np.where(rng.random(30) < 0.5, 1.0, -1.0)
            lam = 10.0 ** rng.uniform(-6, 1)
            model = train_rlsc(X, y, lam=lam)
            Xa = np.hstack([X, np.ones((30, 1))])
            w_full = np.append(model.w, model.bias)
            residual = (Xa.T @ Xa + lam * np.eye(8)) @ w_full - Xa.T @ y
            assert np.max(np.abs(residual)) <= 1e-8 * np.max(np.abs(Xa.T @ y))

    def test_conjugate_gradient_path_agrees_with_direct(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(40, 12))
        y = np.where(rng.random(40) < 0.5, 1.0, -1.0)
        direct = train_rlsc(X, y, lam=1e-2)
        import offdetect.learn as learn_mod

        old = learn_mod.RLSC_DIRECT_MAX_COLS
        learn_mod.RLSC_DIRECT_MAX_COLS = 4
        try:
            iterative = train_rlsc(X, y, lam=1e-2)
        finally:
            learn_mod.RLSC_DIRECT_MAX_COLS = old
        np.testing.assert_allclose(iterative.w, direct.w, atol=1e-6)

    def test_zero_rows_rejected(self):
        with pytest.raises(DataError, match="zero rows"):
            train_rlsc(np.zeros((0, 3)), np.zeros(0))

    def test_nonfinite_features_rejected(self):
        X = np.array([[1.0], [np.nan]])
        with pytest.raises(DataError, match="non-finite"):
            train_rlsc(X, np.array([1.0, -1.0]))


class TestLinearSvm:
    def test_separable_four_points_large_C(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [2.0, 2.0], [2.0, 3.0]])
        y = np.array([-1.0, -1.0, 1.0, 1.0])
        model = train_linear_svm(X, y, C=1000.0, epochs=2000, seed=0)
        assert train_accuracy(model, X, y) == 1.0

    def test_objective_within_one_percent_of_batch_oracle(self):
        X, y = blobs_fixture()
        C = 1.0
        model = train_linear_svm(X, y, C=C, epochs=2000, seed=0)
        ours = svm_objective(model.w, model.bias, X, y, C)
        reference = batch_subgradient_svm_oracle(X, y, C, steps=50_000)
        assert ours <= 1.01 * reference
        assert ours >= 0.99 * reference  # both bound the same optimum

    def test_deterministic_bit_for_bit(self):
        X, y = blobs_fixture(seed=7)
        a = train_linear_svm(X, y, C=2.0, epochs=50, seed=3)
        b = train_linear_svm(X, y, C=2.0, epochs=50, seed=3)
        np.testing.assert_array_equal(a.w, b.w)
        assert a.bias == b.bias

    def test_row_duplication_keeps_separable_predictions(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [2.0, 2.0], [2.0, 3.0]])
        y = np.array([-1.0, -1.0, 1.0, 1.0])
        base = train_linear_svm(X, y, C=10.0, epochs=3000, seed=0)
        X_dup = np.vstack([X, X[2]])
        y_dup = np.append(y, y[2])
        dup = train_linear_svm(X_dup, y_dup, C=10.0, epochs=3000, seed=0)
        base_labels = [label for label, _ in predict(base, X)]
        dup_labels = [label for label, _ in predict(dup, X)]
        assert base_labels == dup_labels

    def test_single_class_rejected(self):
        X = np.ones((4, 2))
        with pytest.raises(NumericError, match="degenerate training set"):
            train_linear_svm(X, np.ones(4))


class TestLogreg:
    def test_separable_pair(self):
        X = np.array([[-1.0], [1.0]])
        y = np.array([-1.0, 1.0])
        model = train_logreg(X, y, lr=0.5, epochs=500, l2=1e-4)
        assert train_accuracy(model, X, y) == 1.0

    def test_gradient_matches_central_finite_differences(self):
        rng = np.random.default_rng(4)
        X = np.hstack([rng.normal(size=(12, 4)), np.ones((12, 1))])
        y = np.where(rng.random(12) < 0.5, 1.0, -1.0)
        l2 = 0.05
        h = 1e-5
        for trial in range(10):
            w = rng.normal(size=5)
            _, grad = logreg_loss_grad(w, X, y, l2)
            fd = np.zeros(5)
            for j in range(5):
                e = np.zeros(5)
                e[j] = h
                lp, _ = logreg_loss_grad(w + e, X, y, l2)
                lm, _ = logreg_loss_grad(w - e, X, y, l2)
                fd[j] = (lp - lm) / (2 * h)
            assert np.linalg.norm(grad - fd) <= 1e-5 * max(np.linalg.norm(fd), 1e-12)

    def test_stronger_l2_shrinks_weights_monotonically(self):
        X, y = blobs_fixture(n=40, seed=9)
        norms = []
        for l2 in (1.0, 10.0, 100.0):
            model = train_logreg(X, y, lr=0.1, epochs=500, l2=l2)
            norms.append(np.linalg.norm(np.append(model.w, model.bias)))
        assert norms[0] > norms[1] > norms[2]

    def test_single_class_rejected(self):
        with pytest.raises(NumericError, match="degenerate"):
            train_logreg(np.ones((3, 2)), np.ones(3))


class TestGnb:
    def test_two_separated_clusters(self):
        X = np.array([[0.0], [0.1], [-0.1], [5.0], [5.1], [4.9]])
        y = np.array([-1.0, -1.0, -1.0, 1.0, 1.0, 1.0])
        model = train_gnb(X, y)
        assert train_accuracy(model, X, y) == 1.0

    def test_posterior_matches_closed_form(self):
        # two samples, one per class: means are the samples themselves and
        # variances clamp to the floor
        X = np.array([[1.0, 2.0], [3.0, 1.0]])
        y = np.array([1.0, -1.0])
        floor = 0.5
        model = train_gnb(X, y, var_floor=floor)
        query = np.array([[2.0, 2.0]])
        (_, score), = predict(model, query)

        def log_gauss(x, mu, var):
            return -0.5 * (np.log(2 * np.pi * var) + (x - mu) ** 2 / var)

        lp_off = np.log(0.5) + sum(log_gauss(query[0][j], X[0][j], floor) for j in range(2))
        lp_not = np.log(0.5) + sum(log_gauss(query[0][j], X[1][j], floor) for j in range(2))
        assert abs(score - (lp_off - lp_not)) < 1e-10

    def test_zero_variance_clamped_no_nan(self):
        X = np.array([[1.0, 5.0], [1.0, 5.0], [2.0, 0.0], [2.1, 0.1]])
        y = np.array([1.0, 1.0, -1.0, -1.0])
        model = train_gnb(X, y, var_floor=1e-9)
        assert np.all(model.variances >= 1e-9)
        preds = predict(model, X)
        assert all(np.isfinite(score) for _, score in preds)

    def test_single_class_rejected(self):
        with pytest.raises(NumericError, match="degenerate"):
            train_gnb(np.ones((3, 2)), np.ones(3))


class TestPredict:
    def test_linear_score_and_label(self):
        from offdetect.learn import LinearModel

        model = LinearModel(kind="rlsc", w=np.array([1.0, 0.0]), bias=0.0, hyper={})
        ((label, score),) = predict(model, np.array([[3.0, 5.0]]))
        assert label == "OFF" and score == 3.0

    def test_negative_score_maps_to_not(self):
        from offdetect.learn import LinearModel

        model = LinearModel(kind="rlsc", w=np.array([1.0]), bias=0.0, hyper={})
        ((label, score),) = predict(model, np.array([[-2.0]]))
        assert label == "NOT" and score == -2.0

    def test_empty_feature_matrix(self):
        from offdetect.learn import LinearModel

        model = LinearModel(kind="rlsc", w=np.array([1.0, 1.0]), bias=0.0, hyper={})
        assert predict(model, np.zeros((0, 2))) == []

    def test_embedded_map_composes_with_manual_transform(self):
        rng = np.random.default_rng(5)
        rks = sample_map(4, 20, sigma=1.0, seed=6)
        Xz = transform(rks, rng.normal(size=(30, 4)))
        y = np.where(rng.random(30) < 0.5, 1.0, -1.0)
        model = train_rlsc(Xz, y, lam=1e-3)
        model.rks = rks
        raw = rng.normal(size=(5, 4))
        lifted_scores = transform(rks, raw) @ model.w + model.bias
        got_scores = np.array([score for _, score in predict(model, raw)])
        np.testing.assert_allclose(got_scores, lifted_scores, atol=1e-12)

    def test_dimension_mismatch_rejected(self):
        from offdetect.learn import LinearModel

        model = LinearModel(kind="rlsc", w=np.array([1.0, 1.0]), bias=0.0, hyper={})
        with pytest.raises(DataError, match="dim"):
            predict(model, np.zeros((2, 3)))

    def test_feature_matrix_wrapper_accepted(self):
        from offdetect.learn import LinearModel

        model = LinearModel(kind="rlsc", w=np.array([2.0]), bias=1.0, hyper={})
        F = FeatureMatrix(values=np.array([[1.0], [-3.0]]), ids=["a", "b"])
        labels = [label for label, _ in predict(model, F)]
        assert labels == ["OFF", "NOT"]


class TestXorLift:
    def test_raw_linear_models_cap_at_75_percent(self):
        rlsc = train_rlsc(XOR_X, XOR_Y, lam=1e-6)
        logreg = train_logreg(XOR_X, XOR_Y, lr=0.5, epochs=2000, l2=1e-6)
        svm = train_linear_svm(XOR_X, XOR_Y, C=100.0, epochs=500, seed=0)
        for model in (rlsc, logreg, svm):
            assert train_accuracy(model, XOR_X, XOR_Y) <= 0.75

    def test_lift_reaches_perfect_training_accuracy(self):
        sigma = median_heuristic_sigma(XOR_X)
        for seed in range(10):
            rks = sample_map(2, 100, sigma=sigma, seed=seed)
            model = train_rlsc(transform(rks, XOR_X), XOR_Y, lam=1e-6)
            model.rks = rks
            assert train_accuracy(model, XOR_X, XOR_Y) == 1.0
