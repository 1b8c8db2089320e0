import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from finact import groups as gk
from finact.actions import TranslationAction, sample_action, table_action
from finact.estimators import FiniteModelEstimator, SeminormApproximator, check_epsilon, check_pairs
from finact.norms import WordSeminorm

Z = gk.Lattice(1)
H = TranslationAction(Z)


def test_params_roundtrip():
    est = FiniteModelEstimator(group=Z, action=H, epsilon=0.5, mode="lazy")
    params = est.get_params()
    assert params["epsilon"] == 0.5 and params["mode"] == "lazy"
    other = clone(est).set_params(epsilon=2.0)
    assert other.epsilon == 2.0 and est.epsilon == 0.5


def test_fit_transform_pairs():
    est = FiniteModelEstimator(group=Z, action=H, epsilon=1.0).fit(([Z.element(1)], [H.point(0)]))
    assert (est.m_, est.k_, est.n_window_) == (3.0, 6, 3)
    out = est.transform([[0, 0], [1, 2], [0, 1]])
    i1, im1 = est.window_.A.index(Z.element(1)), est.window_.A.index(Z.element(-1))
    assert out[0] == 0.0
    assert est.transform([[i1, im1]])[0] == 3.0
    assert est.verify().passed


def test_fit_transform_window_matches_lazy():
    sa = sample_action(H, gk.symmetrize([Z.element(2)]), [H.point(0), H.point(0.5)])
    mat = FiniteModelEstimator(group=Z, epsilon=1.0).fit_transform(sa)
    lazy = FiniteModelEstimator(group=Z, epsilon=1.0, mode="lazy").fit(sa).transform(sa)
    assert mat.shape == (6, 6)
    assert np.max(np.abs(mat - lazy)) <= 1e-12


def test_not_fitted():
    with pytest.raises(NotFittedError):
        FiniteModelEstimator(group=Z).transform([[0, 0]])


@pytest.mark.parametrize("eps", [0, -1, float("nan")])
def test_bad_epsilon(eps):
    with pytest.raises(ValueError):
        check_epsilon(eps)
    with pytest.raises(ValueError):
        FiniteModelEstimator(group=Z, action=H, epsilon=eps).fit(([Z.element(1)], [H.point(0)]))


def test_bad_window():
    with pytest.raises(ValueError):
        FiniteModelEstimator(group=Z, epsilon=1.0).fit(([Z.element(1)], [H.point(0)]))
    with pytest.raises(ValueError):
        FiniteModelEstimator(epsilon=1.0).fit(([Z.element(1)], [H.point(0)]))
    with pytest.raises(ValueError):
        table_action(Z, [Z.identity(), Z.element(1)], ["p"], [[0, 1], [1, 0]])


def test_check_pairs():
    assert check_pairs([[0, 1]], 2).shape == (1, 2)
    with pytest.raises(ValueError):
        check_pairs([[0, 1, 2]], 3)
    with pytest.raises(ValueError):
        check_pairs([[0, 5]], 3)


def test_seminorm_approximator():
    est = SeminormApproximator(group=Z, seminorm=WordSeminorm(Z), epsilon=1.0)
    est.fit([Z.element(1), Z.element(2)])
    assert est.normed_group_.order == 41
    vals = est.transform([Z.element(g) for g in (0, 1, -2)])
    assert vals.tolist() == [0.0, 2.0, 3.0]
    assert est.validate().ok
    with pytest.raises(NotFittedError):
        SeminormApproximator(group=Z).transform([Z.identity()])
    with pytest.raises(ValueError):
        SeminormApproximator(group=Z, seminorm=WordSeminorm(Z)).fit([])
