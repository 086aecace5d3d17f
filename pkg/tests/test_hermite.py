import json
import math

import numpy as np
import pytest
from scipy import stats as sps

from strongweak.covmodels import Constant, LogPower
from strongweak.errors import (AllZero, BoundaryCase, DegreeTooLarge, DimensionMismatch,
                               QuadratureNotConverged)
from strongweak.hermite import (HermiteExpansion, coefficient_quadrature, coefficients, e_v, expand,
                                hermite_poly, hermite_rank, hermite_table, multi_indices, order,
                                reduction_sets, student_indicator, student_mean_constant,
                                student_rank1_coeff, student_rank2_coeff, student_rank2_deriv,
                                vfactorial)


def test_polynomial_values():
    assert hermite_poly(0, 2.7) == 1.0
    assert hermite_poly(1, 3.7) == 3.7
    assert hermite_poly(2, 2.0) == 3.0
    assert hermite_poly(5, 1.5) == pytest.approx(1.5 ** 5 - 10 * 1.5 ** 3 + 15 * 1.5)
    assert hermite_poly(5, 1.5) == pytest.approx(-3.65625)
    with pytest.raises(DegreeTooLarge):
        hermite_poly(65, 0.1)


def test_table_matches_numpy_hermite_e():
    u = np.linspace(-3, 3, 11)
    tab = hermite_table(8, u)
    for k in range(9):
        np.testing.assert_allclose(tab[k], np.polynomial.hermite_e.hermeval(u, [0] * k + [1]),
                                   rtol=1e-12, atol=1e-12)


def test_e_v():
    assert e_v((0, 0), [0.3, -2.0]) == 1.0
    a, b = 0.7, -1.3
    assert e_v((1, 2), [a, b]) == pytest.approx(a * (b * b - 1))
    assert e_v((2, 2), [1.0, 1.0]) == 0.0
    with pytest.raises(DimensionMismatch):
        e_v((1, 2), [1.0])


def test_multi_index_helpers():
    assert order((1, 2, 0)) == 3
    assert vfactorial((2, 3)) == 12
    idx = multi_indices(2, 2)
    assert len(idx) == 6 and (0, 0) in idx and (1, 1) in idx


def test_orthogonality():
    x, w = np.polynomial.hermite_e.hermegauss(40)
    w = w / w.sum()
    tab = hermite_table(8, x)
    gram = (tab * w) @ tab.T
    expected = np.diag([math.factorial(k) for k in range(9)])
    np.testing.assert_allclose(gram, expected, atol=1e-8)


def test_coefficient_quadrature_examples():
    assert coefficient_quadrature(lambda w: w[..., 0] ** 2, (2,))[0] == pytest.approx(2.0, abs=1e-10)
    G = lambda w: w[..., 0] + w[..., 1] ** 2 - 1
    assert coefficient_quadrature(G, (1, 0))[0] == pytest.approx(1.0, abs=1e-10)
    assert coefficient_quadrature(G, (0, 2))[0] == pytest.approx(2.0, abs=1e-10)
    assert coefficient_quadrature(G, (0, 1))[0] == pytest.approx(0.0, abs=1e-10)


def test_student_coefficient_by_qmc():
    c, err = coefficient_quadrature(student_indicator(2, 0.5), (1, 0, 0), method="qmc",
                                    qmc_points=2 ** 20)
    assert c == pytest.approx(0.354615, abs=1e-4)
    assert err < 1e-4


def test_quadrature_not_converged_on_indicator():
    with pytest.raises(QuadratureNotConverged):
        coefficient_quadrature(lambda w: (w[..., 0] > 0.3).astype(float), (1,),
                               method="gauss-hermite", tol=1e-12)


def test_parseval_for_cubic():
    e = expand(lambda w: w[..., 0] ** 3, 1, 5)
    assert e.parseval_sum() == pytest.approx(15.0, abs=1e-6)
    assert e.tail_mass() == pytest.approx(0.0, abs=1e-6)


def test_rank():
    assert hermite_rank(expand(lambda w: w[..., 0], 1, 4)) == 1
    assert hermite_rank(HermiteExpansion.from_coefficients({(1, 0): 1.0, (0, 2): 2.0})) == 1
    e = expand(student_indicator(2, 0.5), 3, 2, method="qmc", qmc_points=2 ** 16)
    assert hermite_rank(e, tol=1e-2) == 1
    with pytest.raises(AllZero):
        hermite_rank(HermiteExpansion.from_coefficients({(0, 0): 1.0, (1, 0): 0.0}))


def test_expansion_json_round_trip():
    e = HermiteExpansion.from_coefficients({(1, 0): 1.0, (0, 2): 2.0})
    rows = json.loads(e.to_json())
    assert {"index", "coeff", "err"} <= set(rows[0])
    back = HermiteExpansion.from_json(e.to_json())
    assert back.coeffs == e.coeffs


def test_expansion_evaluates_polynomial():
    e = HermiteExpansion.from_coefficients({(1, 0): 1.0, (0, 2): 2.0})
    w = np.array([[0.3, 1.2], [-1.0, 0.0]])
    np.testing.assert_allclose(e(w), w[:, 0] + w[:, 1] ** 2 - 1)


def test_reduction_sets_example():
    e = HermiteExpansion.from_coefficients({(1, 0): 1.0, (0, 2): 2.0})
    rs = reduction_sets(e, [2.5], [0.2])
    assert rs.kappa == 1
    assert rs.gamma_tilde == pytest.approx(0.4)
    assert rs.L_plus == (2,)
    assert rs.N_star[2] == ((0, 2),)
    assert rs.a_l == {2: 1.0}
    for l, vs in rs.N_star.items():
        assert all(rs.exponent_sum(v) == pytest.approx(rs.gamma_tilde) for v in vs)


def test_reduction_sets_levels_with_log_factor():
    # levels 2 and 3 both attain the minimum when the exponents line up
    e = HermiteExpansion.from_coefficients({(0, 2, 0): 1.0, (0, 0, 3): 1.0, (1, 0, 0): 1.0})
    rs = reduction_sets(e, [3.0], [0.3, 0.2], slowvar=LogPower(1.0))
    assert rs.L_plus == (2, 3)
    assert rs.a_l == {2: 0.0, 3: 1.0}
    rs0 = reduction_sets(e, [3.0], [0.3, 0.2], slowvar=LogPower(-1.0))
    assert rs0.a_l == {2: 1.0, 3: 0.0}
    rsc = reduction_sets(e, [3.0], [0.3, 0.2], slowvar=Constant(4.0))
    assert sum(rsc.a_l.values()) == pytest.approx(1.0)
    assert rsc.a_l[3] == pytest.approx(8 / 12)


def test_reduction_sets_theorem_setting():
    # all long-range exponents equal and a rank term living on them: gamma = alpha * kappa
    e = HermiteExpansion.from_coefficients({(0, 2, 0): 1.0, (1, 1, 0): 0.5, (0, 1, 1): 0.3})
    rs = reduction_sets(e, [2.5], [0.3, 0.3])
    assert rs.gamma_tilde == pytest.approx(0.6)
    assert rs.L_plus == (2,)


def test_reduction_boundary_case():
    e = HermiteExpansion.from_coefficients({(2,): 1.0})
    with pytest.raises(BoundaryCase):
        reduction_sets(e, [], [1.0])


def test_student_mean_constant():
    assert student_mean_constant(3, 0.0) == 0.5
    assert student_mean_constant(2, 0.5) == pytest.approx(1 / 3, abs=1e-12)
    t = 0.5
    assert student_mean_constant(2, t) == pytest.approx(0.5 - t / (2 * math.sqrt(2) * math.sqrt(1 + t * t / 2)), abs=1e-14)
    for n in (1, 2, 5):
        for a in (-1.5, 0.3, 2.0):
            assert student_mean_constant(n, a) == pytest.approx(sps.t.sf(a, n), abs=1e-13)


def test_student_mean_constant_monte_carlo():
    rng = np.random.default_rng(17)
    w = rng.standard_normal((1_000_000, 3))
    t = w[:, 0] / np.sqrt((w[:, 1] ** 2 + w[:, 2] ** 2) / 2)
    frac = np.mean(t > 0.5)
    sigma = math.sqrt(frac * (1 - frac) / w.shape[0])
    assert abs(frac - 1 / 3) < 4 * sigma


def test_student_rank1():
    assert student_rank1_coeff(2, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert student_rank1_coeff(2, 0.5) == pytest.approx(0.354615, abs=1e-6)
    assert student_rank1_coeff(2, 0.5, (0, 1, 0)) == 0.0


def test_student_rank2_values_and_shape():
    for n in (1, 2, 3, 5):
        assert student_rank2_coeff(n, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert student_rank2_coeff(2, 0.5) == pytest.approx(-2 / 27, abs=1e-10)
    inner = [student_rank2_coeff(2, a) for a in np.linspace(-0.95, 0.95, 15)]
    outer = [student_rank2_coeff(2, a) for a in np.linspace(1.05, 5, 15)]
    assert np.all(np.diff(inner) < 0)
    assert np.all(np.diff(outer) > 0)
    assert all(student_rank2_coeff(2, a) < 0 for a in (0.2, 0.5, 0.9))


def test_student_rank2_derivative():
    for n in (1, 2, 3):
        assert student_rank2_deriv(n, 1.0) == pytest.approx(0.0, abs=1e-15)
        assert student_rank2_deriv(n, -1.0) == pytest.approx(0.0, abs=1e-15)
        assert abs(student_rank2_deriv(n, 1e6)) < 1e-10
    assert student_rank2_deriv(2, 0.0) == pytest.approx(-0.1767767, abs=1e-7)
    h = 1e-4
    fd = (student_rank2_coeff(2, 0.5 + h) - student_rank2_coeff(2, 0.5 - h)) / (2 * h)
    assert fd == pytest.approx(student_rank2_deriv(2, 0.5), abs=1e-5)


def test_student_coefficients_against_quadrature():
    n, a = 2, 1.0
    est, err = coefficients(student_indicator(n, a), [(1, 0, 0), (0, 2, 0), (1, 1, 0)],
                            method="qmc", qmc_points=2 ** 21)
    assert est[0] == pytest.approx(student_rank1_coeff(n, a), abs=1e-4)
    assert est[1] == pytest.approx(student_rank2_coeff(n, a), abs=2e-4)
    assert abs(est[2]) < 2e-4
