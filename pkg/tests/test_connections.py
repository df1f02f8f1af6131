"""Connection coefficients, covariant derivatives, torsion.

Oracles: flat space (all coefficients zero, covariant derivative equals the
coordinate derivative), the conformal metric (Christoffel symbols by hand)
and a finite-difference cross-check of the coefficient derivatives."""

import numpy as np
import pytest

from qsc_lab.diff import DiffConfig
from qsc_lab.geometry import generator, manifold_by_name, sample_points
from qsc_lab.connections import (
    ConnectionCoefficients,
    covariant_derivative,
    levi_civita,
    levi_civita_jets,
    metricity_defects,
    nabla1_pi_defect,
    quarter_symmetric,
    quarter_symmetric_jets,
    torsion,
    torsion_identities,
    torsion_lowered,
)

CFG = DiffConfig(scheme="analytic")
EXACT = 1e-14


def test_flat_christoffel_vanishes():
    m = manifold_by_name("flat", k=2)
    lc = levi_civita(m, [0.3, -0.8, 1.0, 2.0], CFG)
    assert np.max(np.abs(lc.gamma)) == 0.0
    assert lc.kind == "levi_civita"


def test_conformal_christoffel_hand_values():
    """g = exp(2 x1) I: Gamma^i_{jk} = d_j s delta_ik + d_k s delta_ij
    - d_i s delta_jk with s = x1, so the only derivative is along slot 0."""
    m = manifold_by_name("conformal-nonkahler")
    lc = levi_civita(m, np.zeros(4), CFG)
    gamma = lc.gamma
    want = np.zeros((4, 4, 4))
    for i in range(4):
        for j in range(4):
            for k in range(4):
                want[i, j, k] = (
                    (j == 0) * (i == k) + (k == 0) * (i == j) - (i == 0) * (j == k)
                )
    np.testing.assert_allclose(gamma, want, atol=EXACT)
    assert gamma[0, 0, 0] == pytest.approx(1.0)
    assert gamma[0, 1, 1] == pytest.approx(-1.0)


def test_quarter_symmetric_coefficients_flat():
    """On flat space L^i_{jk} = -pi_j A^i_k exactly."""
    m = manifold_by_name("flat", k=2)
    gen = generator("linear_j", dim=4)
    p = np.array([1.0, 0.0, 0.0, 0.0])
    conn = quarter_symmetric(m, p, gen, CFG)
    pi = gen.pi(p).components
    a = m.structure(p).components
    np.testing.assert_allclose(conn.gamma, -np.einsum("j,ik->ijk", pi, a), atol=0)
    assert conn.gamma[1, 1, 0] == pytest.approx(-1.0)
    assert conn.gamma[0, 1, 1] == pytest.approx(1.0)
    assert conn.kind == "quarter_symmetric"


def test_coefficient_antisymmetry_equals_torsion():
    """L^i_{jk} - L^i_{kj} reproduces the torsion components."""
    for name in ("flat", "fs", "hyperbolic", "conformal-nonkahler"):
        m = manifold_by_name(name, k=2)
        gen = generator("random_poly", dim=m.n, seed=5)
        for p in sample_points(m, 3, seed=1):
            l = quarter_symmetric(m, p, gen, CFG).gamma
            t = torsion(m, p, gen).components
            assert np.max(np.abs((l - np.swapaxes(l, 1, 2)) - t)) < EXACT


def test_covariant_derivative_flat_is_coordinate_derivative():
    m = manifold_by_name("flat", k=2)
    gen = generator("random_poly", dim=4, seed=2)
    p = np.array([0.2, 0.4, -0.1, 0.3])
    lc = levi_civita(m, p, CFG)
    got = covariant_derivative(lc, gen.field, p, CFG).components
    _, dpi = gen.jets(p, CFG)
    np.testing.assert_allclose(got, dpi, atol=0)


def test_covariant_derivative_product_rule():
    """nabla respects the pairing: d_a (pi_Y) = (nabla pi)(Y) + pi(nabla Y)
    checked as nabla g applied to the metric (zero) on a curved manifold."""
    m = manifold_by_name("hyperbolic", k=2)
    p = sample_points(m, 1, seed=10)[0]
    lc = levi_civita(m, p, CFG)
    nabla_g = covariant_derivative(lc, m.metric_field, p, CFG)
    assert np.max(np.abs(nabla_g.components)) < 1e-12
    assert nabla_g.signature.slots == "ddd"


def test_covariant_derivative_mixed_tensor_slots():
    """The structure field (1,1) gets one + and one - coefficient term."""
    m = manifold_by_name("conformal-nonkahler")
    p = np.array([0.1, 0.2, 0.3, 0.4])
    lc = levi_civita(m, p, CFG)
    got = covariant_derivative(lc, m.structure_field, p, CFG).components
    a = m.structure(p).components
    gamma = lc.gamma
    want = (
        np.einsum("iam,mj->aij", gamma, a) - np.einsum("maj,im->aij", gamma, a)
    )
    np.testing.assert_allclose(got, want, atol=EXACT)
    assert np.max(np.abs(got)) > 0.1


def test_quarter_symmetric_jets_match_fd():
    """Analytic dL against a finite difference of L itself."""
    m = manifold_by_name("fs", k=2)
    gen = generator("random_poly", dim=4, seed=4)
    p = np.array([0.15, -0.2, 0.3, 0.1])
    _, dl = quarter_symmetric_jets(m, p, gen, CFG)
    h = 1e-4
    for a_dir in range(4):
        pp = p.copy(); pm = p.copy()
        pp[a_dir] += h; pm[a_dir] -= h
        fd = (
            quarter_symmetric(m, pp, gen, CFG).gamma
            - quarter_symmetric(m, pm, gen, CFG).gamma
        ) / (2 * h)
        assert np.max(np.abs(dl[a_dir] - fd)) < 1e-7


def test_levi_civita_jets_consistency():
    m = manifold_by_name("hyperbolic", k=2)
    p = np.array([0.2, 0.1, -0.15, 0.05])
    gamma, dgamma = levi_civita_jets(m, p, CFG)
    np.testing.assert_allclose(gamma, levi_civita(m, p, CFG).gamma, atol=0)
    h = 1e-4
    pp = p.copy(); pm = p.copy()
    pp[1] += h; pm[1] -= h
    fd = (levi_civita(m, pp, CFG).gamma - levi_civita(m, pm, CFG).gamma) / (2 * h)
    assert np.max(np.abs(dgamma[1] - fd)) < 1e-7


def test_torsion_hand_value():
    """T(dx1, dy1) = pi(dy1) A dx1 - pi(dx1) A dy1 = dy1 at (1,0,0,0)."""
    m = manifold_by_name("flat", k=2)
    gen = generator("linear_j", dim=4)
    t = torsion(m, np.array([1.0, 0.0, 0.0, 0.0]), gen).components
    np.testing.assert_allclose(t[:, 0, 1], [0.0, 1.0, 0.0, 0.0], atol=0)
    assert np.max(np.abs(t + np.swapaxes(t, 1, 2))) == 0.0


def test_torsion_lowered_matches_metric_pairing():
    m = manifold_by_name("fs", k=2)
    gen = generator("grad", dim=4)
    p = sample_points(m, 1, seed=3)[0]
    t = torsion(m, p, gen).components
    tl = torsion_lowered(m, p, gen).components
    g = m.metric(p).components
    np.testing.assert_allclose(tl, np.einsum("mxy,mz->xyz", t, g), atol=1e-14)


@pytest.mark.parametrize("name", ["flat", "fs", "hyperbolic", "conformal-nonkahler"])
def test_torsion_identities_hold_on_all_catalog_manifolds(name):
    """The torsion identities need only the almost Hermitian structure."""
    m = manifold_by_name(name, k=2)
    gen = generator("random_poly", dim=m.n, seed=6)
    for p in sample_points(m, 3, seed=2):
        res = torsion_identities(m, p, gen)
        for key in ("twisted_composition", "lowered_reconstruction", "cyclic_sum"):
            assert res[key] < 1e-13 * max(res["scale"], 1.0)


@pytest.mark.parametrize("name", ["flat", "fs", "hyperbolic"])
def test_quarter_symmetric_preserves_everything_on_kahler(name):
    m = manifold_by_name(name, k=2)
    gen = generator("linear_j", dim=m.n)
    for p in sample_points(m, 2, seed=4):
        res = metricity_defects(m, p, gen, CFG)
        for key in ("nabla1_g", "nabla1_f", "nabla1_g_total", "nabla1_a", "nabla_g_a"):
            assert res[key] < 1e-11 * max(res["scale"], 1.0), key


def test_conformal_breaks_structure_parallelism_but_not_g():
    m = manifold_by_name("conformal-nonkahler")
    gen = generator("linear_j", dim=4)
    res = metricity_defects(m, np.zeros(4), gen, CFG)
    assert res["nabla1_g"] < 1e-13
    for key in ("nabla1_f", "nabla1_g_total", "nabla1_a", "nabla_g_a"):
        assert res[key] > 1e-3, key


@pytest.mark.parametrize("name", ["flat", "fs", "conformal-nonkahler"])
def test_nabla1_pi_closed_form(name):
    m = manifold_by_name(name, k=2)
    for gen_name in ("linear_j", "grad"):
        gen = generator(gen_name, dim=m.n)
        for p in sample_points(m, 2, seed=5):
            res = nabla1_pi_defect(m, p, gen, CFG)
            assert res["residual"] < 1e-13 * max(res["scale"], 1.0)


def test_coefficients_validate_shape():
    with pytest.raises(ValueError):
        ConnectionCoefficients(3, "test", np.zeros((3, 3)))
