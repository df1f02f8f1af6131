"""Tensor container and slot algebra, checked against loop-level oracles."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsc_lab.tensor import (
    Signature,
    SingularMetricError,
    Tensor,
    apply_endo,
    combine,
    contract,
    identity_endomorphism,
    lower_first,
    metric_inverse,
    norm_fro,
    norm_max,
    raise_first,
    relative_residual,
    tensor,
    tensor_product,
)

ROUNDTRIP_TOL = 1e-12


def components(dim: int, rank: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-2.0, 2.0, size=(dim,) * rank)


def spd_metric(dim: int, seed: int) -> Tensor:
    rng = np.random.default_rng(seed)
    b = rng.uniform(-1.0, 1.0, size=(dim, dim))
    return tensor(dim, "dd", b @ b.T + dim * np.eye(dim))


def test_signature_counts():
    sig = Signature("uddd")
    assert sig.rank == 4
    assert sig.contravariant == 1
    assert sig.covariant == 3
    assert sig.drop(0, 2).slots == "dd"
    assert str(sig) == "uddd"


def test_signature_rejects_bad_slots():
    with pytest.raises(ValueError):
        Signature("uxd")


def test_tensor_validates_shape_and_finiteness():
    with pytest.raises(ValueError):
        tensor(3, "dd", np.zeros((3, 2)))
    with pytest.raises(ValueError):
        tensor(2, "d", [np.nan, 0.0])
    with pytest.raises(ValueError):
        Tensor(17, Signature("d"), np.zeros(17))


def test_tensor_components_frozen():
    t = tensor(2, "dd", np.eye(2))
    with pytest.raises(ValueError):
        t.components[0, 0] = 5.0


def test_zeros_and_getitem():
    t = Tensor.zeros(3, "ud")
    assert t.components.shape == (3, 3)
    assert t[1, 2] == 0.0


def test_tensor_product_matches_outer():
    a = tensor(2, "d", [1.0, 2.0])
    b = tensor(2, "ud", [[0.0, 1.0], [3.0, 4.0]])
    p = tensor_product(a, b)
    assert p.signature.slots == "dud"
    assert p[1, 1, 0] == 2.0 * 3.0


@given(dim=st.integers(2, 4), seed=st.integers(0, 500))
@settings(max_examples=60, deadline=None)
def test_contract_matches_explicit_sum(dim, seed):
    """contract() against the definition written as an index loop."""
    t = Tensor(dim, Signature("udd"), components(dim, 3, seed))
    got = contract(t, 0, 1)
    want = np.zeros(dim)
    for k in range(dim):
        for m in range(dim):
            want[k] += t[m, m, k]
    assert got.signature.slots == "d"
    np.testing.assert_allclose(got.components, want, atol=1e-14)


@given(dim=st.integers(2, 4), seed=st.integers(0, 500))
@settings(max_examples=60, deadline=None)
def test_contract_last_slot_matches_explicit_sum(dim, seed):
    t = Tensor(dim, Signature("uddd"), components(dim, 4, seed))
    got = contract(t, 0, 3)
    want = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(dim):
            for m in range(dim):
                want[i, j] += t[m, i, j, m]
    np.testing.assert_allclose(got.components, want, atol=1e-14)


def test_contract_rejects_bad_slots():
    t = Tensor(2, Signature("udd"), components(2, 3, 1))
    with pytest.raises(ValueError):
        contract(t, 1, 2)  # slot 1 is covariant
    with pytest.raises(ValueError):
        contract(t, 0, 0)
    with pytest.raises(ValueError):
        contract(t, 0, 5)


@given(dim=st.integers(2, 5), rank=st.integers(1, 4), seed=st.integers(0, 500))
@settings(max_examples=60, deadline=None)
def test_lower_raise_roundtrip(dim, rank, seed):
    sig = Signature("u" + "d" * (rank - 1))
    t = Tensor(dim, sig, components(dim, rank, seed))
    g = spd_metric(dim, seed + 1)
    g_inv = metric_inverse(g)
    back = raise_first(lower_first(t, g), g_inv)
    assert back.signature == t.signature
    assert norm_max(back.components - t.components) < ROUNDTRIP_TOL


def test_lower_first_slot_order():
    """R[l,i,j,k] must become R[i,j,k,w] with the lowered slot appended last."""
    dim = 2
    t = Tensor(dim, Signature("ud"), np.array([[1.0, 2.0], [3.0, 4.0]]))
    g = tensor(dim, "dd", np.diag([2.0, 5.0]))
    low = lower_first(t, g)
    assert low.signature.slots == "dd"
    # low[j, w] = g[l, w] t[l, j]
    assert low[0, 0] == 2.0 * 1.0
    assert low[0, 1] == 5.0 * 3.0


def test_apply_endo_down_slot():
    """Down slot composes through the endomorphism: t'(X) = t(AX)."""
    a = tensor(2, "ud", [[0.0, -1.0], [1.0, 0.0]])
    t = tensor(2, "d", [5.0, 7.0])
    got = apply_endo(t, a, 0)
    # t'(e_j) = t(A e_j) = t_m A^m_j
    assert got[0] == 7.0
    assert got[1] == -5.0


def test_apply_endo_up_slot_postcomposes():
    a = tensor(2, "ud", [[2.0, 0.0], [0.0, 3.0]])
    t = tensor(2, "ud", [[1.0, 4.0], [5.0, 9.0]])
    got = apply_endo(t, a, 0)
    np.testing.assert_allclose(got.components, a.components @ t.components)


def test_apply_endo_rejects_mismatch():
    a = tensor(2, "dd", np.eye(2))
    t = tensor(2, "d", [1.0, 0.0])
    with pytest.raises(ValueError):
        apply_endo(t, a, 0)


def test_combine_and_identity():
    eye = identity_endomorphism(3)
    doubled = combine(2.0, eye, 0.0, eye)
    np.testing.assert_allclose(doubled.components, 2.0 * np.eye(3))
    with pytest.raises(ValueError):
        combine(1.0, eye, 1.0, tensor(3, "dd", np.eye(3)))


def test_norms():
    t = tensor(2, "dd", [[3.0, 0.0], [0.0, -4.0]])
    assert norm_max(t) == 4.0
    assert norm_fro(t) == 5.0
    assert norm_max(np.zeros((2, 2))) == 0.0


@given(dim=st.integers(2, 5), seed=st.integers(0, 500))
@settings(max_examples=60, deadline=None)
def test_metric_inverse_roundtrip(dim, seed):
    g = spd_metric(dim, seed)
    g_inv = metric_inverse(g)
    assert g_inv.signature.slots == "uu"
    np.testing.assert_allclose(
        g.components @ g_inv.components, np.eye(dim), atol=1e-10
    )


def test_metric_inverse_rejects_singular():
    g = tensor(2, "dd", [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(SingularMetricError):
        metric_inverse(g)


def test_relative_residual_guard():
    assert relative_residual(0.0, [0.0]) == 0.0
    assert relative_residual(1e-15, [0.0]) <= 1e-3
    assert relative_residual(2.0, [4.0]) == 0.5
