"""Curvature of the quarter-symmetric connection: six kinds and their traces.

All (1,3) curvature operators use slots (out; X, Y, Z), components
R[l, i, j, k], sign convention R(X, Y)Z = [nabla_X, nabla_Y] Z -
nabla_{[X,Y]} Z, so the round unit sphere has Ric = (n-1) g > 0.

The generator enters through four derived (0,2) tensors built from
B = nabla^g pi (direction first) and p = pi, q = pi o A:

    D0 = B + (p (x) q + q (x) p) / 2      D1 = B - B^T
    D2 = B + q (x) p                      D3 = B + p (x) q

The six curvature kinds are linear in these.  ``kahler_form=True`` uses the
shapes specialized with A^2 = -I; the general shapes keep A^2 explicit.  For
catalog structures A^2 = -I holds exactly, so the two agree to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connections import (
    covariant_derivative,
    levi_civita,
    levi_civita_jets,
    quarter_symmetric_jets,
)
from .diff import DiffConfig
from .geometry import GeneratorField, ManifoldSpec
from .tensor import Signature, Tensor, contract, metric_inverse, norm_max

THETAS = (0, 1, 2, 3, 4, 5)


def curvature_from_coefficients(l: np.ndarray, dl: np.ndarray) -> np.ndarray:
    """R^l_{ijk} = d_i L^l_{jk} - d_j L^l_{ik} + L^l_{im} L^m_{jk} - L^l_{jm} L^m_{ik}."""
    dterm = np.einsum("iljk->lijk", dl) - np.einsum("jlik->lijk", dl)
    qterm = np.einsum("lim,mjk->lijk", l, l) - np.einsum("ljm,mik->lijk", l, l)
    return dterm + qterm


def riemann_g(m: ManifoldSpec, point, cfg: DiffConfig) -> Tensor:
    """Curvature of the Levi-Civita connection as a (1,3) tensor."""
    gamma, dgamma = levi_civita_jets(m, point, cfg)
    return Tensor(m.n, Signature("uddd"), curvature_from_coefficients(gamma, dgamma))


def commutator_curvature(
    m: ManifoldSpec, point, gen: GeneratorField, cfg: DiffConfig
) -> Tensor:
    """Curvature of the quarter-symmetric connection straight from its
    coefficients; the oracle every kind-1 closed shape is checked against."""
    l, dl = quarter_symmetric_jets(m, point, gen, cfg)
    return Tensor(m.n, Signature("uddd"), curvature_from_coefficients(l, dl))


def _d_blocks(nabla_pi: np.ndarray, pi: np.ndarray, pa: np.ndarray):
    d0 = nabla_pi + 0.5 * (np.outer(pi, pa) + np.outer(pa, pi))
    d1 = nabla_pi - nabla_pi.T
    d2 = nabla_pi + np.outer(pa, pi)
    d3 = nabla_pi + np.outer(pi, pa)
    return {0: d0, 1: d1, 2: d2, 3: d3}


def d_tensor(
    theta: int, m: ManifoldSpec, point, gen: GeneratorField, cfg: DiffConfig
) -> Tensor:
    """Generator-derivative tensor of kind theta in {0, 1, 2, 3}."""
    if theta not in (0, 1, 2, 3):
        raise ValueError(f"d_tensor kind must be 0..3, got {theta}")
    lc = levi_civita(m, point, cfg)
    nabla_pi = covariant_derivative(lc, gen.field, point, cfg).components
    pi = gen.pi(point).components
    pa = pi @ m.structure(point).components
    return Tensor(m.n, Signature("dd"), _d_blocks(nabla_pi, pi, pa)[theta])


def scalar_times_vector(s: np.ndarray, v: np.ndarray, pattern: str) -> np.ndarray:
    """Rank-one (1,3) blocks  s(slot, slot) * V(vector slot).

    pattern "ij,lk" means s(X, Y) V Z, i.e. out[l,i,j,k] = s[i,j] v[l,k];
    v is an endomorphism (A) or the identity (coefficient along X, Y or Z).
    """
    lhs, rhs = pattern.split(",")
    return np.einsum(f"{lhs},{rhs}->lijk", s, v)


def _pi_triple(pi: np.ndarray, vec: np.ndarray, arrangement: str) -> np.ndarray:
    """pi(Z)(pi(Y) V X - pi(X) V Y) style blocks; vec is delta or A^2."""
    if arrangement == "z_yx":
        return np.einsum("k,j,li->lijk", pi, pi, vec) - np.einsum(
            "k,i,lj->lijk", pi, pi, vec
        )
    if arrangement == "y_xz":
        return np.einsum("j,i,lk->lijk", pi, pi, vec) - np.einsum(
            "j,k,li->lijk", pi, pi, vec
        )
    raise ValueError(arrangement)


def assemble_r_theta(
    theta: int,
    r_g: np.ndarray,
    a: np.ndarray,
    pi: np.ndarray,
    d: dict[int, np.ndarray],
    kahler_form: bool = True,
) -> np.ndarray:
    """Curvature of kind theta from the Levi-Civita curvature and D blocks."""
    if theta not in THETAS:
        raise ValueError(f"curvature kind must be one of {THETAS}, got {theta}")
    eye = np.eye(a.shape[0])
    sa = lambda s, pat: scalar_times_vector(s, a, pat)
    if theta == 1:
        return r_g - sa(d[1], "ij,lk")
    if theta == 2:
        return r_g - sa(d[2], "ik,lj") + sa(d[2], "jk,li")
    if theta == 3:
        return r_g - sa(d[2], "ij,lk") + sa(d[3], "jk,li")
    if kahler_form:
        if theta == 0:
            half_sum = 0.5 * (d[2] + d[3])
            return (
                r_g
                - 0.5 * sa(d[1], "ij,lk")
                - 0.5 * sa(half_sum, "ik,lj")
                + 0.5 * sa(half_sum, "jk,li")
                + 0.25 * _pi_triple(pi, eye, "z_yx")
            )
        if theta == 4:
            return (
                r_g
                - sa(d[3], "ij,lk")
                + sa(d[3], "jk,li")
                + _pi_triple(pi, eye, "z_yx")
            )
        # theta == 5
        return (
            r_g
            - 0.5 * sa(d[1], "ij,lk")
            - 0.5 * sa(d[3], "ik,lj")
            + 0.5 * sa(d[2], "jk,li")
            - 0.5 * _pi_triple(pi, eye, "y_xz")
        )
    a2 = a @ a
    if theta == 0:
        return (
            r_g
            - 0.5 * sa(d[0] - d[0].T, "ij,lk")
            - 0.5 * sa(d[0], "ik,lj")
            + 0.5 * sa(d[0], "jk,li")
            - 0.25 * _pi_triple(pi, a2, "z_yx")
        )
    if theta == 4:
        return (
            r_g
            - sa(d[3], "ij,lk")
            + sa(d[3], "jk,li")
            - _pi_triple(pi, a2, "z_yx")
        )
    # theta == 5 general shape
    return (
        r_g
        - 0.5 * sa(d[2] - d[3].T, "ij,lk")
        - 0.5 * sa(d[3], "ik,lj")
        + 0.5 * sa(d[2], "jk,li")
        + 0.5 * _pi_triple(pi, a2, "y_xz")
    )


def r_theta(
    theta: int,
    m: ManifoldSpec,
    point,
    gen: GeneratorField,
    cfg: DiffConfig,
    kahler_form: bool = True,
) -> Tensor:
    b = curvature_bundle(m, point, gen, cfg, kahler_form=kahler_form)
    return b.r[theta]


def ricci(t: Tensor) -> Tensor:
    """Ric(Y, Z) = trace of X -> R(X, Y)Z (contract out with X)."""
    return contract(t, 0, 1)


def prime_r(t: Tensor) -> Tensor:
    """'R(X, Y) = trace of Z -> R(X, Y)Z (contract out with Z)."""
    return contract(t, 0, 3)


@dataclass(frozen=True)
class CurvatureBundle:
    """Everything the identity layer needs at one point, computed once."""

    point: np.ndarray
    n: int
    g: np.ndarray
    g_inv: np.ndarray
    a: np.ndarray
    pi: np.ndarray
    pa: np.ndarray  # pi o A
    nabla_pi: np.ndarray
    d: dict[int, np.ndarray]
    r_g: Tensor
    r: dict[int, Tensor]
    ric_g: np.ndarray
    ric: dict[int, np.ndarray]
    prime_r3: np.ndarray
    prime_r4: np.ndarray

    def lowered(self, theta: int | None = None) -> np.ndarray:
        """(0,4) form R(X,Y,Z,W) = g(R(X,Y)Z, W); theta None means r_g."""
        t = self.r_g if theta is None else self.r[theta]
        return np.einsum("lijk,lw->ijkw", t.components, self.g)


def curvature_bundle(
    m: ManifoldSpec,
    point,
    gen: GeneratorField,
    cfg: DiffConfig,
    kahler_form: bool = True,
) -> CurvatureBundle:
    point = np.asarray(point, dtype=np.float64)
    n = m.n
    g = m.metric(point).components
    g_inv = metric_inverse(Tensor(n, Signature("dd"), g)).components
    a = m.structure(point).components
    pi = gen.pi(point).components
    pa = pi @ a
    lc = levi_civita(m, point, cfg)
    nabla_pi = covariant_derivative(lc, gen.field, point, cfg).components
    d = _d_blocks(nabla_pi, pi, pa)
    r_g = riemann_g(m, point, cfg)
    r = {
        theta: Tensor(
            n,
            Signature("uddd"),
            assemble_r_theta(theta, r_g.components, a, pi, d, kahler_form),
        )
        for theta in THETAS
    }
    ric = {theta: ricci(r[theta]).components for theta in THETAS}
    return CurvatureBundle(
        point=point,
        n=n,
        g=g,
        g_inv=g_inv,
        a=a,
        pi=pi,
        pa=pa,
        nabla_pi=nabla_pi,
        d=d,
        r_g=r_g,
        r=r,
        ric_g=ricci(r_g).components,
        ric=ric,
        prime_r3=prime_r(r[3]).components,
        prime_r4=prime_r(r[4]).components,
    )


def kahler_identities(m: ManifoldSpec, point, cfg: DiffConfig) -> dict[str, float]:
    """Residuals of the five structure/curvature exchange rules for R^g.

    k1 (operator form): R(X,Y)AZ = A R(X,Y)Z; k2..k5 on the lowered tensor:
    k2: R(X,Y,AZ,AW) = R(AX,AY,Z,W)    k3: R(X,AY,AZ,W) = R(AX,Y,Z,AW)
    k4: R(AX,AY,AZ,AW) = R(X,Y,Z,W)    k5: R(X,Y,Z,AW) = -R(X,Y,AZ,W)
    """
    r = riemann_g(m, point, cfg)
    g = m.metric(point).components
    a = m.structure(point).components
    rl = np.einsum("lijk,lw->ijkw", r.components, g)

    def rot(arr: np.ndarray, slots: tuple[int, ...]) -> np.ndarray:
        out = arr
        for s in slots:
            out = np.moveaxis(np.tensordot(out, a, axes=([s], [0])), -1, s)
        return out

    k1 = norm_max(
        np.einsum("lijm,mk->lijk", r.components, a)
        - np.einsum("lm,mijk->lijk", a, r.components)
    )
    k2 = norm_max(rot(rl, (2, 3)) - rot(rl, (0, 1)))
    k3 = norm_max(rot(rl, (1, 2)) - rot(rl, (0, 3)))
    k4 = norm_max(rot(rl, (0, 1, 2, 3)) - rl)
    k5 = norm_max(rot(rl, (3,)) + rot(rl, (2,)))
    return {
        "k1_operator": k1,
        "k2_pair_exchange": k2,
        "k3_inner_outer": k3,
        "k4_all_four": k4,
        "k5_last_pair": k5,
        "scale": max(norm_max(r), norm_max(rl)),
    }


def ricci_closed_forms(
    m: ManifoldSpec, point, gen: GeneratorField, cfg: DiffConfig
) -> dict[str, float]:
    """Residuals of the closed-form traces against contracted curvatures,
    plus the inverse formulas recovering D blocks and pi (x) pi from traces."""
    return closed_form_residuals(curvature_bundle(m, point, gen, cfg))


def closed_form_residuals(b: CurvatureBundle) -> dict[str, float]:
    n, a, pi = b.n, b.a, b.pi
    ricg = b.ric_g
    d1, d2, d3 = b.d[1], b.d[2], b.d[3]
    pipi = np.outer(pi, pi)

    def da(dblock: np.ndarray, first_rotated: bool) -> np.ndarray:
        # D(A d_k, d_j) -> [j, k] when first_rotated, else D(A d_j, d_k) -> [j, k]
        if first_rotated:
            return np.einsum("mk,mj->jk", a, dblock)
        return np.einsum("mj,mk->jk", a, dblock)

    closed = {
        "ric1": ricg - da(d1, True),
        "ric2": ricg - da(d2, False),
        "ric3": ricg - da(d2, True),
        "ric4": ricg - da(d3, True) + (n - 1) * pipi,
        "ric5": ricg - 0.5 * da(d1, True) - 0.5 * da(d3, False) + 0.5 * (n - 1) * pipi,
        # the untagged derivative in the kind-0 trace is the antisymmetrized one (D1)
        "ric0": ricg
        - 0.5 * da(d1, True)
        - 0.25 * (da(d2, False) + da(d3, False))
        + 0.25 * (n - 1) * pipi,
    }
    res = {
        f"closed_{name}": norm_max(b.ric[int(name[-1])] - val)
        for name, val in closed.items()
    }
    prime_closed = np.einsum("jm,mi->ij", d3, a)  # 'R3(X,Y) = D3(Y, AX)
    res["closed_prime_r3"] = norm_max(b.prime_r3 - prime_closed)
    res["closed_prime_r4"] = norm_max(b.prime_r4 - prime_closed)

    # inverse formulas: traces back to generator data
    ric1, ric2, ric3 = b.ric[1], b.ric[2], b.ric[3]
    ric4, ric5, ric0 = b.ric[4], b.ric[5], b.ric[0]
    # D1(Z, Y) = (Ric1 - Ricg)(Y, AZ): residual indexed [Z, Y]
    res["invert_d1"] = norm_max(d1 - np.einsum("jm,mk->kj", ric1 - ricg, a))
    # D2(Y, Z) = (Ric2 - Ricg)(AY, Z)
    res["invert_d2_from_ric2"] = norm_max(
        d2 - np.einsum("mj,mk->jk", a, ric2 - ricg)
    )
    # D2(Z, Y) = (Ric3 - Ricg)(Y, AZ)
    res["invert_d2_from_ric3"] = norm_max(
        d2 - np.einsum("jm,mk->kj", ric3 - ricg, a)
    )
    # D3(Y, X) = -'R3(AX, Y)
    res["invert_d3_from_prime"] = norm_max(
        d3.T + np.einsum("mi,mj->ij", a, b.prime_r3)
    )
    rot2 = lambda t: np.einsum("mj,pk,mp->jk", a, a, t)  # t(A d_j, A d_k)
    res["recover_pipi_4"] = norm_max(
        pipi - (ric4 - ricg - rot2(b.prime_r4)) / (n - 1)
    )
    res["recover_pipi_5"] = norm_max(
        pipi - (2 * ric5 - ric1 - rot2(b.prime_r3).T - ricg) / (n - 1)
    )
    res["recover_pipi_0"] = norm_max(
        pipi - (4 * ric0 - 2 * ric1 - ric3.T - rot2(b.prime_r3).T - ricg) / (n - 1)
    )
    res["scale"] = max(
        norm_max(ricg),
        max(norm_max(val) for val in b.ric.values()),
        norm_max(b.prime_r3),
        norm_max(b.prime_r4),
        (n - 1) * norm_max(pipi),
        max(norm_max(val) for val in b.d.values()),
    )
    return res
