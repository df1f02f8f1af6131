"""Levi-Civita and quarter-symmetric connections in coordinates.

Coefficient convention is direction-first: nabla_{d_j} d_k = L^i_{jk} d_i,
stored as gamma[i, j, k].  The quarter-symmetric connection of a metric g,
structure A and generator one-form pi is

    L^i_{jk} = Gamma^i_{jk} - pi_j A^i_k,

the coordinate form of nabla^1_X Y = nabla^g_X Y - pi(X) A Y.  Its torsion is
T(X, Y) = pi(Y) A X - pi(X) A Y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diff import DiffConfig
from .geometry import GeneratorField, ManifoldSpec, TensorField, as_point
from .tensor import Signature, Tensor, metric_inverse, norm_max


@dataclass(frozen=True)
class ConnectionCoefficients:
    dim: int
    kind: str
    gamma: np.ndarray  # gamma[i, j, k] = L^i_{jk}, j the direction slot

    def __post_init__(self) -> None:
        g = np.ascontiguousarray(self.gamma, dtype=np.float64)
        if g.shape != (self.dim,) * 3:
            raise ValueError(f"coefficient block must be cubic, got {g.shape}")
        g.flags.writeable = False
        object.__setattr__(self, "gamma", g)


def christoffel(g: np.ndarray, g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Gamma^i_{jk} = (1/2) g^{il} (d_j g_{lk} + d_k g_{jl} - d_l g_{jk})."""
    term = (
        np.einsum("jlk->ljk", dg)
        + np.einsum("kjl->ljk", dg)
        - np.einsum("ljk->ljk", dg)
    )
    return 0.5 * np.einsum("il,ljk->ijk", g_inv, term)


def christoffel_derivative(
    g_inv: np.ndarray, dg: np.ndarray, d2g: np.ndarray
) -> np.ndarray:
    """d_a Gamma^i_{jk}, assembled from metric first and second partials."""
    term = (
        np.einsum("jlk->ljk", dg)
        + np.einsum("kjl->ljk", dg)
        - np.einsum("ljk->ljk", dg)
    )
    dterm = (
        np.einsum("ajlk->aljk", d2g)
        + np.einsum("akjl->aljk", d2g)
        - np.einsum("aljk->aljk", d2g)
    )
    dg_inv = -np.einsum("im,amp,pl->ail", g_inv, dg, g_inv)
    return 0.5 * (
        np.einsum("ail,ljk->aijk", dg_inv, term)
        + np.einsum("il,aljk->aijk", g_inv, dterm)
    )


def _metric_data(m: ManifoldSpec, point, cfg: DiffConfig):
    g, dg, d2g = m.metric_jets(point, cfg)
    g_inv = metric_inverse(Tensor(m.n, Signature("dd"), g)).components
    return g, g_inv, dg, d2g


def levi_civita(m: ManifoldSpec, point, cfg: DiffConfig) -> ConnectionCoefficients:
    g, g_inv, dg, _ = _metric_data(m, point, cfg)
    return ConnectionCoefficients(m.n, "levi_civita", christoffel(g, g_inv, dg))


def levi_civita_jets(m: ManifoldSpec, point, cfg: DiffConfig):
    """(Gamma, dGamma) for curvature assembly; nothing is differenced twice."""
    g, g_inv, dg, d2g = _metric_data(m, point, cfg)
    return christoffel(g, g_inv, dg), christoffel_derivative(g_inv, dg, d2g)


def quarter_symmetric(
    m: ManifoldSpec, point, gen: GeneratorField, cfg: DiffConfig
) -> ConnectionCoefficients:
    base = levi_civita(m, point, cfg)
    pi = gen.pi(point).components
    a = m.structure(point).components
    gamma = base.gamma - np.einsum("j,ik->ijk", pi, a)
    return ConnectionCoefficients(m.n, "quarter_symmetric", gamma)


def quarter_symmetric_jets(
    m: ManifoldSpec, point, gen: GeneratorField, cfg: DiffConfig
):
    """(L, dL) of the quarter-symmetric connection."""
    gamma, dgamma = levi_civita_jets(m, point, cfg)
    pi, dpi = gen.jets(point, cfg)
    a, da = m.structure_jets(point, cfg)
    l = gamma - np.einsum("j,ik->ijk", pi, a)
    dl = (
        dgamma
        - np.einsum("aj,ik->aijk", dpi, a)
        - np.einsum("j,aik->aijk", pi, da)
    )
    return l, dl


def covariant_derivative(
    conn: ConnectionCoefficients, fld: TensorField, point, cfg: DiffConfig
) -> Tensor:
    """nabla(field) with the derivative direction as the new leading slot."""
    point = as_point(point, conn.dim)
    value, d1 = fld.jets(point, cfg)
    comps = d1.copy()
    letters = "bcdefghi"
    sub = letters[: value.ndim]
    for slot, kind in enumerate(fld.signature.slots):
        t_sub = sub[:slot] + "m" + sub[slot + 1 :]
        out_sub = "a" + sub
        if kind == "u":
            comps += np.einsum(f"{sub[slot]}am,{t_sub}->{out_sub}", conn.gamma, value)
        else:
            comps -= np.einsum(f"ma{sub[slot]},{t_sub}->{out_sub}", conn.gamma, value)
    return Tensor(conn.dim, Signature("d" + fld.signature.slots), comps)


def torsion(m: ManifoldSpec, point, gen: GeneratorField) -> Tensor:
    """T(X, Y) = pi(Y) A X - pi(X) A Y as a (1,2) tensor, slots (out; X, Y)."""
    pi = gen.pi(point).components
    a = m.structure(point).components
    comps = np.einsum("k,ij->ijk", pi, a) - np.einsum("j,ik->ijk", pi, a)
    return Tensor(m.n, Signature("udd"), comps)


def torsion_lowered(m: ManifoldSpec, point, gen: GeneratorField) -> Tensor:
    """T(X, Y, Z) = pi(Y) F(X, Z) - pi(X) F(Y, Z), slots (X, Y, Z)."""
    pi = gen.pi(point).components
    f = m.fundamental(point).components
    comps = np.einsum("k,jl->jkl", pi, f) - np.einsum("j,kl->jkl", pi, f)
    return Tensor(m.n, Signature("ddd"), comps)


def _derived_fields(m: ManifoldSpec):
    """Jet-capable F = g(A., .) and G = g + F component functions."""
    g_fn = m.metric_field.fn
    a_fn = m.structure_field.fn

    def f_fn(u):
        g = g_fn(u)
        a = a_fn(u)
        n = len(g)
        return [
            [sum(a[mm][i] * g[mm][j] for mm in range(n)) for j in range(n)]
            for i in range(n)
        ]

    def g_total_fn(u):
        g = g_fn(u)
        f = f_fn(u)
        n = len(g)
        return [[g[i][j] + f[i][j] for j in range(n)] for i in range(n)]

    dom = m.metric_field.domain
    return (
        TensorField(Signature("dd"), f_fn, domain=dom, label="F"),
        TensorField(Signature("dd"), g_total_fn, domain=dom, label="G"),
    )


def metricity_defects(
    m: ManifoldSpec, point, gen: GeneratorField, cfg: DiffConfig
) -> dict[str, float]:
    """Max-norm covariant-derivative defects of g, F, G, A under the
    quarter-symmetric connection, plus nabla^g A under Levi-Civita."""
    conn = quarter_symmetric(m, point, gen, cfg)
    lc = levi_civita(m, point, cfg)
    f_field, g_total_field = _derived_fields(m)
    out = {
        "nabla1_g": norm_max(covariant_derivative(conn, m.metric_field, point, cfg)),
        "nabla1_f": norm_max(covariant_derivative(conn, f_field, point, cfg)),
        "nabla1_g_total": norm_max(
            covariant_derivative(conn, g_total_field, point, cfg)
        ),
        "nabla1_a": norm_max(covariant_derivative(conn, m.structure_field, point, cfg)),
        "nabla_g_a": norm_max(covariant_derivative(lc, m.structure_field, point, cfg)),
    }
    out["scale"] = max(
        norm_max(m.metric(point)),
        norm_max(m.fundamental(point)),
        norm_max(m.structure(point)),
    )
    return out


def nabla1_pi_defect(
    m: ManifoldSpec, point, gen: GeneratorField, cfg: DiffConfig
) -> dict[str, float]:
    """Residual of (nabla^1_X pi)(Y) = (nabla^g_X pi)(Y) + pi(X) pi(A Y)."""
    conn = quarter_symmetric(m, point, gen, cfg)
    lc = levi_civita(m, point, cfg)
    lhs = covariant_derivative(conn, gen.field, point, cfg).components
    nabla_g_pi = covariant_derivative(lc, gen.field, point, cfg).components
    pi = gen.pi(point).components
    a = m.structure(point).components
    pa = pi @ a  # pa_j = pi(A d_j)
    rhs = nabla_g_pi + np.outer(pi, pa)
    return {
        "residual": norm_max(lhs - rhs),
        "scale": max(norm_max(lhs), norm_max(rhs)),
    }


def torsion_identities(
    m: ManifoldSpec, point, gen: GeneratorField
) -> dict[str, float]:
    """Residuals of the structure-twisted torsion identities.

    twisted_composition:   A T(AX, AY) = A T(X, Y) - T(AX, Y) - T(X, AY)
    lowered_reconstruction: T(X,Y,Z) = T(AX,AY,Z) + T(AX,Y,AZ) + T(X,AY,AZ)
    cyclic_sum: cyclic XYZ sums of T(X,Y,Z) and of T(AX,Y,AZ) + T(X,AY,AZ) agree
    """
    a = m.structure(point).components
    t = torsion(m, point, gen).components  # t[i, x, y]
    tl = torsion_lowered(m, point, gen).components  # tl[x, y, z]

    t_axay = np.einsum("imp,mx,py->ixy", t, a, a)
    lhs1 = np.einsum("im,mxy->ixy", a, t_axay)
    rhs1 = (
        np.einsum("im,mxy->ixy", a, t)
        - np.einsum("imy,mx->ixy", t, a)
        - np.einsum("ixm,my->ixy", t, a)
    )

    tl_axay = np.einsum("mpz,mx,py->xyz", tl, a, a)
    tl_axaz = np.einsum("myp,mx,pz->xyz", tl, a, a)
    tl_ayaz = np.einsum("xmp,my,pz->xyz", tl, a, a)
    rhs2 = tl_axay + tl_axaz + tl_ayaz

    def cyc(arr: np.ndarray) -> np.ndarray:
        return arr + np.transpose(arr, (1, 2, 0)) + np.transpose(arr, (2, 0, 1))

    scale = max(norm_max(t), norm_max(tl), 0.0)
    return {
        "twisted_composition": norm_max(lhs1 - rhs1),
        "lowered_reconstruction": norm_max(tl - rhs2),
        "cyclic_sum": norm_max(cyc(tl) - cyc(tl_axaz + tl_ayaz)),
        "scale": scale,
    }
