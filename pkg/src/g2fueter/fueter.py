"""The Fueter operator on projectable 3-planes and its characterizations.

A projectable plane is Fueter when the vertical vector
F(pi) = sum_i p_H(v_i) x p_V(v_i) vanishes; this module computes that
vector by several independent routes (cross products, the J-matrix
triple, contractions of the dual 4-form, wedge conditions on beta) and
exposes the equivalence as a six-way residual report.  It also provides
the completion constructions, the chi_i-from-beta formulas, k-vanishing depth,
the linearization rank of the Fueter Grassmannian, and polar-space
dimensions for the associative and Fueter exterior systems.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import g2core
from .exterior import Form, basis_form, hodge, interior, wedge
from .splitting import (
    DIM,
    GraphPlane,
    NotProjectableError,
    Plane,
    Splitting,
    _vertical_parts,
    standard_splitting,
    ve_series,
)

__all__ = [
    "JTriple",
    "standard_jtriple",
    "jtriple_from_splitting",
    "fueter_vector",
    "fueter_via_J",
    "fueter_map_matrix",
    "fueter_complete",
    "associative_complete",
    "ConditionReport",
    "condition_residuals",
    "chi_component_values",
    "chi_via_beta",
    "chi1_via_projection",
    "KVanishingProfile",
    "k_vanishing_profile",
    "linearization_rank",
    "polar_space_dim",
    "polar_dim_constancy",
]

CONSTRUCTION_TOL = 1e-12
IDENTITY_TOL = 1e-10
NONVANISHING_FLOOR = 1e-6


@dataclass(frozen=True)
class JTriple:
    """Three anticommuting complex structures on V, as 4x4 matrices.

    Construction enforces J_i^2 = -id, J_1 J_2 = -J_3 and the mutual
    anticommutation relations.
    """

    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray

    def __post_init__(self):
        Js = tuple(np.asarray(J, dtype=float).reshape(4, 4) for J in (self.J1, self.J2, self.J3))
        object.__setattr__(self, "J1", Js[0])
        object.__setattr__(self, "J2", Js[1])
        object.__setattr__(self, "J3", Js[2])
        eye = np.eye(4)
        for J in Js:
            if np.abs(J @ J + eye).max() > CONSTRUCTION_TOL:
                raise ValueError("J^2 != -id")
        if np.abs(Js[0] @ Js[1] + Js[2]).max() > CONSTRUCTION_TOL:
            raise ValueError("J1 J2 != -J3")
        for i in range(3):
            for j in range(i + 1, 3):
                if np.abs(Js[i] @ Js[j] + Js[j] @ Js[i]).max() > CONSTRUCTION_TOL:
                    raise ValueError("J_i, J_j do not anticommute")

    def as_tuple(self):
        return (self.J1, self.J2, self.J3)


def standard_jtriple() -> JTriple:
    """The J matrices of the standard splitting (V coordinates eta_4..eta_7)."""
    J1 = np.array([
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
    J2 = np.array([
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ])
    J3 = np.array([
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ])
    return JTriple(J1, J2, J3)


def jtriple_from_splitting(S: Splitting) -> JTriple:
    """J_i as the action of h_i x (.) on V, in the splitting's V-frame."""
    dense = S.phi_f.to_dense()
    Js = []
    for i in range(3):
        J = np.empty((4, 4))
        for a in range(4):
            for b in range(4):
                J[b, a] = dense[i, 3 + a, 3 + b]
        Js.append(J)
    return JTriple(*Js)


# -- the operator, by two routes ---------------------------------------------


def fueter_vector(g: GraphPlane):
    """F(pi) = sum_i p_H(v_i) x p_V(v_i), via cross products.

    Returns V-frame coordinates (length 4).  Independent of the choice of
    horizontal-orthonormal frame since it contracts against the dual of
    the horizontal inner product.
    """
    S = g.splitting
    dense = S.phi_f.to_dense()
    out = np.zeros(4)
    for i in range(3):
        u = np.zeros(DIM)
        u[3:] = g.T[i]
        # (h_i x u)_k = phi_f(e_i, u, e_k); only vertical components survive
        out += np.einsum("jk,j->k", dense[i], u)[3:]
    return out


def fueter_via_J(g: GraphPlane, J: JTriple = None):
    """F(pi) = sum_i J_i(p_V(v_i)), the matrix route."""
    J = J or jtriple_from_splitting(g.splitting)
    return sum(Ji @ g.T[i] for i, Ji in enumerate(J.as_tuple()))


def fueter_map_matrix(S: Splitting = None):
    """Matrix of the linear map T -> F(pi) over row-major flattened T, 4 x 12."""
    S = S or standard_splitting()
    J = jtriple_from_splitting(S)
    M = np.zeros((4, 12))
    for i, Ji in enumerate(J.as_tuple()):
        M[:, 4 * i: 4 * i + 4] = Ji
    return M


# -- completions -------------------------------------------------------------


def fueter_complete(v1, v2, S: Splitting = None, return_system=False):
    """Complete a projectable pair to the unique Fueter plane.

    v1, v2 are ambient vectors whose horizontal projections must be
    orthonormal.  Returns the third frame vector v3 with p_H(v3) =
    p_H(v1) x p_H(v2); its vertical part is the unique solution of the
    square linear system J(h3) x = -(h1 x u1 + h2 x u2), whose condition
    number is available through return_system.
    """
    S = S or standard_splitting()
    f1 = _frame_coords(v1, S)
    f2 = _frame_coords(v2, S)
    h1, h2 = f1[:3], f2[:3]
    if (
        abs(h1 @ h1 - 1.0) > 1e-10
        or abs(h2 @ h2 - 1.0) > 1e-10
        or abs(h1 @ h2) > 1e-10
    ):
        raise ValueError("horizontal parts of v1, v2 must be orthonormal")
    dense = S.phi_f.to_dense()

    def cross_f(a, b):
        return np.einsum("ijk,i,j->k", dense, a, b)

    u1 = np.concatenate([np.zeros(3), f1[3:]])
    u2 = np.concatenate([np.zeros(3), f2[3:]])
    e1 = np.concatenate([h1, np.zeros(4)])
    e2 = np.concatenate([h2, np.zeros(4)])
    h3 = cross_f(e1, e2)
    rhs = -(cross_f(e1, u1) + cross_f(e2, u2))[3:]
    M = np.empty((4, 4))
    for a in range(4):
        eta = np.zeros(DIM)
        eta[3 + a] = 1.0
        M[:, a] = cross_f(h3, eta)[3:]
    x = np.linalg.solve(M, rhs)
    f3 = h3.copy()
    f3[3:] += x
    v3 = f3 @ S.frame_matrix
    if return_system:
        return v3, M, np.linalg.cond(M)
    return v3


def associative_complete(v1, v2, G: g2core.G2Structure = None):
    """v1 x v2, spanning with v1, v2 the unique associative 3-plane."""
    G = G or g2core.standard_g2()
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if np.linalg.svd(np.vstack([v1, v2]), compute_uv=False)[-1] <= 1e-10:
        raise ValueError("v1, v2 must be linearly independent")
    return g2core.cross(v1, v2, G)


def _frame_coords(v, S: Splitting):
    return S.frame_matrix @ (S.g2.metric @ np.asarray(v, dtype=float))


# -- the six-way report --------------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    """Residuals of the six equivalent Fueter conditions, computed by
    independent code paths.  On a Fueter plane all six vanish; on a
    generic plane none does (the gap entry is quadratic in the rest)."""

    anisotropic_gap: float
    fueter_norm: float
    chi1_norm: float
    theta_contraction_norm: float
    beta_wedge_star_phi_norm: float
    beta_wedge_theta_norm: float
    T: tuple

    def as_dict(self):
        return {
            "anisotropicGap": self.anisotropic_gap,
            "fueterNorm": self.fueter_norm,
            "chi1Norm": self.chi1_norm,
            "thetaContractionNorm": self.theta_contraction_norm,
            "betaWedgeStarPhiNorm": self.beta_wedge_star_phi_norm,
            "betaWedgeThetaNorm": self.beta_wedge_theta_norm,
            "T": [list(row) for row in self.T],
        }

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True)

    def residuals(self):
        return (
            self.anisotropic_gap,
            self.fueter_norm,
            self.chi1_norm,
            self.theta_contraction_norm,
            self.beta_wedge_star_phi_norm,
            self.beta_wedge_theta_norm,
        )

    def all_below(self, tol=1e-9):
        return all(abs(r) <= tol for r in self.residuals())

    def none_below(self, floor=NONVANISHING_FLOOR):
        return all(abs(r) >= floor for r in self.residuals())


def condition_residuals(g: GraphPlane) -> ConditionReport:
    """Evaluate all six Fueter conditions on one plane."""
    from .splitting import beta_of

    S = g.splitting
    frame = list(g.frame())
    lam, omega, theta, mu = S.form_parts()

    # (1) anisotropic gap ve1 * volH(v) - omega(v); volH(v) = 1 in graph frame
    ve1 = ve_series(g, 1)[1]
    gap = ve1 - omega.apply(frame)

    # (2) |F| by cross products
    f_norm = float(np.linalg.norm(fueter_vector(g)))

    # (3) |chi_1(v)| via chi_1 = -sum_a eta_a (x) i(eta_a) Theta
    chi1 = np.zeros(4)
    for a in range(4):
        eta = np.zeros(DIM)
        eta[3 + a] = 1.0
        chi1[a] = -interior(eta, theta).apply(frame)
    chi1_norm = float(np.linalg.norm(chi1))

    # (4) sup over the coframe of |Theta(v1,v2,v3, .)|
    theta_contraction = 0.0
    for k in range(DIM):
        ek = np.zeros(DIM)
        ek[k] = 1.0
        theta_contraction = max(theta_contraction, abs(theta.apply(frame + [ek])))

    # (5) and (6): wedge conditions on beta
    beta = beta_of(g)
    w5 = wedge(beta, S.star_phi_f).norm()
    w6 = wedge(beta, theta).norm()

    return ConditionReport(
        anisotropic_gap=float(gap),
        fueter_norm=f_norm,
        chi1_norm=chi1_norm,
        theta_contraction_norm=float(theta_contraction),
        beta_wedge_star_phi_norm=float(w5),
        beta_wedge_theta_norm=float(w6),
        T=tuple(tuple(float(x) for x in row) for row in g.T),
    )


# -- chi components ------------------------------------------------------------


def chi_component_values(g: GraphPlane):
    """[chi_0(v), .., chi_3(v)] as ambient-frame vectors (length 7 each),
    from the vertical-degree decomposition of the chi tensor."""
    S = g.splitting
    frame = list(g.frame())
    comp_parts = [_vertical_parts(c, 3) for c in S.chi_form_f().components]
    out = []
    for q in range(4):
        out.append(np.array([parts[q].apply(frame) for parts in comp_parts]))
    return out


def chi_via_beta(g: GraphPlane):
    """(chi_1(v)^flat, chi_2(v)^flat, chi_3(v)^flat) as 1-forms from beta.

    chi_1^flat = *(beta ^ *phi); chi_2^flat = -2 (lambda^4)^{-1} of the
    Lambda^4_7 part of beta^2/2; chi_3^flat = -*(beta^3/6).
    """
    from .splitting import beta_of

    S = g.splitting
    frame_g2 = g2core.G2Structure(
        phi=S.phi_f, metric=np.eye(DIM), vol=g2core.vol0(), star_phi=S.star_phi_f
    )
    beta = beta_of(g)
    chi1 = hodge(wedge(beta, S.star_phi_f))
    half_beta2 = 0.5 * wedge(beta, beta)
    chi2 = -2.0 * g2core.lambda_k_inverse(
        g2core.project_k7(half_beta2, 4, frame_g2), 4, frame_g2
    )
    beta3 = wedge(wedge(beta, beta), beta)
    chi3 = -1.0 * hodge((1.0 / 6.0) * beta3)
    return chi1, chi2, chi3


def chi1_via_projection(g: GraphPlane) -> Form:
    """Alternative route: chi_1(v)^flat = sqrt(3) (lambda^2)^{-1} (pi^2_7 beta)."""
    from .splitting import beta_of

    S = g.splitting
    frame_g2 = g2core.G2Structure(
        phi=S.phi_f, metric=np.eye(DIM), vol=g2core.vol0(), star_phi=S.star_phi_f
    )
    beta = beta_of(g)
    return np.sqrt(3.0) * g2core.lambda_k_inverse(
        g2core.project_2_7(beta, frame_g2), 2, frame_g2
    )


# -- k-vanishing ----------------------------------------------------------------


@dataclass(frozen=True)
class KVanishingProfile:
    depth: int
    chi_norms: tuple           # |chi_1(v)|, |chi_2(v)|, |chi_3(v)|
    identity_residuals: tuple  # ladder identities verified at this depth

    def max_identity_residual(self):
        return max(self.identity_residuals) if self.identity_residuals else 0.0


def k_vanishing_profile(g: GraphPlane, tol=IDENTITY_TOL) -> KVanishingProfile:
    """Maximal k with chi_i(v) = 0 for i <= k, plus the equivalent
    alpha-identities at each verified depth."""
    S = g.splitting
    frame = list(g.frame())
    chi_vals = chi_component_values(g)
    norms = tuple(float(np.linalg.norm(chi_vals[i])) for i in (1, 2, 3))
    depth = 0
    while depth < 3 and norms[depth] < tol:
        depth += 1

    alpha_parts = _vertical_parts(S.phi_f, 3)
    alpha_vals = [p.apply(frame) for p in alpha_parts]
    ve = ve_series(g, max(depth + 1, 3))
    residuals = []
    for ell in range(1, depth + 1):
        a_even = alpha_vals[2 * ell] if 2 * ell <= 3 else 0.0
        a_odd = alpha_vals[2 * ell + 1] if 2 * ell + 1 <= 3 else 0.0
        residuals.append(abs(a_even - ve[ell]))
        residuals.append(abs(a_odd))
    if depth < 3:
        a_next = alpha_vals[2 * depth + 2] if 2 * depth + 2 <= 3 else 0.0
        residuals.append(abs(a_next + 0.5 * norms[depth] ** 2 - ve[depth + 1]))
    return KVanishingProfile(
        depth=depth, chi_norms=norms, identity_residuals=tuple(residuals)
    )


# -- linearization and polar spaces ----------------------------------------------


def linearization_rank(g: GraphPlane, tol=IDENTITY_TOL) -> int:
    """Rank of T -> F over the 12-dimensional graph coordinates at a Fueter
    point.  The solution Grassmannian has dimension 12 - rank (= 8)."""
    if np.linalg.norm(fueter_vector(g)) >= tol:
        raise ValueError("input plane is not Fueter")
    M = fueter_map_matrix(g.splitting)
    return int(np.linalg.matrix_rank(M, tol=1e-10))


def polar_space_dim(W: Plane, system: str, S: Splitting = None) -> int:
    """Dimension of the polar space of an integral s-plane (s in {0,1,2}).

    The generating sets are the 7 component 3-forms of chi (associative
    system) or the 4 components of chi_1 (Fueter system).  For s < 2 the
    ideal has no forms of degree s+1, so every direction extends; for
    s = 2 the polar space is the kernel of X -> chi(w1, w2, X) (or chi_1).
    """
    S = S or standard_splitting()
    if system not in ("associative", "fueter"):
        raise ValueError(f"unknown system {system!r}")
    s = W.s
    if s >= 3:
        raise ValueError("polar spaces computed for s <= 2 only")
    if s < 2:
        return DIM

    coords = W.span @ S.g2.metric @ S.frame_matrix.T
    if system == "fueter":
        A = coords[:, :3]
        if np.linalg.svd(A, compute_uv=False)[-1] <= 1e-10:
            raise NotProjectableError("fueter system requires a projectable plane")
        comp_parts = [_vertical_parts(c, 3) for c in S.chi_form_f().components]
        generators = [parts[1] for parts in comp_parts]
    else:
        generators = list(S.chi_form_f().components)

    w1, w2 = coords
    rows = []
    for gen in generators:
        rows.append([
            gen.apply([w1, w2, _unit7(j)]) for j in range(DIM)
        ])
    M = np.array(rows)
    rank = int(np.linalg.matrix_rank(M, tol=1e-10))
    return DIM - rank


def _unit7(j):
    v = np.zeros(DIM)
    v[j] = 1.0
    return v


def polar_dim_constancy(system: str, s: int, n: int, seed, S: Splitting = None):
    """Sampled regularity check: polar dimensions over n random integral
    s-planes (projectable ones for the Fueter system).  Returns a dict
    dimension -> count; regularity at this scale means a single key."""
    S = S or standard_splitting()
    rng = np.random.default_rng(seed)
    counts = {}
    produced = 0
    while produced < n:
        span = rng.standard_normal((s, DIM)) if s else np.zeros((0, DIM))
        if s:
            if np.linalg.svd(span, compute_uv=False)[-1] <= 1e-6:
                continue
            if system == "fueter" and s == 2:
                A = (span @ S.g2.metric @ S.frame_matrix.T)[:, :3]
                if np.linalg.svd(A, compute_uv=False)[-1] <= 1e-6:
                    continue
        d = polar_space_dim(Plane(span), system, S) if s else DIM
        counts[d] = counts.get(d, 0) + 1
        produced += 1
    return counts
