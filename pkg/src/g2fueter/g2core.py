"""The G2 linear algebra on R^7.

Builds the model 3-form, recovers the metric from a definite 3-form, and
provides the cross product, the associator/coassociator tensors, the
lambda^k isometries onto the 7-dimensional pieces of Lambda^k, and the
Lambda^2_7 / Lambda^2_14 projections.

Conventions fixed here once and used everywhere downstream:
  * orientation vol0 = dx^{1...7};
  * the model 3-form has monomials 123, 145, 167, 246, -257, -347, -356;
  * its Hodge dual is produced by the star and pinned as a golden value
    (STAR_PHI0_TERMS), since every later sign refers to it.
Flipping the orientation flips the sign of the dual 4-form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exterior import (
    Form,
    VectorValuedForm,
    basis_form,
    form_from_terms,
    hodge,
    inner,
    interior,
    pullback,
    wedge,
    zero_form,
)

__all__ = [
    "NotG2FormError",
    "G2Structure",
    "PHI0_TERMS",
    "STAR_PHI0_TERMS",
    "phi0",
    "star_phi0",
    "vol0",
    "metric_from_phi",
    "hodge_metric",
    "standard_g2",
    "g2_from_phi",
    "cross",
    "chi",
    "chi_form",
    "tau",
    "tau_form",
    "lambda_k",
    "lambda_k_inverse",
    "project_k7",
    "project_2_7",
    "project_2_14",
]

DIM = 7

# The seven signed monomials of the model 3-form.
PHI0_TERMS = (
    (1.0, (1, 2, 3)),
    (1.0, (1, 4, 5)),
    (1.0, (1, 6, 7)),
    (1.0, (2, 4, 6)),
    (-1.0, (2, 5, 7)),
    (-1.0, (3, 4, 7)),
    (-1.0, (3, 5, 6)),
)

# Golden value: star of the model 3-form, computed once by the Hodge star
# and verified against it in the test suite.  All downstream signs (chi,
# Theta, the J matrices) trace back to these seven monomials.
STAR_PHI0_TERMS = (
    (1.0, (4, 5, 6, 7)),
    (1.0, (2, 3, 4, 5)),
    (1.0, (2, 3, 6, 7)),
    (1.0, (1, 3, 5, 7)),
    (-1.0, (1, 2, 4, 7)),
    (-1.0, (1, 2, 5, 6)),
    (-1.0, (1, 3, 4, 6)),
)


class NotG2FormError(ValueError):
    """The 3-form does not induce a positive-definite metric."""


def phi0() -> Form:
    return form_from_terms(DIM, 3, PHI0_TERMS)


def star_phi0() -> Form:
    return form_from_terms(DIM, 4, STAR_PHI0_TERMS)


def vol0() -> Form:
    return basis_form(DIM, tuple(range(1, DIM + 1)))


def metric_from_phi(phi: Form):
    """Recover the metric of a definite 3-form on R^7.

    B_ij vol0 = (1/6) i(e_i)phi ^ i(e_j)phi ^ phi, then g = B / det(B)^{1/9}.
    The scalar gauge det(B)^{1/9} is the one making vol_phi = vol_{g_phi}.
    Raises NotG2FormError if det(B) <= 0 or the normalized matrix is not
    positive definite.
    """
    if phi.dim != DIM or phi.degree != 3:
        raise ValueError("expected a 3-form on R^7")
    top = tuple(range(1, DIM + 1))
    contractions = [interior(_unit(i), phi) for i in range(DIM)]
    B = np.empty((DIM, DIM))
    for i in range(DIM):
        for j in range(i, DIM):
            w = wedge(wedge(contractions[i], contractions[j]), phi)
            B[i, j] = B[j, i] = w.coeffs.get(top, 0.0) / 6.0
    det = np.linalg.det(B)
    if det <= 0.0:
        raise NotG2FormError(f"det(B) = {det} is not positive")
    g = B / det ** (1.0 / 9.0)
    if np.any(np.linalg.eigvalsh(g) <= 0.0):
        raise NotG2FormError("normalized metric is not positive definite")
    return g


def _unit(i):
    v = np.zeros(DIM)
    v[i] = 1.0
    return v


def hodge_metric(a: Form, metric) -> Form:
    """Hodge star with respect to an arbitrary positive metric.

    Realized by changing to a g-orthonormal frame (the symmetric square
    root, orientation preserving), starring there, and changing back; the
    bit-exact star itself only ever sees the standard metric.
    """
    metric = np.asarray(metric, dtype=float)
    w, U = np.linalg.eigh(metric)
    if np.any(w <= 0.0):
        raise ValueError("metric must be positive definite")
    S = U @ np.diag(w ** -0.5) @ U.T    # columns: g-orthonormal frame, det > 0
    S_inv = U @ np.diag(w ** 0.5) @ U.T
    return pullback(S_inv, hodge(pullback(S, a)))


@dataclass(frozen=True)
class G2Structure:
    """A constant-coefficient G2 structure on R^7.

    Holds the 3-form, its metric, volume form, dual 4-form, and coframe
    labels.  Consistency (metric recovery, |phi|^2 = 7, vol = vol_g) is
    enforced by the constructors, not re-checked per operation.
    """

    phi: Form
    metric: np.ndarray
    vol: Form
    star_phi: Form
    frame_labels: tuple = tuple(f"e{i}" for i in range(1, 8))

    @property
    def metric_inv(self):
        return np.linalg.inv(self.metric)


def standard_g2() -> G2Structure:
    return G2Structure(
        phi=phi0(), metric=np.eye(DIM), vol=vol0(), star_phi=star_phi0()
    )


def g2_from_phi(phi: Form) -> G2Structure:
    """Build the full structure (metric, volume, dual) from a definite 3-form."""
    g = metric_from_phi(phi)
    vol = basis_form(DIM, tuple(range(1, DIM + 1)), float(np.sqrt(np.linalg.det(g))))
    return G2Structure(phi=phi, metric=g, vol=vol, star_phi=hodge_metric(phi, g))


# -- pointwise tensors ------------------------------------------------------


def cross(u, v, G: G2Structure = None):
    """Cross product: g(u x v, w) = phi(u, v, w) for all w."""
    G = G or standard_g2()
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    c = np.array([G.phi.apply([u, v, _unit(w)]) for w in range(DIM)])
    return G.metric_inv @ c


def chi(u, v, w, G: G2Structure = None):
    """Associator-defect vector: g(chi(u,v,w), x) = (*phi)(u,v,w,x).

    Vanishes exactly on associative triples; together with phi it satisfies
    |phi(u,v,w)|^2 + |chi(u,v,w)|^2 = |u ^ v ^ w|^2.
    """
    G = G or standard_g2()
    u, v, w = (np.asarray(t, dtype=float) for t in (u, v, w))
    c = np.array([G.star_phi.apply([u, v, w, _unit(x)]) for x in range(DIM)])
    return G.metric_inv @ c


def chi_form(G: G2Structure = None) -> VectorValuedForm:
    """chi as a TM-valued 3-form: component m is (u,v,w) -> g(chi(u,v,w), e_m)^sharp.

    Components are the 3-forms i(e_m-slot-last) of *phi, raised by the metric.
    """
    G = G or standard_g2()
    raw = []
    for m in range(DIM):
        comp = {}
        for idx, c in G.star_phi.coeffs.items():
            if (m + 1) in idx:
                pos = idx.index(m + 1)
                rest = idx[:pos] + idx[pos + 1:]
                # move slot m to the last argument: (*phi)(u,v,w,e_m)
                sign = 1.0 if (len(idx) - 1 - pos) % 2 == 0 else -1.0
                comp[rest] = comp.get(rest, 0.0) + sign * c
        raw.append(Form(DIM, 3, comp))
    ginv = G.metric_inv
    comps = []
    for m in range(DIM):
        acc = zero_form(DIM, 3)
        for k in range(DIM):
            if ginv[m, k] != 0.0:
                acc = acc + ginv[m, k] * raw[k]
        comps.append(acc)
    return VectorValuedForm(tuple(comps))


def tau(u, v, w, x, G: G2Structure = None):
    """Coassociator-defect vector from tau = phi ^ id_TM.

    Satisfies |*phi(u,v,w,x)|^2 + |tau(u,v,w,x)|^2 = |u^v^w^x|^2.
    """
    G = G or standard_g2()
    vecs = [np.asarray(t, dtype=float) for t in (u, v, w, x)]
    return tau_form(G).apply(vecs)


def tau_form(G: G2Structure = None) -> VectorValuedForm:
    """tau = phi ^ id_TM as a TM-valued 4-form (component m is phi ^ dx^m)."""
    G = G or standard_g2()
    return VectorValuedForm(
        tuple(wedge(G.phi, basis_form(DIM, (m,))) for m in range(1, DIM + 1))
    )


# -- lambda^k isometries and the 2-form projections --------------------------


def lambda_k(alpha: Form, k: int, G: G2Structure = None) -> Form:
    """The isometry lambda^k of 1-forms onto Lambda^k_7, k in {2, 4, 6}."""
    G = G or standard_g2()
    if alpha.dim != DIM or alpha.degree != 1:
        raise ValueError("expected a 1-form on R^7")
    if k == 2:
        sharp = G.metric_inv @ _one_form_vector(alpha)
        return (1.0 / np.sqrt(3.0)) * interior(sharp, G.phi)
    if k == 4:
        return 0.5 * wedge(alpha, G.phi)
    if k == 6:
        return hodge_metric(alpha, G.metric)
    raise ValueError(f"k must be 2, 4 or 6, got {k}")


def _one_form_vector(alpha: Form):
    v = np.zeros(DIM)
    for (i,), c in alpha.coeffs.items():
        v[i - 1] = c
    return v


def _lambda_matrix(k, G=None):
    """Matrix of lambda^k over the monomial bases, shape (C(7,k), 7)."""
    G = G or standard_g2()
    import itertools

    keys = list(itertools.combinations(range(1, DIM + 1), k))
    key_pos = {key: r for r, key in enumerate(keys)}
    L = np.zeros((len(keys), DIM))
    for j in range(1, DIM + 1):
        img = lambda_k(basis_form(DIM, (j,)), k, G)
        for idx, c in img.coeffs.items():
            L[key_pos[idx], j - 1] = c
    return L, keys


def lambda_k_inverse(beta: Form, k: int, G: G2Structure = None) -> Form:
    """Invert lambda^k on its image (adjoint of an isometry).

    For input not in Lambda^k_7 this returns the preimage of the projection.
    """
    G = G or standard_g2()
    L, keys = _lambda_matrix(k, G)
    vec = np.array([beta.coeffs.get(key, 0.0) for key in keys])
    alpha = L.T @ vec
    return Form(DIM, 1, {(i + 1,): alpha[i] for i in range(DIM)})


def project_k7(a: Form, k: int, G: G2Structure = None) -> Form:
    """Projection of a k-form (k in {2,4,6}) onto the image of lambda^k,
    i.e. the 7-dimensional summand Lambda^k_7, as lambda^k o adjoint."""
    G = G or standard_g2()
    if a.dim != DIM or a.degree != k:
        raise ValueError(f"expected a {k}-form on R^7")
    L, keys = _lambda_matrix(k, G)
    vec = np.array([a.coeffs.get(key, 0.0) for key in keys])
    proj = L @ (L.T @ vec)
    return Form(DIM, k, {key: proj[r] for r, key in enumerate(keys)})


def project_2_7(beta: Form, G: G2Structure = None) -> Form:
    """Projection of a 2-form onto the 7-dimensional piece Lambda^2_7.

    Implemented as lambda^2 composed with its adjoint; the eigenvalue
    characterization (beta + *(phi ^ beta))/3 is kept as an independent
    oracle in the tests.
    """
    return project_k7(beta, 2, G)


def project_2_14(beta: Form, G: G2Structure = None) -> Form:
    """Complementary projection onto Lambda^2_14 = ker(beta -> beta ^ *phi)."""
    return beta - project_2_7(beta, G)


# -- golden fixture -----------------------------------------------------------


def golden_forms():
    """The named constant forms, keyed as in the shipped fixture file."""
    from .exterior import form_from_terms, render

    omega_1 = form_from_terms(DIM, 2, ((1.0, (4, 5)), (1.0, (6, 7))))
    omega_2 = form_from_terms(DIM, 2, ((1.0, (4, 6)), (-1.0, (5, 7))))
    omega_3 = form_from_terms(DIM, 2, ((-1.0, (4, 7)), (-1.0, (5, 6))))
    lam = basis_form(DIM, (1, 2, 3))
    mu = basis_form(DIM, (4, 5, 6, 7))
    omega = phi0() - lam
    theta = star_phi0() - mu
    return {
        "phi0": phi0(),
        "star_phi0": star_phi0(),
        "omega_1": omega_1,
        "omega_2": omega_2,
        "omega_3": omega_3,
        "lambda": lam,
        "omega": omega,
        "Theta": theta,
        "mu": mu,
    }


def render_golden_fixture():
    """Canonical text of the golden forms, one `name = rendering` per line."""
    from .exterior import render

    lines = [f"{name} = {render(form)}" for name, form in golden_forms().items()]
    return "\n".join(lines) + "\n"


def load_golden_fixture():
    """The fixture text shipped with the package."""
    import importlib.resources

    return (
        importlib.resources.files("g2fueter")
        .joinpath("fixtures/g2_forms.txt")
        .read_text()
    )
