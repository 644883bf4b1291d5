"""Geometry relative to a splitting TM = H + V with H associative.

Everything plane-level happens in the splitting's orthonormal frame
coordinates: indices 1..3 are the horizontal frame, 4..7 the vertical one.
A projectable oriented 3-plane is encoded by its graph map T: H -> V, a
3x4 coefficient array with rows v_{i,.}, so that the canonical spanning
frame is v_i = e_i + sum_a T[i,a] eta_a.  That frame is automatically
orthonormal for the horizontal inner product, which is the normalization
all closed formulas here assume.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import g2core
from .exterior import (
    Form,
    VectorValuedForm,
    interior,
    pullback,
    wedge,
    zero_form,
)

__all__ = [
    "NotProjectableError",
    "Splitting",
    "Plane",
    "GraphPlane",
    "standard_splitting",
    "graph_from_plane",
    "beta_of",
    "horizontal_metric",
    "ve_from_gram",
    "ve_series",
    "ve_recursive",
    "decompose_form",
    "adiabatic_family",
    "PlaneSampler",
    "ScanReport",
    "semi_calibration_scan",
    "anisotropic_scan",
    "EqualityLadderReport",
    "equality_ladder",
]

DIM = 7

IDENTITY_RESIDUAL_TOL = 1e-10
INEQUALITY_SLACK = 1e-10
VE1_EXCLUSION = 1e-8


class NotProjectableError(ValueError):
    """The plane fails to project injectively onto H."""


@dataclass(frozen=True)
class Splitting:
    """An orthonormal frame adapted to TM = H + V, H associative.

    h_frame: rows of 3 vectors spanning H (their order fixes the
    orientation); v_frame: rows of 4 vectors spanning V; g2: ambient
    structure.  Construction checks orthonormality and that H is
    calibrated with phi(h1,h2,h3) = +1.
    """

    h_frame: np.ndarray
    v_frame: np.ndarray
    g2: g2core.G2Structure = field(default_factory=g2core.standard_g2)

    def __post_init__(self):
        h = np.asarray(self.h_frame, dtype=float).reshape(3, DIM)
        v = np.asarray(self.v_frame, dtype=float).reshape(4, DIM)
        object.__setattr__(self, "h_frame", h)
        object.__setattr__(self, "v_frame", v)
        F = self.frame_matrix
        gram = F @ self.g2.metric @ F.T
        if np.abs(gram - np.eye(DIM)).max() > 1e-12:
            raise ValueError("frame is not orthonormal in the ambient metric")
        cal = self.g2.phi.apply(list(h))
        if abs(cal - 1.0) > 1e-10:
            raise ValueError(f"phi(h-frame) = {cal}, H is not positively calibrated")
        defect = g2core.chi(h[0], h[1], h[2], self.g2)
        if np.linalg.norm(defect) > 1e-10:
            raise ValueError("H is not associative")

    @property
    def frame_matrix(self):
        """Rows: h1, h2, h3, eta4..eta7."""
        return np.vstack([self.h_frame, self.v_frame])

    # -- frame-coordinate data ----------------------------------------------

    def to_frame(self, a: Form) -> Form:
        """Express an ambient-coordinate form in frame coordinates."""
        if self._is_standard():
            return a
        return pullback(self.frame_matrix.T, a)

    def from_frame(self, a: Form) -> Form:
        if self._is_standard():
            return a
        return pullback(np.linalg.inv(self.frame_matrix.T), a)

    def _is_standard(self):
        return np.array_equal(self.frame_matrix, np.eye(DIM))

    @property
    def phi_f(self) -> Form:
        return self.to_frame(self.g2.phi)

    @property
    def star_phi_f(self) -> Form:
        return self.to_frame(self.g2.star_phi)

    def form_parts(self):
        """(lam, omega, Theta, mu) in frame coordinates.

        lam/omega are the vertical-degree 0/2 parts of phi; Theta/mu the
        degree 2/4 parts of *phi.  For an associative splitting the other
        parts vanish, which is asserted.
        """
        pphi = _vertical_parts(self.phi_f, 3)
        pstar = _vertical_parts(self.star_phi_f, 4)
        for q in (1, 3):
            if not pphi[q].is_zero(1e-12):
                raise AssertionError(f"phi has an unexpected vertical-degree-{q} part")
        for q in (0, 1, 3):
            if not pstar[q].is_zero(1e-12):
                raise AssertionError(f"*phi has an unexpected vertical-degree-{q} part")
        return pphi[0], pphi[2], pstar[2], pstar[4]

    def omega_2form(self, i: int) -> Form:
        """The vertical 2-form omega_i = i(h_i) omega, frame coordinates."""
        _, omega, _, _ = self.form_parts()
        e = np.zeros(DIM)
        e[i - 1] = 1.0
        return interior(e, omega)

    def chi_form_f(self) -> VectorValuedForm:
        """chi as a TM-valued 3-form in frame coordinates (metric = id there)."""
        frame_g2 = g2core.G2Structure(
            phi=self.phi_f,
            metric=np.eye(DIM),
            vol=g2core.vol0(),
            star_phi=self.star_phi_f,
        )
        return g2core.chi_form(frame_g2)


def standard_splitting() -> Splitting:
    eye = np.eye(DIM)
    return Splitting(h_frame=eye[:3], v_frame=eye[3:])


def _vertical_parts(a: Form, degree_cap):
    parts = a.vertical_degree_parts(range(4, DIM + 1))
    return [parts.get(q, zero_form(a.dim, a.degree)) for q in range(degree_cap + 1)]


# -- planes ------------------------------------------------------------------


@dataclass(frozen=True)
class Plane:
    """An oriented s-plane given by independent spanning vectors (ambient)."""

    span: np.ndarray
    oriented: bool = True

    def __post_init__(self):
        span = np.atleast_2d(np.asarray(self.span, dtype=float))
        object.__setattr__(self, "span", span)
        if span.shape[0] > span.shape[1]:
            raise ValueError("more spanning vectors than ambient dimensions")
        sv = np.linalg.svd(span, compute_uv=False)
        if sv.size and sv[-1] <= 1e-10:
            raise ValueError("spanning vectors are (numerically) dependent")

    @property
    def s(self):
        return self.span.shape[0]


@dataclass(frozen=True)
class GraphPlane:
    """A positive horizontally projectable 3-plane, as its graph map T.

    T[i, a] is the eta_{a+4} coefficient of v_i = e_i + T(e_i) in the
    splitting frame; the frame (v_1, v_2, v_3) is orthonormal for the
    horizontal inner product by construction.
    """

    T: np.ndarray
    splitting: Splitting

    def __post_init__(self):
        T = np.asarray(self.T, dtype=float).reshape(3, 4)
        object.__setattr__(self, "T", T)

    def frame(self):
        """Rows: the three spanning vectors in frame coordinates."""
        out = np.zeros((3, DIM))
        out[:, :3] = np.eye(3)
        out[:, 3:] = self.T
        return out

    def frame_ambient(self):
        return self.frame() @ self.splitting.frame_matrix

    def gram_vertical(self):
        """Gram matrix of the vertical parts, G = T T^t."""
        return self.T @ self.T.T


def graph_from_plane(p: Plane, S: Splitting):
    """Convert a 3-plane to graph coordinates.

    Returns (GraphPlane, orientation_sign); the sign is -1 when the
    plane's given orientation disagrees with the projected orientation
    of H.  Raises NotProjectableError when p_H restricted to the plane
    is singular.
    """
    if p.s != 3:
        raise ValueError("graph coordinates require a 3-plane")
    coords = p.span @ S.g2.metric @ S.frame_matrix.T  # rows in frame coordinates
    A = coords[:, :3]
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-10:
        raise NotProjectableError("not horizontally projectable")
    T = np.linalg.solve(A, coords[:, 3:])
    sign = 1 if np.linalg.det(A) > 0 else -1
    return GraphPlane(T=T, splitting=S), sign


def beta_of(g: GraphPlane) -> Form:
    """The 2-form beta = sum_i e^i ^ (T e_i)^flat, frame coordinates."""
    coeffs = {}
    for i in range(3):
        for a in range(4):
            if g.T[i, a] != 0.0:
                coeffs[(i + 1, a + 4)] = g.T[i, a]
    return Form(DIM, 2, coeffs)


def horizontal_metric(p: Plane, S: Splitting):
    """Gram matrix of the horizontal projections of the spanning frame."""
    coords = p.span @ S.g2.metric @ S.frame_matrix.T
    A = coords[:, :3]
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-10:
        raise NotProjectableError("not horizontally projectable")
    return A @ A.T


# -- the vertical energy hierarchy -------------------------------------------


def _sqrt_series_coeffs(kmax):
    """Taylor coefficients of sqrt(1 + t) up to order kmax."""
    c = [1.0]
    for m in range(1, kmax + 1):
        c.append(c[-1] * (0.5 - (m - 1)) / m)
    return c


def ve_from_gram(G, kmax):
    """ve coefficients from the vertical Gram matrix, by eigenvalues.

    Expands prod_i sqrt(1 + eps * lambda_i) in eps through order kmax.
    """
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    lam = np.linalg.eigvalsh(np.asarray(G, dtype=float))
    sq = _sqrt_series_coeffs(kmax)
    series = np.zeros(kmax + 1)
    series[0] = 1.0
    for ev in lam:
        factor = np.array([sq[m] * ev ** m for m in range(kmax + 1)])
        out = np.zeros(kmax + 1)
        for m in range(kmax + 1):
            out[m] = series[: m + 1] @ factor[m::-1]
        series = out
    return series


def ve_series(g: GraphPlane, kmax: int):
    """[ve_0..ve_kmax] via the eigenvalue expansion of sqrt det(I + eps G)."""
    return ve_from_gram(g.gram_vertical(), kmax)


def ve_recursive(g: GraphPlane, kmax: int):
    """[ve_0..ve_kmax] via wedge-power norms and the recursion.

    |(p_V)^k|^2 is k! times the sum of squared k x k minors of T; the
    wedge powers vanish for k > 3, after which the recursion runs on its
    own.  Independent of ve_series (no eigenvalues).
    """
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    T = g.T
    minor_sq = [1.0, 0.0, 0.0, 0.0]
    minor_sq[1] = float(np.sum(T * T))
    import itertools

    for rows in itertools.combinations(range(3), 2):
        for cols in itertools.combinations(range(4), 2):
            m = np.linalg.det(T[np.ix_(rows, cols)])
            minor_sq[2] += m * m
    for cols in itertools.combinations(range(4), 3):
        m = np.linalg.det(T[:, cols])
        minor_sq[3] += m * m

    ve = [1.0]
    if kmax >= 1:
        ve.append(0.5 * minor_sq[1])
    for k in range(2, kmax + 1):
        wedge_term = minor_sq[k] if k <= 3 else 0.0  # already k! * e_k / k!
        ve.append(0.5 * (wedge_term - sum(ve[i] * ve[k - i] for i in range(1, k))))
    return np.array(ve)


# -- decomposition and the adiabatic family ----------------------------------


def decompose_form(a, S: Splitting):
    """Split a form by vertical degree: a = sum_i a_i, a_i with exactly i
    V-frame indices per monomial.  Returns a list of length degree + 1 in
    ambient coordinates; vector-valued input is split componentwise (the
    value slot is untouched)."""
    if isinstance(a, VectorValuedForm):
        comp_parts = [decompose_form(c, S) for c in a.components]
        return [
            VectorValuedForm(tuple(parts[q] for parts in comp_parts))
            for q in range(a.degree + 1)
        ]
    frame_parts = _vertical_parts(S.to_frame(a), a.degree)
    return [S.from_frame(p) for p in frame_parts]


def adiabatic_family(a, S: Splitting, eps: float):
    """The one-parameter family sum_i (sqrt eps)^i a_i.

    Equals the pullback by diag(1,1,1,sqrt(eps)..) in the splitting frame;
    eps = 1 is the identity.  Applies to plain and vector-valued forms.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    parts = decompose_form(a, S)
    root = np.sqrt(eps)
    out = parts[0]
    for q in range(1, len(parts)):
        # even powers of sqrt(eps) computed as integer powers of eps, so
        # the vertical-degree-2q component scales by eps^q bit-exactly
        factor = eps ** (q // 2) * (root if q % 2 else 1.0)
        out = out + factor * parts[q]
    return out


# -- sampling and scans --------------------------------------------------------


class PlaneSampler:
    """Seeded sampler for oriented frames and graph planes.

    Frames: independent standard normal entries, thin-QR orthonormalized
    (in the requested metric), with the QR sign ambiguity fixed by forcing
    a positive R diagonal.  Rotation invariance of the normal ensemble
    makes the plane distribution uniform.
    """

    def __init__(self, seed):
        if seed is None:
            raise ValueError("a seed is mandatory for sampling")
        self.seed = int(seed)
        self.rng = np.random.default_rng(self.seed)

    def frames(self, n, s=3, metric=None, max_retries=5):
        """n oriented s-frames, orthonormal w.r.t. metric, shape (n, s, 7).

        Batched thin QR; rows with a (numerically) degenerate draw are
        redrawn up to max_retries times before giving up.
        """
        if metric is None:
            L = np.eye(DIM)
            L_inv = np.eye(DIM)
        else:
            L = np.linalg.cholesky(np.asarray(metric, dtype=float)).T  # g = L^t L
            L_inv = np.linalg.inv(L)

        def draw(count):
            M = self.rng.standard_normal((count, DIM, s))
            Q, R = np.linalg.qr(L[None] @ M)
            diag = np.diagonal(R, axis1=1, axis2=2)
            good = np.abs(np.prod(diag, axis=1)) > 1e-8
            Q = Q * np.sign(diag)[:, None, :]
            return np.transpose(L_inv[None] @ Q, (0, 2, 1)), good

        out, good = draw(n)
        for _ in range(max_retries):
            bad = np.nonzero(~good)[0]
            if not bad.size:
                return out
            redo, redo_good = draw(bad.size)
            out[bad] = redo
            good[bad] = redo_good
        if not np.all(good):
            raise RuntimeError("degenerate frames persisted across retries")
        return out

    def graph_planes(self, n, scale=1.0):
        """n graph maps T with independent N(0, scale^2) entries, (n, 3, 4)."""
        return scale * self.rng.standard_normal((n, 3, 4))


@dataclass
class ScanReport:
    """Result of a Monte-Carlo comparison scan, JSON-serializable."""

    form: str
    metric: str
    samples: int
    max_ratio: float
    argmax_frame: list
    violations: int
    seed: int
    tol: float
    skipped: int = 0
    equality_cases: list = field(default_factory=list)

    def to_json(self):
        payload = {
            "form": self.form,
            "metric": self.metric,
            "samples": self.samples,
            "maxRatio": self.max_ratio,
            "argmaxFrame": self.argmax_frame,
            "violations": self.violations,
            "seed": self.seed,
            "tol": self.tol,
            "skipped": self.skipped,
            "equalityCases": self.equality_cases,
        }
        return json.dumps(payload, sort_keys=True)

    @property
    def passed(self):
        return self.violations == 0


def batch_apply_3form(a: Form, frames):
    """Evaluate a 3-form on a batch of frames, shape (n, 3, 7) -> (n,)."""
    dense = a.to_dense()
    return np.einsum("ijk,ni,nj,nk->n", dense, frames[:, 0], frames[:, 1], frames[:, 2])


def semi_calibration_scan(
    a: Form,
    metric,
    sampler: PlaneSampler,
    n: int,
    tol: float = INEQUALITY_SLACK,
    include_frames=(),
    label="",
) -> ScanReport:
    """Check alpha(frame) <= vol(frame) over n random oriented 3-planes.

    Frames are orthonormalized in the given metric, so the ratio is the
    raw evaluation alpha(v1, v2, v3).  Violation: ratio > 1 + tol.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    frames = sampler.frames(n, s=3, metric=metric)
    if len(include_frames):
        frames = np.concatenate([np.asarray(include_frames, dtype=float), frames])
    ratios = batch_apply_3form(a, frames)
    imax = int(np.argmax(ratios))
    violations = int(np.sum(ratios > 1.0 + tol))
    return ScanReport(
        form=label or str(a),
        metric=np.array2string(np.asarray(metric), precision=6),
        samples=int(frames.shape[0]),
        max_ratio=float(ratios[imax]),
        argmax_frame=[[float(x) for x in v] for v in frames[imax]],
        violations=violations,
        seed=sampler.seed,
        tol=tol,
    )


def omega_of_graph_frames(S: Splitting, Ts):
    """omega(v1, v2, v3) for a batch of graph maps, shape (n, 3, 4) -> (n,).

    Closed form: only terms with one horizontal and two vertical slots
    survive, giving omega_1(u2,u3) - omega_2(u1,u3) + omega_3(u1,u2).
    """
    Ts = np.asarray(Ts, dtype=float)
    w = [S.omega_2form(i).to_dense()[3:, 3:] for i in (1, 2, 3)]
    u1, u2, u3 = Ts[:, 0], Ts[:, 1], Ts[:, 2]
    return (
        np.einsum("ab,na,nb->n", w[0], u2, u3)
        - np.einsum("ab,na,nb->n", w[1], u1, u3)
        + np.einsum("ab,na,nb->n", w[2], u1, u2)
    )


def anisotropic_scan(
    S: Splitting,
    sampler: PlaneSampler,
    n: int,
    tol: float = INEQUALITY_SLACK,
    scale: float = 1.0,
    include_planes=(),
    check_identity: bool = True,
) -> ScanReport:
    """Check omega(v) <= ve_1(pi) over n random graph planes.

    Planes with ve_1 below the 0/0 exclusion threshold are skipped and
    counted.  Near-equality cases (ratio > 1 - 1e-6) are re-examined with
    the six-way condition residuals and attached to the report.  With
    check_identity, the pointwise identity omega(v) + |chi_1(v)|^2 / 2 =
    ve_1 is also enforced on every sample.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    Ts = sampler.graph_planes(n, scale=scale)
    if len(include_planes):
        Ts = np.concatenate([np.asarray(include_planes, dtype=float), Ts])
    omega_vals = omega_of_graph_frames(S, Ts)
    ve1 = 0.5 * np.einsum("nia,nia->n", Ts, Ts)
    keep = ve1 >= VE1_EXCLUSION
    skipped = int(np.sum(~keep))
    ratios = np.where(keep, omega_vals / np.where(keep, ve1, 1.0), -np.inf)

    if check_identity:
        from .fueter import fueter_map_matrix

        F = (fueter_map_matrix(S) @ Ts.reshape(len(Ts), 12).T).T
        identity_residual = np.abs(omega_vals + 0.5 * np.sum(F * F, axis=1) - ve1)
        worst = float(identity_residual.max())
        if worst > IDENTITY_RESIDUAL_TOL:
            raise AssertionError(
                f"secondary-calibration identity violated: residual {worst}"
            )

    imax = int(np.argmax(ratios))
    violations = int(np.sum(ratios > 1.0 + tol))
    equality_cases = []
    near = np.nonzero(ratios > 1.0 - 1e-6)[0]
    if near.size:
        from .fueter import condition_residuals

        for idx in near[:16]:
            report = condition_residuals(GraphPlane(T=Ts[idx], splitting=S))
            equality_cases.append(report.as_dict())
    return ScanReport(
        form="omega (secondary calibration)",
        metric="ve1 * volH",
        samples=int(Ts.shape[0]),
        max_ratio=float(ratios[imax]),
        argmax_frame=[[float(x) for x in row] for row in Ts[imax]],
        violations=violations,
        seed=sampler.seed,
        tol=tol,
        skipped=skipped,
        equality_cases=equality_cases,
    )


# -- the equality ladder -------------------------------------------------------


@dataclass
class EqualityLadderReport:
    even_residuals: list      # index ell-1: identity at weight 2*ell
    odd_residuals: list       # index ell-1: identity at weight 2*ell+1
    ve_match_residuals: list  # |v_ell|^2 against sum ve_i ve_j
    vanishing_depth: int
    ladder_residuals: list    # per verified depth: alpha_{2l}(v) vs ve_l

    @property
    def max_residual(self):
        pools = (
            self.even_residuals + self.odd_residuals
            + self.ve_match_residuals + self.ladder_residuals
        )
        return max(pools) if pools else 0.0


def equality_ladder(g: GraphPlane, lmax: int = 3, tol=IDENTITY_RESIDUAL_TOL):
    """Residuals of the graded equality identities on a graph plane.

    For each ell the even identity compares sum_{i+j=2 ell} of the alpha-
    and chi-pairings against |v_ell|^2, itself cross-checked against the
    ve-convolution; the odd identities must vanish.  On a k-vanishing
    plane the ladder identities alpha_{2l}(v) = ve_l and
    alpha_{2k+2}(v) + |chi_{k+1}(v)|^2 / 2 = ve_{k+1} are also evaluated.
    """
    S = g.splitting
    frame = g.frame()
    vecs = list(frame)

    alpha_parts = _vertical_parts(S.phi_f, 3)
    alpha_vals = [p.apply(vecs) for p in alpha_parts]

    # chi_form_f already lives in frame coordinates: split in place
    chi_comp_parts = [_vertical_parts(c, 3) for c in S.chi_form_f().components]
    chi_parts = [
        VectorValuedForm(tuple(parts[q] for parts in chi_comp_parts)) for q in range(4)
    ]
    chi_vals = [p.apply(vecs) for p in chi_parts]

    v_parts_sq = _wedge3_vertical_norms(frame)
    kmax = 2 * lmax + 2
    ve = ve_from_gram(g.gram_vertical(), max(kmax, 3))

    def pairing(total):
        acc = 0.0
        for i in range(4):
            j = total - i
            if 0 <= j <= 3:
                acc += alpha_vals[i] * alpha_vals[j]
                acc += float(chi_vals[i] @ chi_vals[j])
        return acc

    even, odd, ve_match = [], [], []
    for ell in range(1, lmax + 1):
        lhs = pairing(2 * ell)
        target = v_parts_sq[ell] if ell < len(v_parts_sq) else 0.0
        even.append(abs(lhs - target))
        conv = sum(ve[i] * ve[ell - i] for i in range(ell + 1))
        ve_match.append(abs(target - conv))
        odd.append(abs(pairing(2 * ell + 1)))

    chi_norms = [float(np.linalg.norm(chi_vals[i])) for i in range(4)]
    depth = 0
    while depth < 3 and chi_norms[depth + 1] < tol:
        depth += 1

    ladder = []
    for ell in range(1, depth + 1):
        a_val = alpha_vals[2 * ell] if 2 * ell <= 3 else 0.0
        ladder.append(abs(a_val - ve[ell]))
        a_odd = alpha_vals[2 * ell + 1] if 2 * ell + 1 <= 3 else 0.0
        ladder.append(abs(a_odd))
    if depth < 3:
        a_next = alpha_vals[2 * depth + 2] if 2 * depth + 2 <= 3 else 0.0
        ladder.append(abs(a_next + 0.5 * chi_norms[depth + 1] ** 2 - ve[depth + 1]))

    return EqualityLadderReport(
        even_residuals=even,
        odd_residuals=odd,
        ve_match_residuals=ve_match,
        vanishing_depth=depth,
        ladder_residuals=ladder,
    )


def _wedge3_vertical_norms(frame):
    """|v_ell|^2 for the vertical-degree pieces of v1 ^ v2 ^ v3."""
    import itertools

    norms = [0.0, 0.0, 0.0, 0.0]
    mat = frame.T  # 7 x 3
    for idx in itertools.combinations(range(DIM), 3):
        c = np.linalg.det(mat[list(idx), :])
        q = sum(1 for i in idx if i >= 3)
        norms[q] += c * c
    return norms
