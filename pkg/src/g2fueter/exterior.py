"""Real exterior algebra over R^n (3 <= n <= 8) with the standard metric.

Forms are stored sparsely: a degree-k form is a mapping from strictly
increasing k-index tuples over {1..n} to real coefficients.  The Hodge star
is defined only for the standard orthonormal metric and the standard
orientation vol = dx^{1...n}; non-orthonormal metrics are handled upstream
by changing frames with `pullback`, never here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Form",
    "VectorValuedForm",
    "DimensionMismatchError",
    "wedge",
    "hodge",
    "interior",
    "inner",
    "pullback",
    "zero_form",
    "basis_form",
    "form_from_terms",
    "render",
]

DEFAULT_TOL = 1e-12

_MIN_DIM, _MAX_DIM = 3, 8


class DimensionMismatchError(ValueError):
    """Operands live in different ambient dimensions or degrees."""


def _check_index_tuple(idx, degree, dim):
    if len(idx) != degree:
        raise ValueError(f"index tuple {idx} has length {len(idx)}, expected {degree}")
    if any(not (1 <= i <= dim) for i in idx):
        raise ValueError(f"index tuple {idx} out of range 1..{dim}")
    if any(idx[i] >= idx[i + 1] for i in range(len(idx) - 1)):
        raise ValueError(f"index tuple {idx} is not strictly increasing")


def _sort_with_sign(indices):
    """Sort an index sequence, returning (sorted tuple, parity sign) or
    (None, 0) if an index repeats."""
    idx = list(indices)
    sign = 1
    # insertion sort; counts transpositions exactly
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and idx[j - 1] == idx[j]:
            return None, 0
    return tuple(idx), sign


@dataclass(frozen=True)
class Form:
    """Alternating k-form on R^n, sparse over sorted index tuples.

    Absent entries are zero.  Instances are treated as immutable values;
    all operations return new Forms.
    """

    dim: int
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (_MIN_DIM <= self.dim <= _MAX_DIM):
            raise ValueError(f"ambient dimension {self.dim} outside 3..8")
        if self.degree < 0:
            raise ValueError(f"negative degree {self.degree}")
        if self.degree > self.dim:
            # Lambda^k(R^n) = 0 for k > n; only the zero form is representable
            if any(c != 0.0 for c in self.coeffs.values()):
                raise ValueError(f"degree {self.degree} exceeds dimension {self.dim}")
            object.__setattr__(self, "coeffs", {})
            return
        cleaned = {}
        for idx, c in self.coeffs.items():
            idx = tuple(int(i) for i in idx)
            _check_index_tuple(idx, self.degree, self.dim)
            if c != 0.0:
                cleaned[idx] = float(c)
        object.__setattr__(self, "coeffs", cleaned)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        self._compat(other)
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            out[idx] = out.get(idx, 0.0) + c
        return Form(self.dim, self.degree, out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, scalar):
        return Form(self.dim, self.degree, {k: scalar * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def _compat(self, other):
        if self.dim != other.dim or self.degree != other.degree:
            raise DimensionMismatchError(
                f"(dim={self.dim}, deg={self.degree}) vs (dim={other.dim}, deg={other.degree})"
            )

    # -- queries ------------------------------------------------------------

    def norm(self):
        """Norm in the standard monomial-orthonormal inner product."""
        return float(np.sqrt(sum(c * c for c in self.coeffs.values())))

    def is_zero(self, tol=DEFAULT_TOL):
        return all(abs(c) <= tol for c in self.coeffs.values())

    def equals(self, other, tol=DEFAULT_TOL):
        self._compat(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeffs.get(k, 0.0) - other.coeffs.get(k, 0.0)) <= tol for k in keys)

    def apply(self, vectors):
        """Evaluate on a list of self.degree vectors (each a length-dim array)."""
        vectors = [np.asarray(v, dtype=float) for v in vectors]
        if len(vectors) != self.degree:
            raise ValueError(f"expected {self.degree} vectors, got {len(vectors)}")
        if self.degree == 0:
            return self.coeffs.get((), 0.0)
        mat = np.column_stack(vectors)  # dim x k
        total = 0.0
        for idx, c in self.coeffs.items():
            rows = [i - 1 for i in idx]
            total += c * np.linalg.det(mat[rows, :])
        return float(total)

    def to_dense(self):
        """Fully antisymmetric dense ndarray of shape (dim,)*degree (0-based)."""
        shape = (self.dim,) * self.degree
        out = np.zeros(shape)
        if self.degree == 0:
            return np.array(self.coeffs.get((), 0.0))
        for idx, c in self.coeffs.items():
            base = [i - 1 for i in idx]
            for perm in itertools.permutations(range(self.degree)):
                sign = _permutation_sign(perm)
                out[tuple(base[p] for p in perm)] = sign * c
        return out

    def vertical_degree_parts(self, vertical_indices):
        """Split by the number of indices per monomial lying in `vertical_indices`."""
        vset = set(vertical_indices)
        parts = {}
        for idx, c in self.coeffs.items():
            q = sum(1 for i in idx if i in vset)
            parts.setdefault(q, {})[idx] = c
        return {
            q: Form(self.dim, self.degree, coeffs) for q, coeffs in parts.items()
        }

    def __str__(self):
        return render(self)


def _permutation_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, cycle = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            cycle += 1
        if cycle % 2 == 0:
            sign = -sign
    return sign


# -- constructors -----------------------------------------------------------


def zero_form(dim, degree):
    return Form(dim, degree, {})


def basis_form(dim, indices, coeff=1.0):
    """Monomial coeff * dx^{i1...ik}; indices need not be sorted."""
    idx, sign = _sort_with_sign(indices)
    if idx is None:
        return zero_form(dim, len(indices))
    return Form(dim, len(indices), {idx: sign * coeff})


def form_from_terms(dim, degree, terms):
    """Build a form from (coefficient, indices) pairs, indices in any order."""
    out = zero_form(dim, degree)
    for coeff, indices in terms:
        out = out + basis_form(dim, indices, coeff)
    return out


# -- core operations --------------------------------------------------------


def wedge(a: Form, b: Form) -> Form:
    """Exterior product.  Bilinear, graded-anticommutative."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dim {a.dim} vs {b.dim}")
    degree = a.degree + b.degree
    if degree > a.dim:
        return Form(a.dim, degree, {})
    out = {}
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            idx, sign = _sort_with_sign(ia + ib)
            if idx is None:
                continue
            out[idx] = out.get(idx, 0.0) + sign * ca * cb
    return Form(a.dim, degree, out)


def hodge(a: Form) -> Form:
    """Hodge star for the standard metric and orientation dx^{1..n}.

    Satisfies ** = (-1)^{k(n-k)} id; in particular ** = id for n = 7.
    """
    n = a.dim
    full = set(range(1, n + 1))
    out = {}
    for idx, c in a.coeffs.items():
        comp = tuple(sorted(full - set(idx)))
        _, sign = _sort_with_sign(idx + comp)
        out[comp] = out.get(comp, 0.0) + sign * c
    return Form(n, n - a.degree, out)


def interior(v, a: Form) -> Form:
    """Interior product i(v)a for a vector v in R^dim.

    An antiderivation of degree -1; on a degree-0 form returns the zero form.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (a.dim,):
        raise DimensionMismatchError(f"vector shape {v.shape} vs dim {a.dim}")
    if a.degree == 0:
        return zero_form(a.dim, 0)
    out = {}
    for idx, c in a.coeffs.items():
        for pos, i in enumerate(idx):
            if v[i - 1] == 0.0:
                continue
            rest = idx[:pos] + idx[pos + 1:]
            sign = -1.0 if pos % 2 else 1.0
            out[rest] = out.get(rest, 0.0) + sign * v[i - 1] * c
    return Form(a.dim, a.degree - 1, out)


def inner(a: Form, b: Form) -> float:
    """Inner product with the monomial basis orthonormal."""
    a._compat(b)
    keys = set(a.coeffs) & set(b.coeffs)
    return float(sum(a.coeffs[k] * b.coeffs[k] for k in keys))


def pullback(A, a: Form) -> Form:
    """Pullback by the linear map A: R^n -> R^n, i.e. (A*a)(v...) = a(Av...).

    Functorial: pullback(AB, a) = pullback(B, pullback(A, a)).
    """
    A = np.asarray(A, dtype=float)
    n = a.dim
    if A.shape != (n, n):
        raise DimensionMismatchError(f"matrix shape {A.shape} vs dim {n}")
    if a.degree == 0:
        return a
    out = {}
    cols = list(itertools.combinations(range(1, n + 1), a.degree))
    for idx, c in a.coeffs.items():
        rows = [i - 1 for i in idx]
        sub = A[rows, :]
        for J in cols:
            minor = np.linalg.det(sub[:, [j - 1 for j in J]])
            if minor != 0.0:
                out[J] = out.get(J, 0.0) + c * minor
    return Form(n, a.degree, out)


# -- vector-valued forms ----------------------------------------------------


@dataclass(frozen=True)
class VectorValuedForm:
    """A k-form with values in R^m, stored as m component Forms.

    Components share degree and ambient dimension.  The value slot is never
    rescaled by form-side operations such as vertical-degree splitting.
    """

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not 1 <= len(comps) <= 7:
            raise ValueError("value dimension must be between 1 and 7")
        d, k = comps[0].dim, comps[0].degree
        for c in comps:
            if c.dim != d or c.degree != k:
                raise DimensionMismatchError("components disagree in dim/degree")
        object.__setattr__(self, "components", comps)

    @property
    def value_dim(self):
        return len(self.components)

    @property
    def dim(self):
        return self.components[0].dim

    @property
    def degree(self):
        return self.components[0].degree

    def apply(self, vectors):
        """Evaluate on vectors, returning a value in R^value_dim."""
        return np.array([c.apply(vectors) for c in self.components])

    def map_components(self, fn):
        return VectorValuedForm(tuple(fn(c) for c in self.components))

    def __add__(self, other):
        if self.value_dim != other.value_dim:
            raise DimensionMismatchError("value dimensions disagree")
        return VectorValuedForm(
            tuple(a + b for a, b in zip(self.components, other.components))
        )

    def __mul__(self, scalar):
        return self.map_components(lambda c: scalar * c)

    __rmul__ = __mul__

    def equals(self, other, tol=DEFAULT_TOL):
        return all(a.equals(b, tol) for a, b in zip(self.components, other.components))


# -- rendering --------------------------------------------------------------


def render(a: Form, label="dx") -> str:
    """Canonical text rendering '+-c*dx{i...}', sorted by index tuple."""
    if a.degree == 0:
        return repr(a.coeffs.get((), 0.0))
    parts = []
    for idx in sorted(a.coeffs):
        c = a.coeffs[idx]
        if c == 0.0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = label + "{" + "".join(str(i) for i in idx) + "}"
        if mag == 1.0:
            parts.append(f"{sign}{body}")
        else:
            parts.append(f"{sign}{mag!r}*{body}")
    return "".join(parts) if parts else "0"
