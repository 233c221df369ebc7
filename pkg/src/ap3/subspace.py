"""GF(p) linear algebra: spans, orthogonal complements, intersections,
coset transversals, coset averaging, and canonical sub-subspace selection.

Coset representatives are NOT taken from the orthogonal complement: over
GF(p) a subspace can meet its own complement (self-orthogonal vectors,
e.g. (1,2) in F_5^2), so "v + W, v in V" need not be a transversal.  We
use the pivot-free coordinate subspace U instead, which always satisfies
U (+) W = F_p^n.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .gfspace import (
    DensityFunction,
    Element,
    GroupParams,
    add_indices,
    digit_table,
    place_values,
)

COSET_CONSTANT_TOL = 1e-9


def _inv_mod(a: int, p: int) -> int:
    return pow(a, p - 2, p)


def rref_mod_p(mat: np.ndarray, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row-echelon form over GF(p); returns (rref rows, pivot cols)."""
    m = np.array(mat, dtype=np.int64) % p
    if m.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if m[i, c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * _inv_mod(int(m[r, c]), p)) % p
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m[:r], tuple(pivots)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F_p^n held as a canonical reduced row-echelon basis."""

    params: GroupParams
    basis: np.ndarray
    pivots: tuple[int, ...]

    def __post_init__(self) -> None:
        b = np.array(self.basis, dtype=np.int64).reshape(-1, self.params.n) % self.params.p
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.basis, other.basis)

    def __hash__(self) -> int:
        return hash((self.params, self.basis.tobytes()))

    def elements(self) -> np.ndarray:
        """Sorted indices of all p^dim members."""
        p, n = self.params.p, self.params.n
        if self.dim == 0:
            return np.zeros(1, dtype=np.int64)
        coeffs = digit_table(p, self.dim)
        digits = (coeffs @ self.basis) % p
        idx = digits @ place_values(p, n)
        return np.sort(idx)

    def contains(self, index: int) -> bool:
        p = self.params.p
        d = np.array(digit_table(p, self.params.n)[index])
        for row, piv in zip(self.basis, self.pivots):
            d = (d - d[piv] * row) % p
        return not d.any()

    def describe(self) -> str:
        rows = "; ".join(
            "(" + ",".join(str(int(x)) for x in row) + ")" for row in self.basis
        )
        return f"dim {self.dim}; basis: {rows}" if self.dim else "dim 0; basis:"


def trivial_space(params: GroupParams) -> Subspace:
    return Subspace(params, np.zeros((0, params.n), dtype=np.int64), ())


def full_space(params: GroupParams) -> Subspace:
    return Subspace(params, np.eye(params.n, dtype=np.int64), tuple(range(params.n)))


def span(params: GroupParams, generators: Iterable) -> Subspace:
    """GF(p) span of the given generators (Elements, indices, or digit rows)."""
    rows = []
    for g in generators:
        if isinstance(g, Element):
            if g.params != params:
                raise ValueError("mismatched group parameters")
            rows.append(g.digits)
        elif isinstance(g, (int, np.integer)):
            rows.append(digit_table(params.p, params.n)[int(g)])
        else:
            rows.append([int(x) for x in g])
    if not rows:
        return trivial_space(params)
    basis, pivots = rref_mod_p(np.array(rows, dtype=np.int64), params.p)
    return Subspace(params, basis, pivots)


def orthogonal_complement(v: Subspace) -> Subspace:
    """Null space of the basis matrix under the standard dot product mod p."""
    params = v.params
    p, n = params.p, params.n
    if v.dim == 0:
        return full_space(params)
    if v.dim == n:
        return trivial_space(params)
    free = [c for c in range(n) if c not in v.pivots]
    null_rows = np.zeros((len(free), n), dtype=np.int64)
    for r, c in enumerate(free):
        null_rows[r, c] = 1
        for i, piv in enumerate(v.pivots):
            null_rows[r, piv] = (-int(v.basis[i, c])) % p
    basis, pivots = rref_mod_p(null_rows, p)
    return Subspace(params, basis, pivots)


def intersect(u: Subspace, v: Subspace) -> Subspace:
    """U intersect V, via (U^perp + V^perp)^perp (the dot form is nondegenerate)."""
    if u.params != v.params:
        raise ValueError("mismatched group parameters")
    up = orthogonal_complement(u)
    vp = orthogonal_complement(v)
    gens = [row for row in up.basis] + [row for row in vp.basis]
    return orthogonal_complement(span(u.params, gens))


@dataclass(frozen=True, eq=False)
class CosetDecomposition:
    """A subspace W with the canonical transversal U (+) W = F_p^n.

    Transversal representatives have zeros in all pivot coordinates of W's
    basis; they form the subspace spanned by the non-pivot coordinate axes.
    """

    subspace: Subspace
    transversal: tuple[int, ...]
    rep_index: np.ndarray  # element index -> its representative's index
    rep_pos: np.ndarray  # element index -> position in transversal

    def rep_of(self, m: int) -> int:
        return int(self.rep_index[m])

    def coset_members(self, rep: int) -> np.ndarray:
        return np.sort(add_indices(rep, self.subspace.elements(), self.subspace.params))


def coset_decomposition(w: Subspace) -> CosetDecomposition:
    params = w.params
    p, n = params.p, params.n
    digits = np.array(digit_table(p, n))
    for row, piv in zip(w.basis, w.pivots):
        digits = (digits - np.outer(digits[:, piv], row)) % p
    rep_index = digits @ place_values(p, n)
    transversal = np.unique(rep_index)
    pos_of = np.full(params.size, -1, dtype=np.int64)
    pos_of[transversal] = np.arange(len(transversal))
    rep_pos = pos_of[rep_index]
    return CosetDecomposition(
        w, tuple(int(i) for i in transversal), rep_index, rep_pos
    )


def average_over_cosets(f: DensityFunction, w: Subspace) -> DensityFunction:
    """f_W(m) = |W|^-1 sum_{w in W} f(m+w), constant on each coset of W."""
    dec = coset_decomposition(w)
    out = np.empty(f.params.size, dtype=np.float64)
    w_elems = w.elements()
    for rep in dec.transversal:
        members = add_indices(rep, w_elems, f.params)
        vals = f.values[members]
        # Exact idempotence: a coset already constant keeps its value bit-for-bit.
        if np.all(vals == vals[0]):
            mean = float(vals[0])
        else:
            mean = math.fsum(vals) / len(vals)
        out[members] = mean
    return DensityFunction(f.params, out)


def coset_values(f: DensityFunction, dec: CosetDecomposition, tol: float = COSET_CONSTANT_TOL) -> np.ndarray:
    """Per-transversal-entry values of a function constant on cosets of W."""
    w_elems = dec.subspace.elements()
    out = np.empty(len(dec.transversal), dtype=np.float64)
    for k, rep in enumerate(dec.transversal):
        vals = f.values[add_indices(rep, w_elems, f.params)]
        if vals.max() - vals.min() > tol:
            raise ValueError("function is not constant on cosets of W")
        out[k] = vals[0]
    return out


def canonical_codim_subspace(w: Subspace, ell: int) -> Subspace:
    """Drop the first `ell` echelon rows of W (rows ordered by pivot column)."""
    if not 0 <= ell <= w.dim:
        raise ValueError(f"ell={ell} out of range [0, {w.dim}]")
    return Subspace(w.params, w.basis[ell:], w.pivots[ell:])


def all_subspaces(params: GroupParams, dim: int) -> Iterator[Subspace]:
    """All subspaces of the given dimension, via canonical echelon bases."""
    p, n = params.p, params.n
    if not 0 <= dim <= n:
        raise ValueError(f"dim={dim} out of range [0, {n}]")
    if dim == 0:
        yield trivial_space(params)
        return
    for pivots in itertools.combinations(range(n), dim):
        free = [
            (i, c)
            for i in range(dim)
            for c in range(pivots[i] + 1, n)
            if c not in pivots
        ]
        for assignment in itertools.product(range(p), repeat=len(free)):
            basis = np.zeros((dim, n), dtype=np.int64)
            for i, piv in enumerate(pivots):
                basis[i, piv] = 1
            for (i, c), val in zip(free, assignment):
                basis[i, c] = val
            yield Subspace(params, basis, pivots)


def count_subspaces(params: GroupParams, dim: int) -> int:
    """Gaussian binomial [n choose dim]_p."""
    p, n = params.p, params.n
    num = den = 1
    for i in range(dim):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den
