"""Finite matrix groups acting on K(V*) as differential-algebra automorphisms.

The action sends x_j to sum_i g[i][j] x_i and dx_j to the same linear
form in the dx_i, which makes it a left action commuting with the
differential.  Degreewise fixed/semi-invariant spaces are computed by
exact nullspaces of stacked (action - scalar) matrices; the action
matrices themselves are assembled from symmetric-power recurrences and
exterior minors, so no per-monomial substitution is needed on the hot
path.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from . import linalg
from .gca import Element, Signature, degree_basis, substitute

__all__ = [
    "MatrixGroup",
    "LinearCharacter",
    "ClosureCapError",
    "NotSemiInvariantError",
    "act",
    "is_invariant",
    "invariant_space",
    "invariant_dimension",
    "relative_invariant_space",
    "minimal_relative_invariant",
    "character_of",
]


class ClosureCapError(RuntimeError):
    pass


class NotSemiInvariantError(ValueError):
    pass


def _as_tuple_matrix(m, p: int) -> tuple:
    a = np.asarray(m, dtype=np.int64) % p
    return tuple(tuple(int(v) for v in row) for row in a)


class MatrixGroup:
    """Finite subgroup of GL_n(F_p) given by generator matrices."""

    def __init__(self, p: int, generators, name: str = "", n: int | None = None):
        self.p = p
        gens = [_as_tuple_matrix(g, p) for g in generators]
        if n is None:
            if not gens:
                raise ValueError("pass n explicitly for a generator-free group")
            n = len(gens[0])
        self.n = n
        for g in gens:
            if len(g) != self.n or any(len(r) != self.n for r in g):
                raise ValueError("generators must be square matrices of equal size")
            if linalg.det(np.array(g), p) == 0:
                raise ValueError("generator is singular mod p")
        self.generators = tuple(gens)
        self.name = name
        self._closure = None

    @classmethod
    def trivial(cls, p: int, n: int) -> "MatrixGroup":
        return cls(p, [np.eye(n, dtype=np.int64)], name=f"trivial({n})")

    @classmethod
    def general_linear(cls, p: int, n: int) -> "MatrixGroup":
        """GL_n(F_p): primitive scalar on one axis, a swap/cycle, a transvection."""
        zeta = _primitive_root(p)
        diag = np.eye(n, dtype=np.int64)
        diag[0, 0] = zeta
        transv = np.eye(n, dtype=np.int64)
        transv[0, 1] = 1
        cyc = np.zeros((n, n), dtype=np.int64)
        for i in range(n - 1):
            cyc[i + 1, i] = 1
        cyc[0, n - 1] = 1
        return cls(p, [diag, transv, cyc], name=f"GL{n}(F{p})")

    @classmethod
    def special_linear(cls, p: int, n: int) -> "MatrixGroup":
        """SL_n(F_p): transvection plus signed cycle (determinant one)."""
        transv = np.eye(n, dtype=np.int64)
        transv[0, 1] = 1
        cyc = np.zeros((n, n), dtype=np.int64)
        for i in range(n - 1):
            cyc[i + 1, i] = 1
        cyc[0, n - 1] = (-1) ** (n - 1) % p
        return cls(p, [transv, cyc], name=f"SL{n}(F{p})")

    @classmethod
    def from_json(cls, data, p: int | None = None) -> "MatrixGroup":
        """Build from {"p": int, "generators": [matrix, ...]} (arrays of rows)."""
        if isinstance(data, list):
            data = {"generators": data}
        pp = p if p is not None else data["p"]
        return cls(pp, data["generators"], name=data.get("name", ""))

    def closure(self, cap: int = 10**6) -> list:
        """Full element list by breadth-first products; deterministic order."""
        if self._closure is not None:
            return self._closure
        ident = _as_tuple_matrix(np.eye(self.n, dtype=np.int64), self.p)
        seen = {ident}
        order = [ident]
        queue = [ident]
        gens = [np.array(g, dtype=np.int64) for g in self.generators]
        while queue:
            cur = queue.pop(0)
            cm = np.array(cur, dtype=np.int64)
            for g in gens:
                nxt = _as_tuple_matrix(cm @ g, self.p)
                if nxt not in seen:
                    if len(seen) >= cap:
                        raise ClosureCapError(f"closure exceeds cap {cap}")
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
        self._closure = order
        return order

    def order(self, cap: int = 10**6) -> int:
        return len(self.closure(cap))

    def __repr__(self):
        label = self.name or f"{len(self.generators)} generators"
        return f"MatrixGroup(p={self.p}, n={self.n}, {label})"


def _primitive_root(p: int) -> int:
    for g in range(2, p):
        seen = set()
        v = 1
        for _ in range(p - 1):
            v = v * g % p
            seen.add(v)
        if len(seen) == p - 1:
            return g
    raise ValueError(f"no primitive root mod {p}")


class LinearCharacter:
    """Multiplicative character G -> F_p^*, stored by generator values."""

    def __init__(self, group: MatrixGroup, values):
        self.group = group
        self.values = tuple(int(v) % group.p for v in values)
        if len(self.values) != len(group.generators):
            raise ValueError("one value per generator required")
        if any(v == 0 for v in self.values):
            raise ValueError("character values must be units")

    @classmethod
    def trivial(cls, group: MatrixGroup) -> "LinearCharacter":
        return cls(group, [1] * len(group.generators))

    @classmethod
    def det(cls, group: MatrixGroup, k: int = 1) -> "LinearCharacter":
        p = group.p
        vals = []
        for g in group.generators:
            d = linalg.det(np.array(g, dtype=np.int64), p)
            vals.append(pow(d, k % (p - 1) or (p - 1), p) if k % (p - 1) else 1)
        return cls(group, vals)

    @classmethod
    def det_inverse(cls, group: MatrixGroup) -> "LinearCharacter":
        return cls.det(group, -1)

    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.values)

    def extend_to_closure(self, cap: int = 10**6) -> dict:
        """Values on the whole group; raises if generator values are inconsistent."""
        p = self.group.p
        n = self.group.n
        ident = _as_tuple_matrix(np.eye(n, dtype=np.int64), p)
        vals = {ident: 1}
        queue = [ident]
        gens = [np.array(g, dtype=np.int64) for g in self.group.generators]
        while queue:
            cur = queue.pop(0)
            cm = np.array(cur, dtype=np.int64)
            for gi, g in enumerate(gens):
                nxt = _as_tuple_matrix(cm @ g, p)
                v = vals[cur] * self.values[gi] % p
                if nxt in vals:
                    if vals[nxt] != v:
                        raise ValueError("character is not multiplicative on the group")
                else:
                    if len(vals) > cap:
                        raise ClosureCapError(f"closure exceeds cap {cap}")
                    vals[nxt] = v
                    queue.append(nxt)
        return vals

    def __eq__(self, other):
        return (
            isinstance(other, LinearCharacter)
            and self.group is other.group
            and self.values == other.values
        )

    def __repr__(self):
        return f"LinearCharacter{self.values}"


# -- the action on elements --------------------------------------------------


def action_images(sig: Signature, g) -> dict:
    """Generator images of the action: x_j -> sum_i g[i][j] x_i, same on dx."""
    a = np.asarray(g, dtype=np.int64) % sig.p
    n = a.shape[0]
    if n != sig.n_poly or (sig.n_ext not in (0, n)):
        raise ValueError("matrix size does not match the signature")
    images = {}
    for j in range(n):
        img = sig.zero()
        for i in range(n):
            if a[i, j]:
                img = img + sig.var(sig.poly_names[i]) * int(a[i, j])
        images[sig.poly_names[j]] = img
    for j in range(sig.n_ext):
        img = sig.zero()
        for i in range(n):
            if a[i, j]:
                img = img + sig.var(sig.ext_names[i]) * int(a[i, j])
        images[sig.ext_names[j]] = img
    return images


def act(g, a: Element) -> Element:
    """Apply a group element (matrix) to an algebra element."""
    return substitute(a, action_images(a.sig, g))


def is_invariant(a: Element, group: MatrixGroup) -> bool:
    return all(act(g, a) == a for g in group.generators)


def character_of(a: Element, group: MatrixGroup) -> LinearCharacter:
    """The character by which a semi-invariant transforms; error otherwise."""
    if not a:
        raise NotSemiInvariantError("zero element has no character")
    p = group.p
    lead = a.leading_monomial()
    c_lead = a.terms[lead]
    vals = []
    for g in group.generators:
        b = act(g, a)
        c = b.terms.get(lead)
        if c is None:
            raise NotSemiInvariantError(f"{a} is not a semi-invariant")
        lam = c * pow(c_lead, p - 2, p) % p
        if b != a * lam:
            raise NotSemiInvariantError(f"{a} is not a semi-invariant")
        vals.append(lam)
    return LinearCharacter(group, vals)


# -- degreewise action matrices ----------------------------------------------


@lru_cache(maxsize=None)
def _poly_weight_basis(sig: Signature, w: int) -> tuple:
    """Exponent tuples of weight w (uniform degree-2 generators), descending."""
    out = []

    def rec(i, rem, prefix):
        if i == sig.n_poly - 1:
            out.append(prefix + (rem,))
            return
        for e in range(rem, -1, -1):
            rec(i + 1, rem - e, prefix + (e,))

    if sig.n_poly == 0:
        return ((),) if w == 0 else ()
    rec(0, w, ())
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def _poly_weight_index(sig: Signature, w: int) -> dict:
    return {e: i for i, e in enumerate(_poly_weight_basis(sig, w))}


@lru_cache(maxsize=None)
def _lift_indices(sig: Signature, j: int, w: int) -> np.ndarray:
    """Index map: monomial of weight w-1 -> monomial * x_j of weight w."""
    idx = _poly_weight_index(sig, w)
    prev = _poly_weight_basis(sig, w - 1)
    out = np.empty(len(prev), dtype=np.int64)
    for k, e in enumerate(prev):
        lifted = e[:j] + (e[j] + 1,) + e[j + 1 :]
        out[k] = idx[lifted]
    return out


_POLY_ACTION_CACHE: dict = {}


def _uniform_quadratic(sig: Signature) -> bool:
    return all(d == 2 for d in sig.poly_degrees) and all(d == 1 for d in sig.ext_degrees)


def poly_action_matrix(sig: Signature, g, w: int) -> np.ndarray:
    """Matrix of the action on weight-w polynomials over the pinned basis."""
    p = sig.p
    gt = _as_tuple_matrix(g, p)
    key = (sig, gt)
    mats = _POLY_ACTION_CACHE.get(key)
    if mats is None:
        mats = [np.ones((1, 1), dtype=np.int64)]
        _POLY_ACTION_CACHE[key] = mats
    a = np.asarray(g, dtype=np.int64) % p
    while len(mats) <= w:
        ww = len(mats)
        basis = _poly_weight_basis(sig, ww)
        dim = len(basis)
        prev_idx = _poly_weight_index(sig, ww - 1)
        mat = np.zeros((dim, dim), dtype=np.int64)
        by_first: dict[int, list] = {}
        for col, e in enumerate(basis):
            i = next(k for k, v in enumerate(e) if v)
            by_first.setdefault(i, []).append(col)
        prev = mats[ww - 1]
        for i, cols in by_first.items():
            parents = [prev_idx[basis[c][:i] + (basis[c][i] - 1,) + basis[c][i + 1 :]] for c in cols]
            block = prev[:, parents]
            acc = np.zeros((dim, len(cols)), dtype=np.int64)
            for j in range(sig.n_poly):
                cij = int(a[j, i])
                if cij:
                    acc[_lift_indices(sig, j, ww)] += cij * block
            mat[:, cols] = acc % p
        mats.append(mat)
    return mats[w]


@lru_cache(maxsize=None)
def _ext_positions(sig: Signature, d: int) -> dict:
    """Positions in degree_basis(sig, d) grouped by exterior subset."""
    pos: dict[tuple, list] = {}
    for i, (exps, ext) in enumerate(degree_basis(sig, d)):
        pos.setdefault(ext, []).append(i)
    return {k: np.array(v, dtype=np.int64) for k, v in pos.items()}


def action_matrix(sig: Signature, g, d: int, full_k: bool = False) -> np.ndarray:
    """Matrix of act(g, .) on the degree-d basis (polynomial part or all of K)."""
    p = sig.p
    if not _uniform_quadratic(sig):
        return _action_matrix_generic(sig, g, d, full_k)
    a = np.asarray(g, dtype=np.int64) % p
    if not full_k:
        if d % 2:
            return np.zeros((0, 0), dtype=np.int64)
        return poly_action_matrix(sig, g, d // 2)
    basis = degree_basis(sig, d)
    dim = len(basis)
    out = np.zeros((dim, dim), dtype=np.int64)
    pos = _ext_positions(sig, d)
    for s_ext, cols in pos.items():
        w = (d - len(s_ext)) // 2
        pw = poly_action_matrix(sig, g, w)
        for t_ext in combinations(range(sig.n_ext), len(s_ext)):
            rows = pos.get(t_ext)
            if rows is None:
                continue
            if s_ext:
                minor = linalg.det(a[np.ix_(t_ext, s_ext)], p)
                if minor == 0:
                    continue
            else:
                minor = 1
            out[np.ix_(rows, cols)] = minor * pw % p
    return out


def _action_matrix_generic(sig: Signature, g, d: int, full_k: bool) -> np.ndarray:
    basis = [m for m in degree_basis(sig, d) if full_k or not m[1]]
    images = action_images(sig, g)
    idx = {m: i for i, m in enumerate(basis)}
    out = np.zeros((len(basis), len(basis)), dtype=np.int64)
    for col, m in enumerate(basis):
        b = substitute(Element(sig, {m: 1}), images)
        for mm, c in b.terms.items():
            out[idx[mm], col] = c
    return out


def _basis_elements(sig: Signature, d: int, full_k: bool) -> list:
    return [m for m in degree_basis(sig, d) if full_k or not m[1]]


def _semi_invariant_matrix(sig: Signature, group: MatrixGroup, d: int, full_k: bool, scalars):
    blocks = []
    for g, lam in zip(group.generators, scalars):
        a = action_matrix(sig, g, d, full_k)
        ident = np.eye(a.shape[0], dtype=np.int64) * lam
        blocks.append((a - ident) % group.p)
    if not blocks:
        return np.zeros((0, 0), dtype=np.int64)
    return np.vstack(blocks)


def _vectors_to_elements(sig: Signature, d: int, basis, vecs) -> list:
    out = []
    for row in vecs:
        terms = {}
        for i, c in enumerate(row):
            c = int(c) % sig.p
            if c:
                terms[basis[i]] = c
        out.append(Element(sig, terms))
    return out


def invariant_space(group: MatrixGroup, sig: Signature, d: int, full_k: bool = False) -> list:
    """Basis of the G-fixed subspace of the degree-d piece of P(V*) or K(V*)."""
    basis = _basis_elements(sig, d, full_k)
    if not basis:
        return []
    scalars = [1] * len(group.generators)
    m = _semi_invariant_matrix(sig, group, d, full_k, scalars)
    ns = linalg.nullspace(m, group.p)
    return _vectors_to_elements(sig, d, basis, ns)


def invariant_dimension(group: MatrixGroup, sig: Signature, d: int, full_k: bool = False) -> int:
    basis = _basis_elements(sig, d, full_k)
    if not basis:
        return 0
    m = _semi_invariant_matrix(sig, group, d, full_k, [1] * len(group.generators))
    return len(basis) - linalg.rank(m, group.p)


def relative_invariant_space(
    group: MatrixGroup, sig: Signature, chi: LinearCharacter, d: int
) -> list:
    """Basis of {q in P(V*)_d : g q = chi(g) q for all generators}."""
    basis = _basis_elements(sig, d, full_k=False)
    if not basis:
        return []
    m = _semi_invariant_matrix(sig, group, d, False, chi.values)
    ns = linalg.nullspace(m, group.p)
    return _vectors_to_elements(sig, d, basis, ns)


class DegreeCapError(RuntimeError):
    pass


def minimal_relative_invariant(
    group: MatrixGroup, sig: Signature, chi: LinearCharacter, cap: int | None = None
) -> Element:
    """Monic generator f_chi of the first nonzero relative-invariant space.

    Errors if that space is not one-dimensional (the pseudoreflection
    hypothesis would be violated) or if the degree cap is reached.
    """
    if cap is None:
        cap = 2 * group.n * group.p**group.n
    for d in range(0, cap + 1, 2):
        space = relative_invariant_space(group, sig, chi, d)
        if not space:
            continue
        if len(space) > 1:
            raise ValueError(
                f"first nonzero relative-invariant space (degree {d}) has dimension {len(space)}"
            )
        return space[0].monic()
    raise DegreeCapError(f"no relative invariant found up to degree {cap}")
