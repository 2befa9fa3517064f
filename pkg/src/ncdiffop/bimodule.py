"""Bimodules, bimodule maps, tensor products over the algebra, conjugates,
and finitely-generated-projective structure (dual basis, evaluation and
coevaluation).

Tensor products over the algebra are realized as explicit quotients of the
plain tensor space by the span of ``e.a (x) f - e (x) a.f``.  Quotient
coordinates come from the deterministic echelon complement in
:mod:`ncdiffop.linalg`, so every derived object is reproducible.  Operators
that are only well defined as sums follow one discipline throughout: lift to
the plain tensor space through ``TensorPair.lift``, apply, check that the sum
kills the relation span, then ``TensorPair.push`` back down.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .algebra import Algebra, unit_row
from .linalg import (
    Mat,
    SparseEchelon,
    kernel,
    kron_vec,
    quotient,
    vec_is_zero,
)
from .report import CheckResult, ValidationError
from .scalars import ZERO, Scalar


class BimoduleMapError(ValueError):
    pass


class NotProjective(ValueError):
    pass


class Bimodule:
    """A finite-dimensional A-bimodule: explicit left/right action matrices."""

    def __init__(self, algebra: Algebra, dim: int, left: list[Mat], right: list[Mat], name: str):
        self.algebra = algebra
        self.dim = dim
        self.left = left
        self.right = right
        self.name = name

    def left_apply(self, a: Sequence[Scalar], e: Sequence[Scalar]) -> list[Scalar]:
        out = [ZERO] * self.dim
        for i, c in enumerate(a):
            if c:
                for k, v in enumerate(self.left[i].apply(e)):
                    if v:
                        out[k] = out[k] + c * v
        return out

    def right_apply(self, e: Sequence[Scalar], a: Sequence[Scalar]) -> list[Scalar]:
        out = [ZERO] * self.dim
        for i, c in enumerate(a):
            if c:
                for k, v in enumerate(self.right[i].apply(e)):
                    if v:
                        out[k] = out[k] + c * v
        return out

    def validate(self) -> list[CheckResult]:
        A = self.algebra
        d, n = A.dim, self.dim
        results = []
        unit_left = sum((self.left[i].scale(c) for i, c in enumerate(A.unit) if c), Mat.zeros(n, n))
        unit_right = sum((self.right[i].scale(c) for i, c in enumerate(A.unit) if c), Mat.zeros(n, n))
        results.append(CheckResult(f"{self.name}:left-unital", unit_left == Mat.identity(n)))
        results.append(CheckResult(f"{self.name}:right-unital", unit_right == Mat.identity(n)))
        fail = None
        for i in range(d):
            for j in range(d):
                prod = A.mul_tensor[i][j]
                lhs = sum((self.left[k].scale(c) for k, c in enumerate(prod) if c), Mat.zeros(n, n))
                if self.left[i] @ self.left[j] != lhs:
                    fail = ("left", i, j)
                    break
                rhs = sum((self.right[k].scale(c) for k, c in enumerate(prod) if c), Mat.zeros(n, n))
                if self.right[j] @ self.right[i] != rhs:
                    fail = ("right", i, j)
                    break
                if self.right[j] @ self.left[i] != self.left[i] @ self.right[j]:
                    fail = ("commute", i, j)
                    break
            if fail:
                break
        results.append(CheckResult(f"{self.name}:action-axioms", fail is None, witness=fail))
        return results

    def __repr__(self):
        return f"Bimodule({self.name}, dim={self.dim})"


def algebra_as_bimodule(A: Algebra, name: str = "A") -> Bimodule:
    return Bimodule(A, A.dim, list(A.left_mult), list(A.right_mult), name)


def zero_bimodule(A: Algebra, name: str = "0") -> Bimodule:
    return Bimodule(A, 0, [Mat.zeros(0, 0) for _ in range(A.dim)], [Mat.zeros(0, 0) for _ in range(A.dim)], name)


class BimoduleMap:
    """A linear map between bimodules that intertwines both actions.

    Construction re-verifies the intertwining property exactly unless
    ``verify=False``; a failed check is an error, not a warning.
    """

    def __init__(self, src: Bimodule, dst: Bimodule, mat: Mat, name: str = "map", verify: bool = True):
        if mat.rows != dst.dim or mat.cols != src.dim:
            raise BimoduleMapError(f"{name}: shape {mat.rows}x{mat.cols} does not match {dst.dim}x{src.dim}")
        self.src = src
        self.dst = dst
        self.mat = mat
        self.name = name
        if verify:
            witness = intertwining_failure(src, dst, mat)
            if witness is not None:
                raise BimoduleMapError(f"{name}: not a bimodule map at {witness}")

    def __call__(self, vec: Sequence[Scalar]) -> list[Scalar]:
        return self.mat.apply(vec)


def intertwining_failure(src: Bimodule, dst: Bimodule, mat: Mat):
    for i in range(src.algebra.dim):
        if mat @ src.left[i] != dst.left[i] @ mat:
            return ("left", i)
        if mat @ src.right[i] != dst.right[i] @ mat:
            return ("right", i)
    return None


def module_map_failure(src: Bimodule, dst: Bimodule, mat: Mat, side: str):
    acts_s = src.left if side == "left" else src.right
    acts_d = dst.left if side == "left" else dst.right
    for i in range(src.algebra.dim):
        if mat @ acts_s[i] != acts_d[i] @ mat:
            return (side, i)
    return None


# -- tensor product over A -----------------------------------------------------


def relation_vectors(e: Bimodule, f: Bimodule):
    """Sparse generators of span{ e.a (x) f  -  e (x) a.f } in E (x) F."""
    A = e.algebra
    nf = f.dim
    for a in range(A.dim):
        right_cols = e.right[a].cols_sparse()
        left_cols = f.left[a].cols_sparse()
        for i in range(e.dim):
            for j in range(f.dim):
                row: dict[int, Scalar] = {}
                for k, v in right_cols[i]:
                    row[k * nf + j] = row.get(k * nf + j, ZERO) + v
                for l, v in left_cols[j]:
                    idx = i * nf + l
                    row[idx] = row.get(idx, ZERO) - v
                row = {k: v for k, v in row.items() if v}
                if row:
                    yield row


class TensorPair:
    """E (x)_A F: quotient bimodule together with project/section matrices."""

    def __init__(self, e: Bimodule, f: Bimodule, check: bool = True):
        if e.algebra is not f.algebra:
            raise ValueError("tensor factors live over different algebras")
        self.e = e
        self.f = f
        A = e.algebra
        plain_dim = e.dim * f.dim
        ech = SparseEchelon(plain_dim)
        for row in relation_vectors(e, f):
            ech.add_sparse(dict(row))
        self.relations = ech.to_subspace()
        self.project, self.section = quotient(plain_dim, self.relations)
        dim = self.project.rows
        left = [self.project @ (e.left[i].kron(Mat.identity(f.dim))) @ self.section for i in range(A.dim)]
        right = [self.project @ (Mat.identity(e.dim).kron(f.right[i])) @ self.section for i in range(A.dim)]
        self.space = Bimodule(A, dim, left, right, f"({e.name}(x){f.name})")
        if check:
            self._check_induced_actions()

    def _check_induced_actions(self):
        """Induced actions must kill the relation span (well-definedness)."""
        A = self.e.algebra
        for i in range(A.dim):
            lplain = self.project @ self.e.left[i].kron(Mat.identity(self.f.dim))
            rplain = self.project @ Mat.identity(self.e.dim).kron(self.f.right[i])
            for rel in self.relations.basis:
                if not vec_is_zero(lplain.apply(rel)):
                    raise ValidationError("tensor-left-action", witness=(self.space.name, i))
                if not vec_is_zero(rplain.apply(rel)):
                    raise ValidationError("tensor-right-action", witness=(self.space.name, i))

    @property
    def dim(self) -> int:
        return self.space.dim

    def lift(self, vec: Sequence[Scalar]) -> list[Scalar]:
        """Canonical plain-tensor representative of a quotient element."""
        return self.section.apply(vec)

    def push(self, plain: Sequence[Scalar]) -> list[Scalar]:
        return self.project.apply(plain)

    def push_pair(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> list[Scalar]:
        return self.push(kron_vec(x, y))

    def descends(self, plain_map: Mat) -> bool:
        """Whether a map defined on plain tensors kills every relation."""
        return all(vec_is_zero(plain_map.apply(rel)) for rel in self.relations.basis)

    def induce(self, plain_map: Mat, name: str = "map") -> Mat:
        """Push a plain-tensor-level map to the quotient, verifying descent."""
        if not self.descends(plain_map):
            raise ValidationError(f"{name}-not-well-defined", witness=self.space.name)
        return plain_map @ self.section


# -- conjugate bimodules --------------------------------------------------------


def conjugate_bimodule(e: Bimodule, name: Optional[str] = None) -> Bimodule:
    """The conjugate bimodule: a.conj(e) = conj(e.a*) and conj(e).a = conj(a*.e).

    Coordinates: the conjugate module reuses the basis symbols of ``e`` and the
    antilinear bar map is entrywise conjugation of coordinates.
    """
    A = e.algebra
    if A.star is None:
        raise ValidationError("conjugate-needs-star", witness=e.name)
    star_cols = A.star.cols_sparse()

    def conj_mat(m: Mat) -> Mat:
        return Mat(m.rows, m.cols, [[x.conj() for x in row] for row in m.data])

    left = []
    right = []
    for i in range(A.dim):
        # star(a_i) written in the basis (star is conjugate-linear; basis coords conjugate trivially)
        acc_l = Mat.zeros(e.dim, e.dim)
        acc_r = Mat.zeros(e.dim, e.dim)
        for k, v in star_cols[i]:
            acc_l = acc_l + e.right[k].scale(v)
            acc_r = acc_r + e.left[k].scale(v)
        left.append(conj_mat(acc_l))
        right.append(conj_mat(acc_r))
    return Bimodule(A, e.dim, left, right, name or f"conj({e.name})")


def bar_coords(vec: Sequence[Scalar]) -> list[Scalar]:
    """Coordinates of the image of a vector under the antilinear bar map."""
    return [x.conj() for x in vec]


# -- finitely generated projective structure ------------------------------------


class FGPStructure:
    """Dual basis presentation of a right-FGP bimodule and its dual.

    ``module`` plays the 1-forms, ``dual`` the vector fields; ``apply_mat`` is
    the pairing dual x module -> A on plain tensor coordinates.
    """

    def __init__(
        self,
        module: Bimodule,
        dual: Bimodule,
        dual_maps: list[Mat],
        basis_forms: list[list[Scalar]],
        basis_functionals: list[list[Scalar]],
        apply_mat: Mat,
        ev: BimoduleMap,
        coev: BimoduleMap,
        coev_one_plain: list[Scalar],
        pair_dual_module: "TensorPair",
        pair_module_dual: "TensorPair",
        idempotent: list[list[list[Scalar]]],
    ):
        self.module = module
        self.dual = dual
        self.dual_maps = dual_maps
        self.basis_forms = basis_forms
        self.basis_functionals = basis_functionals
        self.apply_mat = apply_mat
        self.ev = ev
        self.coev = coev
        self.coev_one_plain = coev_one_plain
        self.pair_dual_module = pair_dual_module
        self.pair_module_dual = pair_module_dual
        self.idempotent = idempotent

    def pair_apply(self, alpha: Sequence[Scalar], xi: Sequence[Scalar]) -> list[Scalar]:
        """Evaluate a dual element on a module element, landing in A."""
        return self.apply_mat.apply(kron_vec(alpha, xi))


def dualize_right_module(
    omega: Bimodule,
    dual_basis_forms: list[list[Scalar]],
    dual_basis_functionals: list[Mat],
) -> FGPStructure:
    """Realize the right dual of an FGP right module from a dual basis.

    The dual is cut out of Hom(module, A) by right-A-linearity; ev and coev
    are assembled as bimodule maps and the zig-zag identities plus the
    idempotency of ``P[q][j] = f_q(f^j)`` are all verified exactly.
    """
    A = omega.algebra
    dA, dO = A.dim, omega.dim
    n = len(dual_basis_forms)
    if n != len(dual_basis_functionals):
        raise NotProjective("dual basis forms/functionals length mismatch")

    # dual basis property: xi = sum_i f^i . f_i(xi) for every basis xi
    for j in range(dO):
        xi = unit_row(dO, j)
        acc = [ZERO] * dO
        for fi_form, fi_map in zip(dual_basis_forms, dual_basis_functionals):
            val = fi_map.apply(xi)  # in A
            term = omega.right_apply(fi_form, val)
            acc = [x + y for x, y in zip(acc, term)]
        if acc != xi:
            raise NotProjective(f"dual basis fails on module basis element {j}")

    # right-A-linearity cuts the dual out of all linear maps module -> A.
    # unknown: matrix M (dA x dO) flattened row-major; constraints:
    # M(xi . a) = M(xi) . a for all basis xi, a
    rows = []
    for j in range(dO):
        for a in range(dA):
            # lhs: M applied to (e_j . a); rhs: M(e_j) . a
            lhs_cols = omega.right[a].column(j)  # coords of e_j . a
            for out_k in range(dA):
                row = [ZERO] * (dA * dO)
                for l, c in enumerate(lhs_cols):
                    if c:
                        row[out_k * dO + l] = row[out_k * dO + l] + c
                # rhs: (M e_j) . a, component out_k = sum_m M[m][j] (a_m a_a)_k
                for m in range(dA):
                    coeff = A.mul_tensor[m][a][out_k]
                    if coeff:
                        row[m * dO + j] = row[m * dO + j] - coeff
                if any(row):
                    rows.append(row)
    constraint = Mat(len(rows), dA * dO, rows) if rows else Mat.zeros(0, dA * dO)
    sol = kernel(constraint)
    dual_dim = sol.dim
    dual_maps = [Mat(dA, dO, [vecrow[i * dO : (i + 1) * dO] for i in range(dA)]) for vecrow in sol.basis]

    def coords_of_map(m: Mat) -> list[Scalar]:
        flat = [x for row in m.data for x in row]
        # echelon basis: coordinates are read off at the pivot positions
        coords = [flat[p] for p in sol.pivots]
        residual = sol.reduce(flat)
        if not vec_is_zero(residual):
            raise NotProjective("functional is not right-A-linear")
        return coords

    # bimodule structure on the dual: (a.al)(xi) = a.al(xi), (al.a)(xi) = al(a.xi)
    left = []
    right = []
    for a in range(dA):
        lcols = []
        rcols = []
        for b in range(dual_dim):
            m = dual_maps[b]
            lm = A.left_mult[a] @ m
            rm = m @ omega.left[a]
            lcols.append(coords_of_map(lm))
            rcols.append(coords_of_map(rm))
        left.append(Mat.from_cols(lcols))
        right.append(Mat.from_cols(rcols))
    dual = Bimodule(A, dual_dim, left, right, f"dual({omega.name})")

    # pairing dual (x) module -> A on plain tensor coordinates
    apply_mat = Mat.zeros(dA, dual_dim * dO)
    for b in range(dual_dim):
        for j in range(dO):
            col = dual_maps[b].column(j)
            for k, v in enumerate(col):
                if v:
                    apply_mat.data[k][b * dO + j] = v

    pair_dual_module = TensorPair(dual, omega)
    pair_module_dual = TensorPair(omega, dual)

    ev_mat = pair_dual_module.induce(apply_mat, "ev")
    ev = BimoduleMap(pair_dual_module.space, algebra_as_bimodule(A), ev_mat, "ev")

    functional_coords = [coords_of_map(m) for m in dual_basis_functionals]
    coev_one_plain = [ZERO] * (dO * dual_dim)
    for form, fcoords in zip(dual_basis_forms, functional_coords):
        plain = kron_vec(form, fcoords)
        coev_one_plain = [x + y for x, y in zip(coev_one_plain, plain)]
    coev_cols = []
    for a in range(dA):
        plain = (omega.left[a].kron(Mat.identity(dual_dim))).apply(coev_one_plain)
        coev_cols.append(pair_module_dual.push(plain))
    coev_mat = Mat.from_cols(coev_cols)
    coev = BimoduleMap(algebra_as_bimodule(A), pair_module_dual.space, coev_mat, "coev")

    # zig-zag identities (exact, on every basis element)
    coev_q = pair_module_dual.push(coev_one_plain)
    coev_rep = pair_module_dual.lift(coev_q)
    for b in range(dual_dim):
        # (ev (x) id)(id (x) coev(1)) = id on the dual
        acc = [ZERO] * dual_dim
        alpha = unit_row(dual_dim, b)
        for idx, c in enumerate(coev_rep):
            if not c:
                continue
            i, j = divmod(idx, dual_dim)
            a_val = [c * x for x in apply_mat.apply(kron_vec(alpha, unit_row(dO, i)))]
            term = dual.left_apply(a_val, unit_row(dual_dim, j))
            acc = [x + y for x, y in zip(acc, term)]
        if acc != alpha:
            raise ValidationError("zigzag-dual", witness=(omega.name, b))
    for j in range(dO):
        # (id (x) ev)(coev(1) (x) id) = id on the module
        acc = [ZERO] * dO
        xi = unit_row(dO, j)
        for idx, c in enumerate(coev_rep):
            if not c:
                continue
            i, b = divmod(idx, dual_dim)
            a_val = [c * x for x in apply_mat.apply(kron_vec(unit_row(dual_dim, b), xi))]
            term = omega.right_apply(unit_row(dO, i), a_val)
            acc = [x + y for x, y in zip(acc, term)]
        if acc != xi:
            raise ValidationError("zigzag-module", witness=(omega.name, j))

    # idempotent P[q][j] = f_q(f^j), P o P = P in M_n(A)
    P = [[dual_basis_functionals[q].apply(dual_basis_forms[j]) for j in range(n)] for q in range(n)]
    for q in range(n):
        for j in range(n):
            acc = [ZERO] * dA
            for k in range(n):
                prod = A.mul(P[q][k], P[k][j])
                acc = [x + y for x, y in zip(acc, prod)]
            if acc != P[q][j]:
                raise ValidationError("idempotent", witness=(q, j))

    return FGPStructure(
        module=omega,
        dual=dual,
        dual_maps=dual_maps,
        basis_forms=[list(f) for f in dual_basis_forms],
        basis_functionals=functional_coords,
        apply_mat=apply_mat,
        ev=ev,
        coev=coev,
        coev_one_plain=coev_one_plain,
        pair_dual_module=pair_dual_module,
        pair_module_dual=pair_module_dual,
        idempotent=P,
    )
