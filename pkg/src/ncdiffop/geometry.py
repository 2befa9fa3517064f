"""The geometric core of a bundle: first-order calculus, the right connection
on 1-forms with its generalised braiding, the dual left connection on vector
fields, and the memoized tensor-power towers both constructions extend to.

Index conventions.  Vector-field powers grow on the left,
``V(n+1) = Vec (x)_A V(n)``; form powers grow on the right,
``W(n+1) = W(n) (x)_A Omega1``.  Plain (un-quotiented) tensor coordinates pack
row-major, ``idx = i * dim_right + j``.  Every operator that the theory only
defines as a sum of non-well-defined terms is assembled on plain coordinates
and checked to kill the relation span before it is pushed to the quotient.

All caches are write-once per key and everything is immutable after
construction, so concurrent readers (e.g. parallel test workers) are safe.
"""

from __future__ import annotations

from .algebra import Algebra, unit_row
from .bimodule import (
    Bimodule,
    FGPStructure,
    TensorPair,
    algebra_as_bimodule,
    dualize_right_module,
    intertwining_failure,
)
from .linalg import Mat, inverse, kron_vec, vec_is_zero
from .report import ValidationError
from .scalars import ZERO, Scalar


class DualityFailure(ValidationError):
    pass


class Geometry:
    """Everything derived from (A, Omega1, d, dual basis, box, sigma-inverse)."""

    def __init__(
        self,
        algebra: Algebra,
        omega: Bimodule,
        d: Mat,
        dual_basis_forms,
        dual_basis_functionals,
        box_plain: Mat,
        sigma_inv_plain: Mat,
        name: str = "bundle",
        validate: bool = True,
    ):
        self.algebra = algebra
        self.omega = omega
        self.d = d
        self.name = name
        self.A_bim = algebra_as_bimodule(algebra)
        self._pairs: dict[tuple[int, int], TensorPair] = {}
        self._V: dict[int, Bimodule] = {}
        self._W: dict[int, Bimodule] = {}
        self._merge_vec: dict[tuple[int, int], Mat] = {}
        self._merge_om: dict[tuple[int, int], Mat] = {}
        self._box_form_pow: dict[int, Mat] = {}
        self._box_vec_pow: dict[int, Mat] = {}
        self._ev_pow: dict[int, Mat] = {}
        self._coev_pow: dict[int, list[Scalar]] = {}
        self._braid_form: dict[int, Mat] = {}
        self._braid_vec: dict[int, Mat] = {}

        if validate:
            self._validate_algebra_and_module()
            self._validate_calculus()

        self.fgp: FGPStructure = dualize_right_module(omega, dual_basis_forms, dual_basis_functionals)
        self.vec = self.fgp.dual
        self._pairs[(id(self.vec), id(omega))] = self.fgp.pair_dual_module
        self._pairs[(id(omega), id(self.vec))] = self.fgp.pair_module_dual

        self.W2 = self.pair(omega, omega)
        if box_plain.rows != omega.dim * omega.dim or box_plain.cols != omega.dim:
            raise ValidationError("box-shape", witness=(box_plain.rows, box_plain.cols))
        self.box_form = self.W2.project @ box_plain
        sig = self.W2.project @ sigma_inv_plain
        if not self.W2.descends(sig):
            raise ValidationError("sigma-inv-not-well-defined")
        self.sigma_inv_form = sig @ self.W2.section
        fail = intertwining_failure(self.W2.space, self.W2.space, self.sigma_inv_form)
        if fail is not None:
            raise ValidationError("sigma-inv-bimodule-map", witness=fail)
        try:
            self.sigma_form = inverse(self.sigma_inv_form)
        except ValueError:
            raise ValidationError("sigma-invertible") from None
        if validate:
            self._validate_right_connection()

        self._build_dual_connection(check=validate)

    # -- small helpers -----------------------------------------------------

    def pair(self, e: Bimodule, f: Bimodule) -> TensorPair:
        key = (id(e), id(f))
        if key not in self._pairs:
            self._pairs[key] = TensorPair(e, f)
        return self._pairs[key]

    def d_of(self, a_coords) -> list[Scalar]:
        return self.d.apply(a_coords)

    def left_on(self, module: Bimodule, a_coords, vec) -> list[Scalar]:
        return module.left_apply(a_coords, vec)

    # -- validation of the raw inputs ---------------------------------------

    def _validate_algebra_and_module(self):
        for r in self.algebra.validate():
            if not r.ok:
                raise ValidationError(r.name, witness=r.witness)
        for r in self.omega.validate():
            if not r.ok:
                raise ValidationError(r.name, witness=r.witness)

    def _validate_calculus(self):
        A, om, d = self.algebra, self.omega, self.d
        if d.rows != om.dim or d.cols != A.dim:
            raise ValidationError("d-shape")
        for i in range(A.dim):
            for j in range(A.dim):
                lhs = d.apply(A.mul_tensor[i][j])
                ei, ej = unit_row(A.dim, i), unit_row(A.dim, j)
                rhs_a = om.right_apply(d.column(i), ej)
                rhs_b = om.left_apply(ei, d.column(j))
                if lhs != [x + y for x, y in zip(rhs_a, rhs_b)]:
                    raise ValidationError("leibniz", witness=(i, j))
        if not vec_is_zero(d.apply(self.algebra.unit)):
            raise ValidationError("d-of-unit")
        # surjectivity: span{a.db} = Omega1
        from .linalg import SparseEchelon

        ech = SparseEchelon(om.dim)
        for i in range(A.dim):
            for j in range(A.dim):
                ech.add_dense(om.left_apply(unit_row(A.dim, i), d.column(j)))
        if ech.dim != om.dim:
            raise ValidationError("surjectivity", witness=ech.dim)

    def _validate_right_connection(self):
        A, om = self.algebra, self.omega
        W2 = self.W2
        for i in range(A.dim):
            ai = unit_row(A.dim, i)
            for j in range(om.dim):
                xi = unit_row(om.dim, j)
                # box(xi.a) = box(xi).a + xi (x) da
                lhs = self.box_form.apply(om.right[i].column(j))
                rhs = W2.space.right_apply(self.box_form.apply(xi), ai)
                rhs = [x + y for x, y in zip(rhs, W2.push(kron_vec(xi, self.d.column(i))))]
                if lhs != rhs:
                    raise ValidationError("box-right-leibniz", witness=(i, j))
                # box(a.xi) = a.box(xi) + sigma_inv(da (x) xi)
                lhs = self.box_form.apply(om.left[i].column(j))
                rhs = W2.space.left_apply(ai, self.box_form.apply(xi))
                sig_term = self.sigma_inv_form.apply(W2.push(kron_vec(self.d.column(i), xi)))
                rhs = [x + y for x, y in zip(rhs, sig_term)]
                if lhs != rhs:
                    raise ValidationError("box-left-leibniz", witness=(i, j))

    # -- dual connection on vector fields ------------------------------------

    def _build_dual_connection(self, check: bool = True):
        """box(v) = d(v(alpha)) (x) w - (ev (x) id (x) id)(v (x) box(alpha) (x) w)."""
        A, om, vec, fgp = self.algebra, self.omega, self.vec, self.fgp
        OV1 = self.pair(om, vec)
        self.OV1 = OV1
        cols = []
        coev = fgp.coev_one_plain
        for b in range(vec.dim):
            v = unit_row(vec.dim, b)
            out = [ZERO] * OV1.dim
            for idx, c in enumerate(coev):
                if not c:
                    continue
                p, q = divmod(idx, vec.dim)
                alpha = unit_row(om.dim, p)
                w = unit_row(vec.dim, q)
                val = fgp.pair_apply(v, alpha)
                term1 = OV1.push(kron_vec(self.d.apply(val), w))
                out = [x + c * y for x, y in zip(out, term1)]
                box_alpha = self.W2.lift(self.box_form.apply(alpha))
                for idx2, c2 in enumerate(box_alpha):
                    if not c2:
                        continue
                    r, s = divmod(idx2, om.dim)
                    a_val = fgp.pair_apply(v, unit_row(om.dim, r))
                    moved = om.left_apply(a_val, unit_row(om.dim, s))
                    term2 = OV1.push(kron_vec(moved, w))
                    out = [x - c * c2 * y for x, y in zip(out, term2)]
            cols.append(out)
        self.box_vec = Mat.from_cols(cols)

        # sigma on fields: (ev (x) id (x) id)(id (x) sigma_inv (x) id)(id (x) id (x) coev(1))
        VO1 = self.pair(vec, om)
        self.VO1 = VO1
        scols = []
        for b in range(vec.dim):
            v = unit_row(vec.dim, b)
            for j in range(om.dim):
                xi = unit_row(om.dim, j)
                out = [ZERO] * OV1.dim
                for idx, c in enumerate(coev):
                    if not c:
                        continue
                    p, q = divmod(idx, vec.dim)
                    w = unit_row(vec.dim, q)
                    mid = self.sigma_inv_form.apply(self.W2.push(kron_vec(xi, unit_row(om.dim, p))))
                    for idx2, c2 in enumerate(self.W2.lift(mid)):
                        if not c2:
                            continue
                        r, s = divmod(idx2, om.dim)
                        a_val = fgp.pair_apply(v, unit_row(om.dim, r))
                        moved = om.left_apply(a_val, unit_row(om.dim, s))
                        out = [x + c * c2 * y for x, y in zip(out, OV1.push(kron_vec(moved, w)))]
                scols.append(out)
        self.sigma_vec_plain = Mat.from_cols(scols)  # Kron(vec, omega) -> OV1
        if not VO1.descends(self.sigma_vec_plain):
            raise ValidationError("sigma-vec-not-well-defined")
        self.sigma_vec = self.sigma_vec_plain @ VO1.section
        fail = intertwining_failure(VO1.space, OV1.space, self.sigma_vec)
        if fail is not None:
            raise ValidationError("sigma-vec-bimodule-map", witness=fail)
        try:
            self.sigma_vec_inv = inverse(self.sigma_vec)
        except ValueError:
            raise ValidationError("sigma-vec-invertible") from None

        if check:
            self._validate_dual_connection()

    def _validate_dual_connection(self):
        A, om, vec = self.algebra, self.omega, self.vec
        OV1, VO1 = self.OV1, self.VO1
        for i in range(A.dim):
            ai = unit_row(A.dim, i)
            da = self.d.column(i)
            for b in range(vec.dim):
                v = unit_row(vec.dim, b)
                # box(v.a) = box(v).a + sigma(v (x) da)
                lhs = self.box_vec.apply(vec.right[i].column(b))
                rhs = OV1.space.right_apply(self.box_vec.apply(v), ai)
                sig = self.sigma_vec_plain.apply(kron_vec(v, da))
                rhs = [x + y for x, y in zip(rhs, sig)]
                if lhs != rhs:
                    raise ValidationError("box-vec-right-leibniz", witness=(i, b))
                # box(a.v) = a.box(v) + da (x) v
                lhs = self.box_vec.apply(vec.left[i].column(b))
                rhs = OV1.space.left_apply(ai, self.box_vec.apply(v))
                rhs = [x + y for x, y in zip(rhs, OV1.push(kron_vec(da, v)))]
                if lhs != rhs:
                    raise ValidationError("box-vec-left-leibniz", witness=(i, b))
        # duality: d o ev = (id (x) ev)(box (x) id) + (ev (x) id)(id (x) box)
        lhs_fail = self._duality_defect()
        if lhs_fail is not None:
            raise DualityFailure("duality", witness=lhs_fail)

    def _duality_defect(self):
        om, vec, fgp = self.omega, self.vec, self.fgp
        for b in range(vec.dim):
            v = unit_row(vec.dim, b)
            for j in range(om.dim):
                xi = unit_row(om.dim, j)
                lhs = self.d.apply(fgp.pair_apply(v, xi))
                rhs = [ZERO] * om.dim
                boxv = self.OV1.lift(self.box_vec.apply(v))
                for idx, c in enumerate(boxv):
                    if not c:
                        continue
                    r, s = divmod(idx, vec.dim)
                    a_val = fgp.pair_apply(unit_row(vec.dim, s), xi)
                    term = om.right_apply(unit_row(om.dim, r), a_val)
                    rhs = [x + c * y for x, y in zip(rhs, term)]
                boxxi = self.W2.lift(self.box_form.apply(xi))
                for idx, c in enumerate(boxxi):
                    if not c:
                        continue
                    r, s = divmod(idx, om.dim)
                    a_val = fgp.pair_apply(v, unit_row(om.dim, r))
                    term = om.left_apply(a_val, unit_row(om.dim, s))
                    rhs = [x + c * y for x, y in zip(rhs, term)]
                if lhs != rhs:
                    return (b, j)
        return None

    # -- towers --------------------------------------------------------------

    def V(self, n: int) -> Bimodule:
        if n not in self._V:
            if n == 0:
                self._V[0] = self.A_bim
            elif n == 1:
                self._V[1] = self.vec
            else:
                self._V[n] = self.pair(self.vec, self.V(n - 1)).space
        return self._V[n]

    def W(self, n: int) -> Bimodule:
        if n not in self._W:
            if n == 0:
                self._W[0] = self.A_bim
            elif n == 1:
                self._W[1] = self.omega
            else:
                self._W[n] = self.pair(self.W(n - 1), self.omega).space
        return self._W[n]

    def pair_V(self, n: int) -> TensorPair:
        """The pair presenting V(n) = Vec (x)_A V(n-1), n >= 2."""
        self.V(n)
        return self.pair(self.vec, self.V(n - 1))

    def pair_W(self, n: int) -> TensorPair:
        self.W(n)
        return self.pair(self.W(n - 1), self.omega)

    def OV(self, n: int) -> TensorPair:
        return self.pair(self.omega, self.V(n))

    # -- merges (canonical multiplication of tensor classes) ------------------

    def merge_vec(self, n: int, m: int) -> Mat:
        """V(n) (x) V(m) -> V(n+m) on plain Kronecker coordinates."""
        key = (n, m)
        if key in self._merge_vec:
            return self._merge_vec[key]
        Vn, Vm = self.V(n), self.V(m)
        if n == 0:
            cols = []
            for i in range(self.algebra.dim):
                for j in range(Vm.dim):
                    cols.append(Vm.left[i].column(j))
            out = Mat.from_cols(cols)
        elif m == 0:
            cols = []
            for j in range(Vn.dim):
                for i in range(self.algebra.dim):
                    cols.append(Vn.right[i].column(j))
            out = Mat.from_cols(cols)
        elif n == 1:
            out = self.pair(self.vec, Vm).project
            self.V(m + 1)  # ensure tower bimodule is registered
        else:
            pv = self.pair_V(n)
            inner = Mat.identity(self.vec.dim).kron(self.merge_vec(n - 1, m))
            lifted = pv.section.kron(Mat.identity(Vm.dim))
            out = self.pair(self.vec, self.V(n + m - 1)).project @ inner @ lifted
            self.V(n + m)
        self._merge_vec[key] = out
        return out

    def merge_om(self, n: int, m: int) -> Mat:
        key = (n, m)
        if key in self._merge_om:
            return self._merge_om[key]
        Wn, Wm = self.W(n), self.W(m)
        if m == 0:
            cols = []
            for j in range(Wn.dim):
                for i in range(self.algebra.dim):
                    cols.append(Wn.right[i].column(j))
            out = Mat.from_cols(cols)
        elif n == 0:
            cols = []
            for i in range(self.algebra.dim):
                for j in range(Wm.dim):
                    cols.append(Wm.left[i].column(j))
            out = Mat.from_cols(cols)
        elif m == 1:
            out = self.pair(Wn, self.omega).project
            self.W(n + 1)
        else:
            pw = self.pair_W(m)
            inner = self.merge_om(n, m - 1).kron(Mat.identity(self.omega.dim))
            lifted = Mat.identity(Wn.dim).kron(pw.section)
            out = self.pair(self.W(n + m - 1), self.omega).project @ inner @ lifted
            self.W(n + m)
        self._merge_om[key] = out
        return out

    # -- extended connections --------------------------------------------------

    def sigma_inv_last(self, k: int) -> Mat:
        """Apply sigma-inverse to the last two legs: Kron(W(k), Omega) -> W(k+1), k >= 1."""
        if k == 1:
            return self.sigma_inv_form @ self.W2.project
        pw = self.pair_W(k)
        to_inner = Mat.identity(self.W(k - 1).dim).kron(self.sigma_inv_form @ self.W2.project)
        lifted = pw.section.kron(Mat.identity(self.omega.dim))
        return self.merge_om(k - 1, 2) @ to_inner @ lifted

    def box_form_pow(self, n: int) -> Mat:
        """box<n>: W(n) -> W(n+1); box<0> = d, box<1> = box."""
        if n in self._box_form_pow:
            return self._box_form_pow[n]
        if n == 0:
            out = self.d
        elif n == 1:
            out = self.box_form
        else:
            k = n - 1  # recurse from box<k> with k >= 1
            Wk = self.W(k)
            domain_pair = self.pair_W(n)
            m1 = self.merge_om(k, 2) @ Mat.identity(Wk.dim).kron(self.box_form)
            m2 = self.sigma_inv_last(n) @ self.box_form_pow(k).kron(Mat.identity(self.omega.dim))
            total = m1 + m2
            for rel in domain_pair.relations.basis:
                if not vec_is_zero(total.apply(rel)):
                    raise ValidationError("box-form-pow-not-well-defined", witness=n)
            out = total @ domain_pair.section
        self._box_form_pow[n] = out
        return out

    def box_vec_pow(self, n: int) -> Mat:
        """box<n>: V(n) -> Omega1 (x)_A V(n); box<0> = d into OV(0)."""
        if n in self._box_vec_pow:
            return self._box_vec_pow[n]
        if n == 0:
            ov0 = self.OV(0)
            cols = [ov0.push(kron_vec(self.d.column(i), self.algebra.unit)) for i in range(self.algebra.dim)]
            out = Mat.from_cols(cols)
        elif n == 1:
            out = self.box_vec
        else:
            k = n - 1
            Vk = self.V(k)
            domain_pair = self.pair_V(n)
            OVn = self.OV(n)
            push_merge = OVn.project @ Mat.identity(self.omega.dim).kron(self.merge_vec(1, k))
            m1 = push_merge @ (self.OV1.section @ self.box_vec).kron(Mat.identity(Vk.dim))
            m2 = (
                push_merge
                @ self.OV1.section.kron(Mat.identity(Vk.dim))
                @ self.sigma_vec_plain.kron(Mat.identity(Vk.dim))
                @ Mat.identity(self.vec.dim).kron(self.OV(k).section @ self.box_vec_pow(k))
            )
            total = m1 + m2
            for rel in domain_pair.relations.basis:
                if not vec_is_zero(total.apply(rel)):
                    raise ValidationError("box-vec-pow-not-well-defined", witness=n)
            out = total @ domain_pair.section
        self._box_vec_pow[n] = out
        return out

    def braid_form(self, n: int) -> Mat:
        """Iterated sigma-inverse crossing: Kron(Omega, W(n)) -> W(n+1)."""
        if n in self._braid_form:
            return self._braid_form[n]
        if n == 1:
            out = self.sigma_inv_form @ self.W2.project
        else:
            pw = self.pair_W(n)
            lifted = Mat.identity(self.omega.dim).kron(pw.section)
            inner = self.braid_form(n - 1).kron(Mat.identity(self.omega.dim))
            out = self.sigma_inv_last(n) @ inner @ lifted
        self._braid_form[n] = out
        return out

    def braid_vec(self, n: int) -> Mat:
        """Iterated sigma crossing: Kron(V(n), Omega) -> Omega (x)_A V(n)."""
        if n in self._braid_vec:
            return self._braid_vec[n]
        if n == 1:
            out = self.sigma_vec_plain
        else:
            pv = self.pair_V(n)
            lifted = pv.section.kron(Mat.identity(self.omega.dim))
            inner = Mat.identity(self.vec.dim).kron(self.braid_vec(n - 1))
            cross = self.sigma_vec_plain.kron(Mat.identity(self.V(n - 1).dim))
            out = (
                self.OV(n).project
                @ Mat.identity(self.omega.dim).kron(self.merge_vec(1, n - 1))
                @ self.OV1.section.kron(Mat.identity(self.V(n - 1).dim))
                @ cross
                @ Mat.identity(self.vec.dim).kron(self.OV(n - 1).section)
                @ inner
                @ lifted
            )
        self._braid_vec[n] = out
        return out

    # -- n-fold evaluation and coevaluation -------------------------------------

    def ev_pow(self, n: int) -> Mat:
        """ev<n>: Kron(V(n), W(n)) -> A (well defined over all middle tensors)."""
        if n in self._ev_pow:
            return self._ev_pow[n]
        if n == 1:
            out = self.fgp.apply_mat
        else:
            Vn, Wn = self.V(n), self.W(n)
            pv, pw = self.pair_V(n), self.pair_W(n)
            prev = self.ev_pow(n - 1)
            dA = self.algebra.dim
            out = Mat.zeros(dA, Vn.dim * Wn.dim)
            for b in range(Vn.dim):
                vlift = pv.lift(unit_row(Vn.dim, b))
                for c in range(Wn.dim):
                    wlift = pw.lift(unit_row(Wn.dim, c))
                    col = [ZERO] * dA
                    for iv, cv in enumerate(vlift):
                        if not cv:
                            continue
                        u, rest_v = divmod(iv, self.V(n - 1).dim)
                        for iw, cw in enumerate(wlift):
                            if not cw:
                                continue
                            rest_w, alpha = divmod(iw, self.omega.dim)
                            inner = prev.apply(
                                kron_vec(unit_row(self.V(n - 1).dim, rest_v), unit_row(self.W(n - 1).dim, rest_w))
                            )
                            moved = self.omega.left_apply(inner, unit_row(self.omega.dim, alpha))
                            val = self.fgp.pair_apply(unit_row(self.vec.dim, u), moved)
                            col = [x + cv * cw * y for x, y in zip(col, val)]
                    for k, v in enumerate(col):
                        if v:
                            out.data[k][b * Wn.dim + c] = v
        self._ev_pow[n] = out
        return out

    def coev_pow(self, n: int) -> list[Scalar]:
        """A plain representative of coev<n>(1) in Kron(W(n), V(n))."""
        if n in self._coev_pow:
            return self._coev_pow[n]
        if n == 1:
            out = list(self.fgp.coev_one_plain)
        else:
            prev = self.coev_pow(n - 1)
            Wn, Vn = self.W(n), self.V(n)
            Wp, Vp = self.W(n - 1), self.V(n - 1)
            out = [ZERO] * (Wn.dim * Vn.dim)
            mo = self.merge_om(1, n - 1)
            mv = self.merge_vec(n - 1, 1)
            for idx, c in enumerate(self.fgp.coev_one_plain):
                if not c:
                    continue
                p, q = divmod(idx, self.vec.dim)
                for idx2, c2 in enumerate(prev):
                    if not c2:
                        continue
                    r, s = divmod(idx2, Vp.dim)
                    w_part = mo.apply(kron_vec(unit_row(self.omega.dim, p), unit_row(Wp.dim, r)))
                    v_part = mv.apply(kron_vec(unit_row(Vp.dim, s), unit_row(self.vec.dim, q)))
                    contrib = kron_vec(w_part, v_part)
                    cc = c * c2
                    for k, v in enumerate(contrib):
                        if v:
                            out[k] = out[k] + cc * v
        self._coev_pow[n] = out
        return out

    def zigzag_defect(self, n: int):
        """Check the n-fold zig-zag identities; returns a witness or None."""
        Vn, Wn = self.V(n), self.W(n)
        coev = self.coev_pow(n)
        ev = self.ev_pow(n)
        for b in range(Vn.dim):
            acc = [ZERO] * Vn.dim
            for idx, c in enumerate(coev):
                if not c:
                    continue
                r, s = divmod(idx, Vn.dim)
                a_val = ev.apply(kron_vec(unit_row(Vn.dim, b), unit_row(Wn.dim, r)))
                term = Vn.left_apply(a_val, unit_row(Vn.dim, s))
                acc = [x + c * y for x, y in zip(acc, term)]
            if acc != unit_row(Vn.dim, b):
                return ("fields", n, b)
        for j in range(Wn.dim):
            acc = [ZERO] * Wn.dim
            for idx, c in enumerate(coev):
                if not c:
                    continue
                r, s = divmod(idx, Vn.dim)
                a_val = ev.apply(kron_vec(unit_row(Vn.dim, s), unit_row(Wn.dim, j)))
                term = Wn.right_apply(unit_row(Wn.dim, r), a_val)
                acc = [x + c * y for x, y in zip(acc, term)]
            if acc != unit_row(Wn.dim, j):
                return ("forms", n, j)
        return None

    def ev_duality_defect(self, n: int):
        """Prop-level identity: d o ev<n> = (id (x) ev<n>)(box<n> (x) id) + (ev<n> (x) id)(id (x) box<n>)."""
        if n == 1:
            return self._duality_defect()
        Vn, Wn = self.V(n), self.W(n)
        ev = self.ev_pow(n)
        box_v = self.box_vec_pow(n)
        box_w = self.box_form_pow(n)
        OVn = self.OV(n)
        pw_next = self.pair_W(n + 1)
        for b in range(Vn.dim):
            v = unit_row(Vn.dim, b)
            boxv = OVn.lift(box_v.apply(v))
            for j in range(Wn.dim):
                w = unit_row(Wn.dim, j)
                lhs = self.d.apply(ev.apply(kron_vec(v, w)))
                rhs = [ZERO] * self.omega.dim
                for idx, c in enumerate(boxv):
                    if not c:
                        continue
                    r, s = divmod(idx, Vn.dim)
                    a_val = ev.apply(kron_vec(unit_row(Vn.dim, s), w))
                    term = self.omega.right_apply(unit_row(self.omega.dim, r), a_val)
                    rhs = [x + c * y for x, y in zip(rhs, term)]
                boxw = pw_next.lift(box_w.apply(w))
                for idx, c in enumerate(boxw):
                    if not c:
                        continue
                    r, s = divmod(idx, self.omega.dim)
                    a_val = ev.apply(kron_vec(v, unit_row(Wn.dim, r)))
                    term = self.omega.left_apply(a_val, unit_row(self.omega.dim, s))
                    rhs = [x + c * y for x, y in zip(rhs, term)]
                if lhs != rhs:
                    return (n, b, j)
        return None
