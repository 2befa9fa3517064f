"""The algebra of differential operators: the degree-filtered product built
from the bullet recursion, graded operator elements, and their action on
modules with connection.

The product components ``bullet(n, m, k)`` are bilinear on plain Kronecker
coordinates of the quotient powers (the product is NOT balanced over the
algebra: differentiation obstructs it, which is the whole point).  The
recursion lowers the left degree:

* degree 0: ``a . w`` when k = m, else 0
* degree 1: ``u (x) w`` at k = m+1, ``(ev (x) id)(u (x) box<m> w)`` at k = m
* step: ``(u (x) v) o_k w = u (x) (v o_{k-1} w) + u o_k (v o_k w) - (u o_n v) o_k w``

Well-definedness of the step over the tensor relations in ``Vec (x)_A V(n)``
is checked exactly at table-build time.
"""

from __future__ import annotations

from .algebra import unit_row
from .calculus import ConnectionModule
from .geometry import Geometry
from .linalg import Mat, kron_vec, vec_is_zero
from .report import CheckResult, ValidationError
from .scalars import ZERO, Scalar, sc


class TruncationExceeded(ValueError):
    pass


class BulletTable:
    """Memoized matrices for the degree components of the bullet product."""

    def __init__(self, geometry: Geometry):
        self.geometry = geometry
        self._tables: dict[tuple[int, int, int], Mat] = {}

    def table(self, n: int, m: int, k: int) -> Mat:
        """Matrix of o_k : V(n) (x) V(m) -> V(k) on plain Kronecker coordinates."""
        key = (n, m, k)
        if key in self._tables:
            return self._tables[key]
        g = self.geometry
        Vn, Vm = g.V(n), g.V(m)
        rows = g.V(k).dim if k >= 0 else 0
        cols = Vn.dim * Vm.dim
        if k < 0 or k > n + m or (n == 0 and k != m) or (n == 1 and k not in (m, m + 1)):
            out = Mat.zeros(max(rows, 0), cols)
        elif n == 0:
            out = g.merge_vec(0, m)
        elif n == 1 and k == m + 1:
            out = g.merge_vec(1, m)
        elif n == 1 and k == m:
            # (ev (x) id^m)(u (x) box<m> w)
            OVm = g.OV(m)
            box = g.box_vec_pow(m)
            out = Mat.zeros(rows, cols)
            for c in range(Vm.dim):
                lifted = OVm.lift(box.apply(unit_row(Vm.dim, c)))
                entries = [(idx, cf) for idx, cf in enumerate(lifted) if cf]
                for b in range(g.vec.dim):
                    col = [ZERO] * rows
                    for idx, cf in entries:
                        r, s = divmod(idx, Vm.dim)
                        a_val = g.fgp.pair_apply(unit_row(g.vec.dim, b), unit_row(g.omega.dim, r))
                        term = Vm.left_apply(a_val, unit_row(Vm.dim, s))
                        col = [x + cf * y for x, y in zip(col, term)]
                    for t, v in enumerate(col):
                        if v:
                            out.data[t][b * Vm.dim + c] = v
        else:
            out = self._step_table(n, m, k)
        self._tables[key] = out
        return out

    def _step_table(self, n: int, m: int, k: int) -> Mat:
        """(u (x) v) o_k w via the recursion, including the well-definedness check."""
        g = self.geometry
        pv = g.pair_V(n)
        Vn, Vm, Vprev = g.V(n), g.V(m), g.V(n - 1)
        dvec = g.vec.dim
        # term 1: u (x) (v o_{k-1} w)
        if k >= 1:
            t1 = g.merge_vec(1, k - 1) @ Mat.identity(dvec).kron(self.table(n - 1, m, k - 1))
        else:
            t1 = Mat.zeros(g.V(k).dim, dvec * Vprev.dim * Vm.dim)
        # term 2: u o_k (v o_k w); skip entirely when the inner product vanishes
        inner = self.table(n - 1, m, k)
        if inner.is_zero():
            t2 = Mat.zeros(g.V(k).dim, dvec * Vprev.dim * Vm.dim)
        else:
            t2 = self.table(1, k, k) @ Mat.identity(dvec).kron(inner)
        # term 3: (u o_{n-1} v) o_k w
        t3 = self.table(n - 1, m, k) @ self.table(1, n - 1, n - 1).kron(Mat.identity(Vm.dim))
        plain = t1 + t2 - t3  # on Kron(vec, V(n-1), V(m))
        # well-definedness over Vec (x)_A V(n-1) against every relation generator
        for rel in pv.relations.basis:
            for c in range(Vm.dim):
                probe = kron_vec(rel, unit_row(Vm.dim, c))
                if not vec_is_zero(plain.apply(probe)):
                    raise ValidationError("bullet-not-well-defined", witness=(n, m, k, c))
        return plain @ pv.section.kron(Mat.identity(Vm.dim))

    def bullet_k(self, v_coords, n: int, w_coords, m: int, k: int) -> list[Scalar]:
        return self.table(n, m, k).apply(kron_vec(v_coords, w_coords))


class GradedOperator:
    """An element of the degree-truncated operator algebra.

    Components are concrete quotient coordinates per degree; arithmetic that
    would need components beyond the truncation degree raises rather than
    silently dropping terms.
    """

    def __init__(self, geometry: Geometry, components: dict[int, list[Scalar]], truncation: int):
        self.geometry = geometry
        self.truncation = truncation
        comps = {}
        for deg, coords in components.items():
            if deg > truncation:
                raise TruncationExceeded(f"degree {deg} exceeds truncation {truncation}")
            if any(coords):
                comps[deg] = list(coords)
        self.components = comps

    @staticmethod
    def unit(geometry: Geometry, truncation: int) -> "GradedOperator":
        return GradedOperator(geometry, {0: list(geometry.algebra.unit)}, truncation)

    @staticmethod
    def homogeneous(geometry: Geometry, degree: int, coords, truncation: int) -> "GradedOperator":
        return GradedOperator(geometry, {degree: [sc(x) for x in coords]}, truncation)

    @property
    def degree(self) -> int:
        return max(self.components, default=0)

    def component(self, n: int) -> list[Scalar]:
        return list(self.components.get(n, [ZERO] * self.geometry.V(n).dim))

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        comps = dict(self.components)
        for deg, coords in other.components.items():
            if deg in comps:
                comps[deg] = [x + y for x, y in zip(comps[deg], coords)]
            else:
                comps[deg] = list(coords)
        return GradedOperator(self.geometry, comps, self.truncation)

    def __sub__(self, other: "GradedOperator") -> "GradedOperator":
        return self + other.scale(sc(-1))

    def scale(self, s) -> "GradedOperator":
        s = sc(s)
        return GradedOperator(
            self.geometry, {d: [s * x for x in c] for d, c in self.components.items()}, self.truncation
        )

    def __eq__(self, other):
        if not isinstance(other, GradedOperator):
            return NotImplemented
        return self.components == other.components

    def is_zero(self) -> bool:
        return not self.components

    def bullet(self, other: "GradedOperator", table: BulletTable) -> "GradedOperator":
        """The associative product; sums o_k over all degrees."""
        if self.degree + other.degree > self.truncation:
            raise TruncationExceeded(
                f"product degree {self.degree}+{other.degree} exceeds truncation {self.truncation}"
            )
        out: dict[int, list[Scalar]] = {}
        for n, vc in self.components.items():
            for m, wc in other.components.items():
                for k in range(0, n + m + 1):
                    term = table.bullet_k(vc, n, wc, m, k)
                    if vec_is_zero(term):
                        continue
                    if k in out:
                        out[k] = [x + y for x, y in zip(out[k], term)]
                    else:
                        out[k] = term
        return GradedOperator(self.geometry, out, self.truncation)

    def act_on(self, module: ConnectionModule, e_coords) -> list[Scalar]:
        """Apply the operator to a module element via iterated derivatives."""
        out = [ZERO] * module.space.dim
        for n, vc in self.components.items():
            term = module.act(n, vc, e_coords)
            out = [x + y for x, y in zip(out, term)]
        return out

    def __repr__(self):
        parts = ", ".join(f"deg{d}:{[str(x) for x in c]}" for d, c in sorted(self.components.items()))
        return f"GradedOperator({parts or '0'})"


def right_bullet_by_algebra(table: BulletTable, n: int, a_coords, v_coords) -> dict[int, list[Scalar]]:
    """v bullet a for homogeneous v of degree n.

    The top component is the plain right action; every lower degree picks up
    an iterated-derivative term, all the way down to degree zero.
    """
    out: dict[int, list[Scalar]] = {}
    for k in range(n, -1, -1):
        term = table.table(n, 0, k).apply(kron_vec(v_coords, a_coords))
        if any(term):
            out[k] = term
    return out


def morphism_equivariance_report(
    table: BulletTable,
    em: ConnectionModule,
    fm: ConnectionModule,
    t: Mat,
    max_degree: int,
) -> list[CheckResult]:
    """Check v |> T(e) = T(v |> e) for all basis v up to max_degree, basis e.

    Callers are expected to have verified that t intertwines the connections;
    the report records the equivariance consequence degree by degree.
    """
    g = table.geometry
    results = []
    for n in range(0, max_degree + 1):
        Vn = g.V(n)
        fail = None
        for b in range(Vn.dim):
            v = unit_row(Vn.dim, b)
            for j in range(em.space.dim):
                e = unit_row(em.space.dim, j)
                lhs = fm.act(n, v, t.apply(e))
                rhs = t.apply(em.act(n, v, e))
                if lhs != rhs:
                    fail = (n, b, j)
                    break
            if fail:
                break
        results.append(CheckResult(f"equivariance-deg{n}", fail is None, witness=fail))
    return results
