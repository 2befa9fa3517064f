"""The built-in example bundles, authored as plain dictionaries.

Derivations are sketched in each bundle's ``notes`` field and worked through
in detail in ``docs/bundle-derivations.md`` at the repository root.
"""

from __future__ import annotations


def _z(n, m):
    return [["0"] * m for _ in range(n)]


def two_point_universal() -> dict:
    """Functions on two points with the universal calculus.

    Omega1 has basis w12 = p1 (x) p2 and w21 = p2 (x) p1 inside A (x) A, and
    d p1 = w21 - w12.  The Leibniz constraints force the right connection to
    be box(w12) = -q1 + s2 q2, box(w21) = s1 q1 - q2 with sigma-inverse
    diag(s1, s2) on q1 = [w12 (x) w21], q2 = [w21 (x) w12]; this bundle fixes
    the generic choice s1 = 2, s2 = 3.  The declared left connection on the
    1-forms is the analogous family at t1 = 1/2, t2 = 5.
    """
    box = _z(4, 2)
    box[1][0] = "-1"
    box[2][0] = "3"
    box[1][1] = "2"
    box[2][1] = "-1"
    sigma_inv = _z(4, 4)
    sigma_inv[1][1] = "2"
    sigma_inv[2][2] = "3"
    nabla = _z(4, 2)
    nabla[1][0] = "-1/2"
    nabla[2][0] = "1"
    nabla[1][1] = "1"
    nabla[2][1] = "-5"
    sigma = _z(4, 4)
    sigma[1][1] = "1/2"
    sigma[2][2] = "5"
    return {
        "format": "ncdiffop-bundle/1",
        "name": "two-point-universal",
        "field": "Q",
        "truncation_degree": 3,
        "notes": (
            "Universal first-order calculus on the functions on a 2-point set. "
            "box and sigma-inverse solve the two Leibniz equations exactly; the "
            "braiding constants (2, 3) and (1/2, 5) are generic choices from the "
            "two-parameter solution family."
        ),
        "algebra": {
            "basis": ["p1", "p2"],
            "mul": [[["1", "0"], ["0", "0"]], [["0", "0"], ["0", "1"]]],
            "unit": ["1", "1"],
            "star": [["1", "0"], ["0", "1"]],
        },
        "omega": {
            "basis": ["w12", "w21"],
            "left": [[["1", "0"], ["0", "0"]], [["0", "0"], ["0", "1"]]],
            "right": [[["0", "0"], ["0", "1"]], [["1", "0"], ["0", "0"]]],
        },
        "d": [["-1", "1"], ["1", "-1"]],
        "dual_basis": {
            "forms": [["1", "0"], ["0", "1"]],
            "functionals": [[["0", "0"], ["1", "0"]], [["0", "1"], ["0", "0"]]],
        },
        "box": box,
        "sigma_inv": sigma_inv,
        "modules": {"omega1": {"space": "omega", "nabla": nabla, "sigma": sigma}},
        "inner_products": {
            "A": "canonical",
            "omega1": [
                [["1", "0"], ["0", "0"]],
                [["0", "0"], ["0", "2"]],
            ],
        },
        "states": {"uniform": ["1/2", "1/2"], "point1": ["1", "0"]},
    }


def z3_function_calculus() -> dict:
    """Functions on the cyclic group of order three with the rank-two calculus.

    Omega1 is free of rank 2 over A with form basis e_1, e_2 indexed by the
    two nonzero group elements; delta_g e_c has flat index 3*(c-1) + g.  The
    differential is the finite-difference operator, the braiding is the flip
    on the free basis, and box(e_1) = e_2 (x) e_2, box(e_2) = e_1 (x) e_1 is
    the unique grading-compatible quadratic term (indices need c = d + e mod 3).
    """
    n = 3
    cs = [1, 2]
    dim_om = n * len(cs)

    def om_idx(ci: int, g: int) -> int:
        return ci * n + (g % n)

    # algebra of functions: delta basis
    mul = [[["0"] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        mul[i][i][i] = "1"
    algebra = {
        "basis": [f"d{g}" for g in range(n)],
        "mul": mul,
        "unit": ["1"] * n,
        "star": [["1" if i == j else "0" for j in range(n)] for i in range(n)],
    }

    left = []
    right = []
    for h in range(n):
        lm = _z(dim_om, dim_om)
        rm = _z(dim_om, dim_om)
        for ci, c in enumerate(cs):
            for g in range(n):
                if g == h:
                    lm[om_idx(ci, g)][om_idx(ci, g)] = "1"
                if (g + c) % n == h:
                    rm[om_idx(ci, g)][om_idx(ci, g)] = "1"
        left.append(lm)
        right.append(rm)

    d_rows = _z(dim_om, n)
    for h in range(n):
        for ci, c in enumerate(cs):
            d_rows[om_idx(ci, h - c)][h] = "1"
            # the diagonal term may cancel a difference term when c covers the
            # whole group; accumulate rather than overwrite
    for h in range(n):
        for ci, c in enumerate(cs):
            cur = d_rows[om_idx(ci, h)][h]
            d_rows[om_idx(ci, h)][h] = str(int(cur) - 1)

    forms = []
    functionals = []
    for ci, c in enumerate(cs):
        form = ["0"] * dim_om
        for g in range(n):
            form[om_idx(ci, g)] = "1"
        forms.append(form)
        fmat = _z(n, dim_om)
        for g in range(n):
            fmat[(g + c) % n][om_idx(ci, g)] = "1"
        functionals.append(fmat)

    def kron(i: int, j: int) -> int:
        return i * dim_om + j

    # sigma-inverse: the flip on the free basis; the chosen representative of
    # [delta_g e_d (x) e_c] is delta_g e_c (x) delta_{g+c} e_d
    sigma_inv = _z(dim_om * dim_om, dim_om * dim_om)
    for ci, c in enumerate(cs):
        for di, dd in enumerate(cs):
            for g in range(n):
                src = kron(om_idx(di, g), om_idx(ci, g + dd))
                dst = kron(om_idx(ci, g), om_idx(di, g + c))
                sigma_inv[dst][src] = "1"

    # box(delta_g e_c) = delta_g . box(e_c) + sigma_inv(d delta_g (x) e_c)
    box = _z(dim_om * dim_om, dim_om)
    for ci, c in enumerate(cs):
        other = 1 - ci
        for g in range(n):
            col = om_idx(ci, g)
            # delta_g . (e_other (x) e_other)
            for h in range(n):
                box[kron(om_idx(other, g), om_idx(other, h))][col] = str(
                    int(box[kron(om_idx(other, g), om_idx(other, h))][col]) + 1
                )
            # sigma_inv(d delta_g (x) e_c): flip of sum_d (delta_{g-d} - delta_g) e_d (x) e_c
            for di, dd in enumerate(cs):
                for gp, sign in (((g - dd) % n, 1), (g, -1)):
                    dst = kron(om_idx(ci, gp), om_idx(di, gp + c))
                    box[dst][col] = str(int(box[dst][col]) + sign)

    # declared left connection on the forms: nabla(delta_g e_c) = d(delta_g) (x) e_c
    nabla = _z(dim_om * dim_om, dim_om)
    for ci, c in enumerate(cs):
        for g in range(n):
            col = om_idx(ci, g)
            for di, dd in enumerate(cs):
                for gp, sign in (((g - dd) % n, 1), (g, -1)):
                    for h in range(n):
                        dst = kron(om_idx(di, gp), om_idx(ci, h))
                        nabla[dst][col] = str(int(nabla[dst][col]) + sign)

    ip = [[["0"] * n for _ in range(dim_om)] for _ in range(dim_om)]
    for ci in range(len(cs)):
        for g in range(n):
            ip[om_idx(ci, g)][om_idx(ci, g)][g] = "1"

    return {
        "format": "ncdiffop-bundle/1",
        "name": "z3-function-calculus",
        "field": "Q",
        "truncation_degree": 3,
        "notes": (
            "Finite-difference calculus on functions on the cyclic group of "
            "order 3, free of rank two over the algebra.  The braiding is the "
            "flip on the free form basis; the right-connection quadratic term "
            "pairs each basis form with the opposite one, the only choice "
            "compatible with the group grading."
        ),
        "algebra": algebra,
        "omega": {
            "basis": [f"e{c}g{g}" for ci, c in enumerate(cs) for g in range(n)],
            "left": left,
            "right": right,
        },
        "d": d_rows,
        "dual_basis": {"forms": forms, "functionals": functionals},
        "box": box,
        "sigma_inv": sigma_inv,
        "modules": {"omega1": {"space": "omega", "nabla": nabla, "sigma": sigma_inv}},
        "inner_products": {"A": "canonical", "omega1": ip},
        "states": {"uniform": ["1/3", "1/3", "1/3"], "point0": ["1", "0", "0"]},
    }


def zero_form_smoke() -> dict:
    """The degenerate bundle with no 1-forms: every tower collapses to A."""
    return {
        "format": "ncdiffop-bundle/1",
        "name": "zero-form-smoke",
        "field": "Q",
        "truncation_degree": 3,
        "notes": "Degenerate calculus Omega1 = 0 over the rationals; a smoke test.",
        "algebra": {
            "basis": ["one"],
            "mul": [[["1"]]],
            "unit": ["1"],
            "star": [["1"]],
        },
        "omega": {"basis": [], "left": [[]], "right": [[]]},
        "d": [],
        "dual_basis": {"forms": [], "functionals": []},
        "box": [],
        "sigma_inv": [],
        "modules": {},
        "inner_products": {"A": "canonical"},
        "states": {"uniform": ["1"]},
    }
