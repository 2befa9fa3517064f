"""Tensor products over the algebra, conjugates and FGP structure.

Independent oracles: tensor-quotient dimensions are cross-checked against a
plain Fraction Gaussian elimination over the enumerated relation vectors.
"""

from fractions import Fraction

import pytest

from ncdiffop.algebra import unit_row
from ncdiffop.bimodule import (
    BimoduleMap,
    BimoduleMapError,
    NotProjective,
    TensorPair,
    algebra_as_bimodule,
    bar_coords,
    conjugate_bimodule,
    dualize_right_module,
    intertwining_failure,
    relation_vectors,
)
from ncdiffop.linalg import Mat, inverse, kron_vec
from ncdiffop.scalars import ONE, ZERO, sc


def frac_span_dim(vectors, ambient):
    """Oracle: dimension of a rational span by hand-rolled elimination."""
    rows = [[Fraction(str(v.get(i, 0))) for i in range(ambient)] for v in vectors]
    rank = 0
    for col in range(ambient):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = Fraction(1) / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def test_omega_bimodule_valid(two_point_omega):
    assert all(r.ok for r in two_point_omega.validate())


def test_unit_object_left(two_point_algebra, two_point_omega):
    # A (x)_A E is isomorphic to E via a (x) e -> a.e
    A = algebra_as_bimodule(two_point_algebra)
    pair = TensorPair(A, two_point_omega)
    assert pair.dim == two_point_omega.dim
    mult_plain = Mat.zeros(two_point_omega.dim, A.dim * two_point_omega.dim)
    for i in range(A.dim):
        for j in range(two_point_omega.dim):
            col = two_point_omega.left[i].column(j)
            for k, v in enumerate(col):
                mult_plain.data[k][i * two_point_omega.dim + j] = v
    iso = pair.induce(mult_plain, "left-unitor")
    m = BimoduleMap(pair.space, two_point_omega, iso, "left-unitor")  # verifies equivariance
    inverse(m.mat)  # invertible


def test_unit_object_right(two_point_algebra, two_point_omega):
    A = algebra_as_bimodule(two_point_algebra)
    pair = TensorPair(two_point_omega, A)
    assert pair.dim == two_point_omega.dim
    mult_plain = Mat.zeros(two_point_omega.dim, two_point_omega.dim * A.dim)
    for j in range(two_point_omega.dim):
        for i in range(A.dim):
            col = two_point_omega.right[i].column(j)
            for k, v in enumerate(col):
                mult_plain.data[k][j * A.dim + i] = v
    iso = pair.induce(mult_plain, "right-unitor")
    BimoduleMap(pair.space, two_point_omega, iso, "right-unitor")
    inverse(iso)


def test_omega_tensor_omega_dim_two(two_point_omega):
    # oracle: enumerate the relations and eliminate with Fractions
    rels = [{k: str(v) for k, v in row.items()} for row in relation_vectors(two_point_omega, two_point_omega)]
    assert 4 - frac_span_dim(rels, 4) == 2
    pair = TensorPair(two_point_omega, two_point_omega)
    assert pair.dim == 2
    # the diagonal plain tensors die in the quotient
    assert pair.push(kron_vec([ONE, ZERO], [ONE, ZERO])) == [ZERO, ZERO]
    assert pair.push(kron_vec([ZERO, ONE], [ZERO, ONE])) == [ZERO, ZERO]


def test_tensor_projection_section_contract(two_point_omega):
    pair = TensorPair(two_point_omega, two_point_omega)
    assert (pair.project @ pair.section) == Mat.identity(pair.dim)
    for rel in pair.relations.basis:
        assert pair.push(rel) == [ZERO] * pair.dim


def test_tensor_associativity_rebracketing(two_point_algebra, two_point_omega):
    Abim = algebra_as_bimodule(two_point_algebra)
    for triple in [
        (two_point_omega, two_point_omega, two_point_omega),
        (Abim, two_point_omega, two_point_omega),
        (two_point_omega, Abim, two_point_omega),
    ]:
        e, f, g = triple
        ef = TensorPair(e, f)
        ef_g = TensorPair(ef.space, g)
        fg = TensorPair(f, g)
        e_fg = TensorPair(e, fg.space)
        assert ef_g.dim == e_fg.dim
        # canonical re-bracketing: lift twice, project twice
        cols = []
        for idx in range(ef_g.dim):
            plain_pair = ef_g.lift(unit_row(ef_g.dim, idx))
            out = [ZERO] * e_fg.dim
            for p, c in enumerate(plain_pair):
                if not c:
                    continue
                ij, k = divmod(p, g.dim)
                ef_plain = ef.lift(unit_row(ef.dim, ij))
                for q, cc in enumerate(ef_plain):
                    if not cc:
                        continue
                    i, j = divmod(q, f.dim)
                    inner = fg.push(kron_vec(unit_row(f.dim, j), unit_row(g.dim, k)))
                    term = e_fg.push(kron_vec(unit_row(e.dim, i), inner))
                    out = [x + c * cc * y for x, y in zip(out, term)]
            cols.append(out)
        rebracket = Mat.from_cols(cols)
        BimoduleMap(ef_g.space, e_fg.space, rebracket, "assoc")  # action-equivariant
        inverse(rebracket)  # and invertible


def test_conjugate_two_point_omega(two_point_algebra, two_point_omega):
    conj = conjugate_bimodule(two_point_omega)
    # hand computation: conjugation swaps the roles of the two actions
    assert conj.left[0] == two_point_omega.right[0]
    assert conj.left[1] == two_point_omega.right[1]
    assert conj.right[0] == two_point_omega.left[0]
    assert all(r.ok for r in conj.validate())
    double = conjugate_bimodule(conj)
    assert all(double.left[i] == two_point_omega.left[i] for i in range(2))
    assert all(double.right[i] == two_point_omega.right[i] for i in range(2))


def test_conjugate_of_algebra(two_point_algebra):
    A = algebra_as_bimodule(two_point_algebra)
    conj = conjugate_bimodule(A)
    # commutative star-trivial algebra: conjugate actions coincide with the original
    assert all(conj.left[i] == A.left[i] for i in range(2))
    assert all(conj.right[i] == A.right[i] for i in range(2))


def test_bar_coords_antilinear():
    v = [sc("1+2i"), sc("3")]
    assert bar_coords(v) == [sc("1-2i"), sc("3")]


def test_bimodule_map_verification(two_point_omega):
    bad = Mat.from_rows([[1, 1], [0, 0]])
    assert intertwining_failure(two_point_omega, two_point_omega, bad) is not None
    with pytest.raises(BimoduleMapError):
        BimoduleMap(two_point_omega, two_point_omega, bad, "bad")
    BimoduleMap(two_point_omega, two_point_omega, Mat.identity(2), "id")


# -- FGP / dualization ----------------------------------------------------------


def test_dualize_algebra_as_module(two_point_algebra):
    A = algebra_as_bimodule(two_point_algebra)
    fgp = dualize_right_module(A, [list(two_point_algebra.unit)], [Mat.identity(2)])
    assert fgp.dual.dim == 2  # Hom_A(A, A) is A itself
    assert all(r.ok for r in fgp.dual.validate())


def test_dualize_two_point_omega(two_point_omega, two_point_dual_basis):
    forms, functionals = two_point_dual_basis
    fgp = dualize_right_module(two_point_omega, [[sc(x) for x in f] for f in forms], functionals)
    # independent count: right-linearity forces v(w12) in span{p2}, v(w21) in span{p1}
    assert fgp.dual.dim == 2
    assert all(r.ok for r in fgp.dual.validate())
    # ev and coev passed bimodule-map verification during construction;
    # check the evaluation values against the dual basis
    for i, (form, func) in enumerate(zip(fgp.basis_forms, fgp.basis_functionals)):
        applied = fgp.pair_apply(func, form)
        assert applied == fgp.idempotent[i][i]


def test_dualize_rejects_non_dual_basis(two_point_omega, two_point_dual_basis):
    forms, functionals = two_point_dual_basis
    with pytest.raises(NotProjective):
        dualize_right_module(two_point_omega, [[sc(2), sc(0)], [sc(0), sc(1)]], functionals)
