"""Hermitian inner products on bimodules, tensor-product pairings, iterated
derivative pairings, and Sobolev Gram matrices with exact PSD certificates.

Positivity at finite dimension is certified on the scalar Gram matrices
obtained by pushing the algebra-valued pairing through states; no square
roots or completions are ever needed.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .algebra import Algebra, State, unit_row
from .bimodule import BimoduleMap, BimoduleMapError, Bimodule, TensorPair, algebra_as_bimodule, conjugate_bimodule
from .calculus import ConnectionModule
from .linalg import Mat, ldl_certify_psd
from .report import CheckResult, ValidationError
from .scalars import ZERO, Scalar, sc


class PositivityFailure(ValidationError):
    pass


class InnerProduct:
    """An algebra-valued sesquilinear pairing on a bimodule.

    ``values[i][j]`` holds the algebra coordinates of the pairing of basis
    element i with the conjugate of basis element j.  The pairing is linear in
    the first argument; conjugation of the second argument's coordinates is
    the caller-facing convention (see ``of_elements``).
    """

    def __init__(self, module: Bimodule, values, name: str = "ip"):
        self.module = module
        self.algebra = module.algebra
        self.values = [[[sc(x) for x in values[i][j]] for j in range(module.dim)] for i in range(module.dim)]
        self.name = name

    def of_elements(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> list[Scalar]:
        """<x, conj(y)> in algebra coordinates."""
        out = [ZERO] * self.algebra.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                c = a * b.conj()
                for k, v in enumerate(self.values[i][j]):
                    if v:
                        out[k] = out[k] + c * v
        return out

    def validate(self, states: Optional[list[State]] = None) -> list[CheckResult]:
        results = []
        A, E = self.algebra, self.module
        sym_fail = None
        for i in range(E.dim):
            for j in range(E.dim):
                flipped = A.apply_star(self.values[j][i])
                if self.values[i][j] != flipped:
                    sym_fail = (i, j)
                    break
            if sym_fail:
                break
        results.append(CheckResult(f"{self.name}:symmetry", sym_fail is None, witness=sym_fail))

        conj = conjugate_bimodule(E)
        pair = TensorPair(E, conj)
        plain = Mat.zeros(A.dim, E.dim * E.dim)
        for i in range(E.dim):
            for j in range(E.dim):
                for k, v in enumerate(self.values[i][j]):
                    if v:
                        plain.data[k][i * E.dim + j] = v
        try:
            mat = pair.induce(plain, f"{self.name}-pairing")
            BimoduleMap(pair.space, algebra_as_bimodule(A), mat, f"{self.name}-pairing")
            results.append(CheckResult(f"{self.name}:bimodule-map", True))
        except (ValidationError, BimoduleMapError) as err:
            results.append(CheckResult(f"{self.name}:bimodule-map", False, detail=str(err)))

        for state in states or []:
            gram = Mat.zeros(E.dim, E.dim)
            for i in range(E.dim):
                for j in range(E.dim):
                    gram.data[i][j] = state(self.values[i][j])
            cert = ldl_certify_psd(gram)
            results.append(
                CheckResult(
                    f"{self.name}:positive[{state.name}]",
                    cert.is_psd,
                    witness=None if cert.is_psd else [str(x) for x in cert.vector],
                )
            )
        return results


def canonical_algebra_ip(algebra: Algebra, space: Optional[Bimodule] = None) -> InnerProduct:
    """<a, conj(b)> = a b* on the algebra itself."""
    values = []
    for i in range(algebra.dim):
        row = []
        for j in range(algebra.dim):
            row.append(algebra.mul(unit_row(algebra.dim, i), algebra.apply_star(unit_row(algebra.dim, j))))
        values.append(row)
    return InnerProduct(space or algebra_as_bimodule(algebra), values, "ip-A")


def tensor_inner_product(ip_e: InnerProduct, ip_f: InnerProduct, pair: TensorPair, name=None) -> InnerProduct:
    """<x (x) y, conj(x' (x) y')> = <x.<y, conj(y')>_F, conj(x')>_E on the quotient."""
    E, F = ip_e.module, ip_f.module
    if pair.e is not E or pair.f is not F:
        raise ValueError("tensor pair does not match the inner product factors")
    dim = pair.dim
    values = []
    for a in range(dim):
        xa = pair.lift(unit_row(dim, a))
        row = []
        for b in range(dim):
            yb = pair.lift(unit_row(dim, b))
            acc = [ZERO] * ip_e.algebra.dim
            for p, c in enumerate(xa):
                if not c:
                    continue
                i, j = divmod(p, F.dim)
                for q, c2 in enumerate(yb):
                    if not c2:
                        continue
                    k, l = divmod(q, F.dim)
                    inner = ip_f.values[j][l]
                    moved = E.right_apply(unit_row(E.dim, i), inner)
                    cc = c * c2.conj()
                    for m, cm in enumerate(moved):
                        if not cm:
                            continue
                        for t, v in enumerate(ip_e.values[m][k]):
                            if v:
                                acc[t] = acc[t] + cc * cm * v
            row.append(acc)
        values.append(row)
    return InnerProduct(pair.space, values, name or f"({ip_e.name}(x){ip_f.name})")


class SobolevPairings:
    """Iterated pairings <<e, conj(f)>>_n for a module with connection."""

    def __init__(self, module: ConnectionModule, ip_omega: InnerProduct, ip_module: InnerProduct):
        self.module = module
        self.geometry = module.geometry
        if ip_omega.module is not self.geometry.omega:
            raise ValueError("ip_omega must live on the 1-forms")
        if ip_module.module is not module.space:
            raise ValueError("ip_module must live on the module")
        self.ip_omega = ip_omega
        self.ip_module = ip_module
        self._ip_W: dict[int, InnerProduct] = {1: ip_omega}
        self._ip_WE: dict[int, InnerProduct] = {}
        self._iterated: dict[int, list[list[list[Scalar]]]] = {}

    def ip_forms_power(self, n: int) -> InnerProduct:
        if n not in self._ip_W:
            prev = self.ip_forms_power(n - 1)
            pair = self.geometry.pair_W(n)
            self._ip_W[n] = tensor_inner_product(prev, self.ip_omega, pair, f"ip-W{n}")
        return self._ip_W[n]

    def ip_derivative_target(self, n: int) -> InnerProduct:
        if n not in self._ip_WE:
            pair = self.geometry.pair(self.geometry.W(n), self.module.space)
            self._ip_WE[n] = tensor_inner_product(self.ip_forms_power(n), self.ip_module, pair, f"ip-W{n}E")
        return self._ip_WE[n]

    def iterated(self, n: int) -> list[list[list[Scalar]]]:
        """values[i][j] = <<e_i, conj(e_j)>>_n in algebra coordinates."""
        if n in self._iterated:
            return self._iterated[n]
        E = self.module.space
        if n == 0:
            vals = self.ip_module.values
        else:
            ip = self.ip_derivative_target(n)
            npow = self.module.nabla_pow(n)
            cols = [npow.column(j) for j in range(E.dim)]
            vals = [[ip.of_elements(cols[i], cols[j]) for j in range(E.dim)] for i in range(E.dim)]
        self._iterated[n] = vals
        return vals


class SobolevGram:
    def __init__(self, module_name: str, state: State, order: int, matrix: Mat, certificate):
        self.module_name = module_name
        self.state = state
        self.order = order
        self.matrix = matrix
        self.certificate = certificate

    @property
    def is_positive(self) -> bool:
        return self.certificate.is_psd

    def strictly_positive(self) -> bool:
        return self.certificate.is_psd and self.certificate.strictly_positive()


def sobolev_gram(
    pairings: SobolevPairings,
    state: State,
    order: int,
    require_psd: bool = True,
) -> SobolevGram:
    """Gram matrix of the order-n Sobolev pairing, with an exact certificate."""
    E = pairings.module.space
    gram = Mat.zeros(E.dim, E.dim)
    for m in range(order + 1):
        vals = pairings.iterated(m)
        for i in range(E.dim):
            for j in range(E.dim):
                gram.data[i][j] = gram.data[i][j] + state(vals[i][j])
    cert = ldl_certify_psd(gram)
    if require_psd and not cert.is_psd:
        raise PositivityFailure(
            "sobolev-positivity",
            witness=[str(x) for x in cert.vector],
            detail=f"order {order}, state {state.name}",
        )
    return SobolevGram(pairings.module.name, state, order, gram, cert)


def gram_increment_certificate(pairings: SobolevPairings, state: State, order: int):
    """Certificate that Gram(order) - Gram(order-1) is PSD (it is the order-n term)."""
    E = pairings.module.space
    vals = pairings.iterated(order)
    inc = Mat.zeros(E.dim, E.dim)
    for i in range(E.dim):
        for j in range(E.dim):
            inc.data[i][j] = state(vals[i][j])
    return ldl_certify_psd(inc)
