"""Bundle files: the serialized geometric input.

A bundle is a UTF-8 JSON document carrying structure constants for the
algebra, the 1-form bimodule, the differential, a dual basis, the right
connection with its generalised braiding (as plain-tensor representatives),
declared module connections, inner products and states.  Scalars are strings
like ``"3/2"`` or ``"1/2-1/3i"``; nothing is ever a float.

Loading validates every invariant before any computation and either returns a
fully assembled :class:`Bundle` or raises a named :class:`ValidationError`
with a machine-replayable witness.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .algebra import Algebra, State
from .bimodule import Bimodule
from .calculus import ConnectionModule, omega_module, trivial_module, vec_module
from .geometry import Geometry
from .linalg import Mat
from .report import ValidationError
from .scalars import ScalarParseError, sc
from .sobolev import InnerProduct, canonical_algebra_ip

FORMAT = "ncdiffop-bundle/1"


class ParseError(ValueError):
    pass


def _mat(rows, nrows: int, ncols: int, what: str) -> Mat:
    if len(rows) != nrows:
        raise ParseError(f"{what}: expected {nrows} rows, got {len(rows)}")
    data = []
    for r, row in enumerate(rows):
        if len(row) != ncols:
            raise ParseError(f"{what}: row {r} has {len(row)} entries, expected {ncols}")
        try:
            data.append([sc(x) for x in row])
        except ScalarParseError as err:
            raise ParseError(f"{what}: row {r}: {err}") from None
    return Mat(nrows, ncols, data)


def _mat_out(m: Mat) -> list[list[str]]:
    return [[str(x) for x in row] for row in m.data]


class Bundle:
    def __init__(
        self,
        name: str,
        field: str,
        truncation: int,
        algebra: Algebra,
        geometry: Geometry,
        modules: dict[str, ConnectionModule],
        inner_products: dict[str, InnerProduct],
        states: dict[str, State],
        box_plain: Mat,
        sigma_inv_plain: Mat,
        module_decls: dict,
        omega_basis: list,
        notes: str = "",
    ):
        self.name = name
        self.field = field
        self.truncation = truncation
        self.algebra = algebra
        self.geometry = geometry
        self.modules = modules
        self.inner_products = inner_products
        self.states = states
        self.box_plain = box_plain
        self.sigma_inv_plain = sigma_inv_plain
        self.module_decls = module_decls
        self.omega_basis = omega_basis
        self.notes = notes
        self._raw_functionals: list[Mat] = []

    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()

    def to_dict(self) -> dict:
        """Canonical serialization (normalized scalar strings)."""
        g = self.geometry
        A = self.algebra
        out = {
            "format": FORMAT,
            "name": self.name,
            "field": self.field,
            "truncation_degree": self.truncation,
            "notes": self.notes,
            "algebra": {
                "basis": list(A.basis_names),
                "mul": [[[str(x) for x in A.mul_tensor[i][j]] for j in range(A.dim)] for i in range(A.dim)],
                "unit": [str(x) for x in A.unit],
            },
            "omega": {
                "basis": list(self.omega_basis),
                "left": [_mat_out(m) for m in g.omega.left],
                "right": [_mat_out(m) for m in g.omega.right],
            },
            "d": _mat_out(g.d),
            "dual_basis": {
                "forms": [[str(x) for x in f] for f in g.fgp.basis_forms],
                "functionals": [_mat_out(m) for m in self._functional_mats],
            },
            "box": _mat_out(self.box_plain),
            "sigma_inv": _mat_out(self.sigma_inv_plain),
            "modules": {
                mname: {
                    "space": "omega",
                    "nabla": _mat_out(nabla),
                    "sigma": _mat_out(sigma),
                }
                for mname, (nabla, sigma) in sorted(self.module_decls.items())
            },
            "inner_products": {
                iname: (
                    "canonical"
                    if iname == "A"
                    else [[[str(x) for x in cell] for cell in row] for row in ip.values]
                )
                for iname, ip in sorted(self.inner_products.items())
            },
            "states": {name: [str(x) for x in s.functional] for name, s in sorted(self.states.items())},
        }
        if A.star is not None:
            out["algebra"]["star"] = _mat_out(A.star)
        return out

    @property
    def _functional_mats(self) -> list[Mat]:
        return self._raw_functionals

    def module_names(self) -> list[str]:
        return sorted(self.modules)


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def load_bundle_dict(doc: dict, validate: bool = True) -> Bundle:
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise ParseError(f"not a {FORMAT} document")
    name = doc.get("name", "bundle")
    field = doc.get("field", "Q")
    if field not in ("Q", "Q(i)"):
        raise ParseError(f"unknown field {field!r}")
    truncation = int(doc.get("truncation_degree", 3))
    notes = doc.get("notes", "")

    alg = doc["algebra"]
    names = list(alg["basis"])
    dA = len(names)
    try:
        mul = [[[sc(x) for x in alg["mul"][i][j]] for j in range(dA)] for i in range(dA)]
        unit = [sc(x) for x in alg["unit"]]
    except (ScalarParseError, IndexError, KeyError) as err:
        raise ParseError(f"algebra: {err}") from None
    star = _mat(alg["star"], dA, dA, "star") if "star" in alg else None
    algebra = Algebra(dA, mul, unit, star=star, basis_names=names)
    if field == "Q":
        _reject_imaginary(doc)
    if validate:
        for r in algebra.validate():
            if not r.ok:
                raise ValidationError(r.name, witness=r.witness)

    om = doc["omega"]
    dO = len(om["basis"])
    left = [_mat(m, dO, dO, f"omega.left[{i}]") for i, m in enumerate(om["left"])]
    right = [_mat(m, dO, dO, f"omega.right[{i}]") for i, m in enumerate(om["right"])]
    if len(left) != dA or len(right) != dA:
        raise ParseError("omega actions must list one matrix per algebra basis element")
    omega = Bimodule(algebra, dO, left, right, "omega1")

    d = _mat(doc["d"], dO, dA, "d")
    db = doc["dual_basis"]
    forms = [[sc(x) for x in f] for f in db["forms"]]
    functionals = [_mat(m, dA, dO, f"functional[{i}]") for i, m in enumerate(db["functionals"])]
    box_plain = _mat(doc["box"], dO * dO, dO, "box")
    sigma_inv_plain = _mat(doc["sigma_inv"], dO * dO, dO * dO, "sigma_inv")

    geometry = Geometry(
        algebra, omega, d, forms, functionals, box_plain, sigma_inv_plain, name=name, validate=validate
    )

    states: dict[str, State] = {}
    for sname, coords in sorted(doc.get("states", {}).items()):
        state = State([sc(x) for x in coords], sname)
        if validate and algebra.star is not None:
            report = {r.name: r for r in state.validate(algebra)}
            for check in ("state-unital", "state-hermitian", "state-positive"):
                if check in report and not report[check].ok:
                    raise ValidationError(check, witness=(sname, report[check].witness))
        states[sname] = state

    modules: dict[str, ConnectionModule] = {
        "A": trivial_module(geometry, "A", validate=validate),
        "vec": vec_module(geometry, "vec", validate=validate),
    }
    module_decls = {}
    for mname, decl in sorted(doc.get("modules", {}).items()):
        space = decl.get("space", "omega")
        if space != "omega":
            raise ParseError(f"module {mname}: only the 1-form space can be declared externally")
        nabla_plain = _mat(decl["nabla"], dO * dO, dO, f"{mname}.nabla")
        sigma_plain = _mat(decl["sigma"], dO * dO, dO * dO, f"{mname}.sigma")
        module_decls[mname] = (nabla_plain, sigma_plain)
        modules[mname] = omega_module(geometry, nabla_plain, sigma_plain, mname, validate=validate)

    inner_products: dict[str, InnerProduct] = {}
    state_list = list(states.values())
    for iname, spec in sorted(doc.get("inner_products", {}).items()):
        if iname == "A" and spec == "canonical":
            ip = canonical_algebra_ip(algebra, modules["A"].space)
        else:
            target = modules.get(iname)
            if target is None:
                raise ParseError(f"inner product for undeclared module {iname!r}")
            dim = target.space.dim
            if len(spec) != dim or any(len(row) != dim for row in spec):
                raise ParseError(f"inner product {iname}: wrong shape")
            ip = InnerProduct(target.space, spec, f"ip-{iname}")
        if validate:
            for r in ip.validate(state_list):
                if not r.ok:
                    raise ValidationError(r.name, witness=r.witness)
        inner_products[iname] = ip

    bundle = Bundle(
        name=name,
        field=field,
        truncation=truncation,
        algebra=algebra,
        geometry=geometry,
        modules=modules,
        inner_products=inner_products,
        states=states,
        box_plain=box_plain,
        sigma_inv_plain=sigma_inv_plain,
        module_decls=module_decls,
        omega_basis=list(om["basis"]),
        notes=notes,
    )
    bundle._raw_functionals = functionals
    return bundle


def _reject_imaginary(doc):
    def walk(x):
        if isinstance(x, str):
            try:
                val = sc(x)
            except ScalarParseError:
                return
            if not val.is_real():
                raise ParseError(f"field Q cannot carry the scalar {x!r}")
        elif isinstance(x, list):
            for y in x:
                walk(y)
        elif isinstance(x, dict):
            for y in x.values():
                walk(y)

    for key in ("algebra", "omega", "d", "dual_basis", "box", "sigma_inv", "modules", "inner_products", "states"):
        if key in doc:
            walk(doc[key])


def load_bundle(path, validate: bool = True) -> Bundle:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err}") from None
    return load_bundle_dict(doc, validate=validate)


BUILTIN_NAMES = ("two-point-universal", "z3-function-calculus", "zero-form-smoke")


def builtin_bundle_dict(name: str) -> dict:
    if name not in BUILTIN_NAMES:
        raise ParseError(f"unknown builtin bundle {name!r}; available: {', '.join(BUILTIN_NAMES)}")
    from importlib import resources

    ref = resources.files("ncdiffop").joinpath("bundles", f"{name}.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def load_builtin(name: str, validate: bool = True) -> Bundle:
    return load_bundle_dict(builtin_bundle_dict(name), validate=validate)


def resolve_bundle(spec: str, validate: bool = True) -> Bundle:
    """Accept either a path to a JSON file or a builtin bundle name."""
    if spec in BUILTIN_NAMES:
        return load_builtin(spec, validate=validate)
    return load_bundle(spec, validate=validate)
