"""Check results shared by validators and verification suites.

Every failed check carries a machine-replayable witness: basis indices plus
the coordinate data needed to re-evaluate the violated identity.
"""

from __future__ import annotations


class CheckResult:
    def __init__(self, name: str, ok: bool, witness=None, detail: str = ""):
        self.name = name
        self.ok = ok
        self.witness = witness
        self.detail = detail

    def __bool__(self):
        return self.ok

    def __repr__(self):
        status = "ok" if self.ok else "FAIL"
        extra = f" witness={self.witness}" if self.witness is not None else ""
        return f"<{self.name}: {status}{extra}>"

    def as_dict(self):
        d = {"name": self.name, "ok": self.ok}
        if self.detail:
            d["detail"] = self.detail
        if self.witness is not None:
            d["witness"] = _jsonable(self.witness)
        return d


def _jsonable(obj):
    from .scalars import Scalar

    if isinstance(obj, Scalar):
        return str(obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    return obj


class ValidationError(ValueError):
    """A named invariant failed during construction, with a concrete witness."""

    def __init__(self, name: str, witness=None, detail: str = ""):
        self.name = name
        self.witness = witness
        self.detail = detail
        msg = f"validation failed: {name}"
        if detail:
            msg += f" ({detail})"
        if witness is not None:
            msg += f" witness={witness}"
        super().__init__(msg)
