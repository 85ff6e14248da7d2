"""
Loading and saving spec and system documents.

Output is byte-stable: tensors in a fixed order, entries sorted by index,
expressions pretty-printed from their folded form.
"""

import logging
from pathlib import Path

from pydantic import BaseModel, ValidationError

from algebroid import (
    AlgebroidError,
    AlgebroidSpec,
    BdcpSpec,
    CoeffTensor,
    HierarchyLevel,
)
from dynamics import CasimirFn, DynamicsError, EnergyLike, SystemDescriptor
from exprs import Expr, ExprSyntaxError, fold, parse, to_text

from .dtos import (
    ANTISYMMETRIC,
    CasimirEntry,
    Dims,
    Entry,
    SpecDocument,
    SystemDocument,
    tensor_shapes,
)

logger = logging.getLogger(__name__)


class SpecFormatError(Exception):
    """A spec or system file that cannot be turned into library objects."""

    def __init__(self, source: str, message: str, offset: int | None = None):
        self.source = source
        self.offset = offset
        super().__init__(f"{source}: {message}")


def _describe(error: ValidationError) -> str:
    parts = []
    for err in error.errors():
        path = ".".join(str(p) for p in err["loc"]) or "document"
        parts.append(f"{path}: {err['msg']}")
    return "; ".join(parts)


def _validate(model: type[BaseModel], text: str, source: str):
    try:
        return model.model_validate_json(text)
    except ValidationError as e:
        raise SpecFormatError(source, _describe(e)) from e


def _read(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SpecFormatError(str(path), f"cannot read file ({e.strerror or e})") from e


def _expr(text: str, where: str, source: str) -> Expr:
    try:
        return fold(parse(text))
    except ExprSyntaxError as e:
        raise SpecFormatError(source, f"{where}: {e}", offset=e.offset) from e


def _tensor(doc: SpecDocument, name: str, shape, source: str) -> CoeffTensor:
    entries = {}
    for position, entry in enumerate(doc.tensors.get(name, [])):
        index = tuple(i - 1 for i in entry.indices)
        entries[index] = _expr(entry.expr, f"tensors.{name}[{position}].expr", source)
    # Stored as written so a non-antisymmetric file reaches the skew check.
    return CoeffTensor.build(
        shape, entries, antisymmetric=name in ANTISYMMETRIC, canonical=False, name=name
    )


def spec_from_document(doc: SpecDocument, source: str = "<document>") -> AlgebroidSpec | BdcpSpec:
    """Build the library object a validated document describes."""
    tensors = {
        name: _tensor(doc, name, shape, source)
        for name, shape in tensor_shapes(doc.kind, doc.dims).items()
    }
    d = doc.dims
    try:
        if doc.kind == "algebroid":
            return AlgebroidSpec(d.n, d.k, tensors["anchor"], tensors["structure"])
        return BdcpSpec(d.n, d.p, d.q, **tensors)
    except AlgebroidError as e:
        raise SpecFormatError(source, str(e)) from e


def _entries(tensor: CoeffTensor) -> list[Entry]:
    return [
        Entry(indices=[i + 1 for i in index], expr=to_text(expr))
        for index, expr in tensor.items()
    ]


def document_of(
    spec: AlgebroidSpec | BdcpSpec, classification: HierarchyLevel | None = None
) -> SpecDocument:
    if isinstance(spec, BdcpSpec):
        kind, dims = "bdcp", Dims(n=spec.n, p=spec.p, q=spec.q)
        tensors = {
            "anchor_a": spec.anchor_a,
            "anchor_b": spec.anchor_b,
            **spec.blocks(),
        }
    else:
        kind, dims = "algebroid", Dims(n=spec.n, k=spec.k)
        tensors = {"anchor": spec.anchor, "structure": spec.structure}
    return SpecDocument(
        kind=kind,
        dims=dims,
        tensors={name: _entries(t) for name, t in tensors.items() if not t.is_zero},
        classification=classification,
    )


def _dump(model: BaseModel) -> str:
    return model.model_dump_json(indent=2, exclude_none=True) + "\n"


def load_spec(path: Path) -> AlgebroidSpec | BdcpSpec:
    """Read an algebroid or product from a spec file."""
    source = str(path)
    doc = _validate(SpecDocument, _read(path), source)
    spec = spec_from_document(doc, source)
    logger.debug("loaded %s document from %s", doc.kind, source)
    return spec


def load_classification(path: Path) -> HierarchyLevel | None:
    """The label a spec file carries, if any."""
    return _validate(SpecDocument, _read(path), str(path)).classification


def save_spec(
    value: AlgebroidSpec | BdcpSpec,
    path: Path,
    classification: HierarchyLevel | None = None,
) -> None:
    Path(path).write_text(_dump(document_of(value, classification)), encoding="utf-8")
    logger.debug("wrote %s", path)


def system_document(system: SystemDescriptor, method: str | None = None) -> SystemDocument:
    return SystemDocument(
        dynamics=system.kind,
        algebroid=document_of(system.spec),
        energy=system.energy.text,
        uses_z=system.energy.uses_z,
        casimirs=[CasimirEntry(name=c.name, expr=c.energy.text) for c in system.casimirs],
        method=method,
    )


def save_system(system: SystemDescriptor, path: Path, method: str | None = None) -> None:
    Path(path).write_text(_dump(system_document(system, method)), encoding="utf-8")
    logger.debug("wrote %s", path)


def load_system(path: Path) -> SystemDescriptor:
    source = str(path)
    doc = _validate(SystemDocument, _read(path), source)
    total = spec_from_document(doc.algebroid, source)
    n, k = total.n, total.k
    try:
        energy = EnergyLike(
            _expr(doc.energy, "energy", source), n, k, doc.uses_z,
            name="L" if doc.dynamics.is_lagrangian else "H",
        )
        casimirs = tuple(
            CasimirFn(c.name, EnergyLike(_expr(c.expr, f"casimirs.{c.name}", source), n, k, name=c.name))
            for c in doc.casimirs
        )
    except DynamicsError as e:
        raise SpecFormatError(source, str(e)) from e
    return SystemDescriptor(doc.dynamics, total, energy, casimirs)
