"""
Pydantic DTOs for the JSON spec and system files.

Documents carry 1-based indices and expression strings exactly as a person
would write them. Converting to the numeric library types happens in
``spec_files``, where expression parse errors can be reported with offsets.
"""

from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from algebroid import BdcpSpec, HierarchyLevel
from dynamics import SystemKind

FORMAT_VERSION = "1"

ANTISYMMETRIC = frozenset({"structure", "phi", "zeta", "psi", "theta"})


class Entry(BaseModel):
    """One nonzero coefficient."""

    model_config = ConfigDict(extra="forbid")

    indices: list[int] = Field(description="1-based index tuple, e.g. [1, 2, 3] for C^3_{12}")
    expr: str = Field(description="Coefficient expression in x1..xn")

    @field_validator("expr", mode="before")
    @classmethod
    def stringify_number(cls, v: str | int | float) -> str:
        """Accept bare JSON numbers for constant coefficients."""
        if isinstance(v, bool):
            raise ValueError("expected an expression string or a number")
        if isinstance(v, (int, float)):
            return repr(v)
        return v


class Dims(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=0, description="Base dimension")
    k: int | None = Field(default=None, ge=1, description="Fiber rank (algebroid documents)")
    p: int | None = Field(default=None, ge=0, description="Rank of the first block (bdcp documents)")
    q: int | None = Field(default=None, ge=0, description="Rank of the second block (bdcp documents)")


def tensor_shapes(kind: str, dims: Dims) -> dict[str, tuple[int, ...]]:
    """Shapes of the tensors a document of ``kind`` may list, in emission order."""
    if kind == "algebroid":
        return {"anchor": (dims.k, dims.n), "structure": (dims.k,) * 3}
    return BdcpSpec.shapes(dims.n, dims.p, dims.q)


class SpecDocument(BaseModel):
    """
    A version-tagged algebroid or two-block product.

    Omitted entries are zero. Tensors are keyed by name: ``anchor`` and
    ``structure`` for algebroids, ``anchor_a``, ``anchor_b`` and the six
    blocks for products.
    """

    model_config = ConfigDict(extra="forbid")

    format_version: Literal["1"] = Field(default=FORMAT_VERSION, description="File format version")
    kind: Literal["algebroid", "bdcp"] = Field(description="Document kind")
    dims: Dims
    tensors: dict[str, list[Entry]] = Field(default_factory=dict)
    classification: HierarchyLevel | None = Field(
        default=None, description="Hierarchy label, written by decompose"
    )

    @model_validator(mode="after")
    def validate_entries(self) -> Self:
        """Dimensions match the kind; every entry is in range and listed once."""
        d = self.dims
        if self.kind == "algebroid":
            if d.k is None or d.p is not None or d.q is not None:
                raise ValueError("dims: an algebroid document needs n and k only")
        else:
            if d.p is None or d.q is None or d.k is not None:
                raise ValueError("dims: a bdcp document needs n, p and q only")
            if d.p + d.q < 1:
                raise ValueError("dims: p + q must be at least 1")

        shapes = tensor_shapes(self.kind, d)
        for name, entries in self.tensors.items():
            if name not in shapes:
                raise ValueError(
                    f"tensors.{name}: unknown tensor for a {self.kind} document "
                    f"(expected one of {', '.join(shapes)})"
                )
            shape = shapes[name]
            seen: set[tuple[int, ...]] = set()
            for position, entry in enumerate(entries):
                where = f"tensors.{name}[{position}]"
                index = tuple(entry.indices)
                if len(index) != len(shape):
                    raise ValueError(f"{where}: expected {len(shape)} indices, got {len(index)}")
                for i, (value, size) in enumerate(zip(index, shape)):
                    if not 1 <= value <= size:
                        raise ValueError(
                            f"{where}: index {i + 1} is {value}, outside 1..{size}"
                        )
                if index in seen:
                    raise ValueError(f"{where}: duplicate indices {list(index)}")
                seen.add(index)
        return self


class CasimirEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    expr: str


class SystemDocument(BaseModel):
    """What a simulation ran, so its trajectory can be re-checked later."""

    model_config = ConfigDict(extra="forbid")

    format_version: Literal["1"] = Field(default=FORMAT_VERSION, description="File format version")
    dynamics: SystemKind = Field(description="Equations that were integrated")
    algebroid: SpecDocument = Field(description="Total algebroid the equations were written on")
    energy: str = Field(description="Hamiltonian or Lagrangian expression")
    uses_z: bool = Field(default=False, description="Whether the energy may depend on z")
    casimirs: list[CasimirEntry] = Field(default_factory=list)
    method: str | None = Field(default=None, description="Integrator used, for reference")

    @field_validator("algebroid")
    @classmethod
    def total_only(cls, v: SpecDocument) -> SpecDocument:
        if v.kind != "algebroid":
            raise ValueError("system files embed the assembled algebroid, not a product")
        return v

    @model_validator(mode="after")
    def unique_casimirs(self) -> Self:
        names = [c.name for c in self.casimirs]
        if len(names) != len(set(names)):
            raise ValueError("casimirs: names must be unique")
        return self
