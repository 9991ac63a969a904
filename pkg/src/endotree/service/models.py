"""Pydantic request and response models for every pipeline.

All numeric payload data is exact: rationals travel as "num/den" strings,
field elements as {"val", "digits"} documents, matrices as integer arrays.
Each response carries its schema tag under the top-level "schema" key.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..errors import DomainError
from ..local_field import LocalField
from ..root_datum import RootDatum, datum_by_name
from ..tori_cohomology import GaloisLattice


class RootDatumModel(BaseModel):
    rank: int
    roots: list[list[int]]
    coroots: list[list[int]]
    twist: list[list[int]]
    name: Optional[str] = None

    def to_datum(self) -> RootDatum:
        return RootDatum.from_dict(self.model_dump())


class DatumSpec(BaseModel):
    """Either a built-in name (sl2, pgl2, gl<n>, u<n>) or inline data."""

    name: Optional[str] = None
    data: Optional[RootDatumModel] = None

    def resolve(self) -> RootDatum:
        if (self.name is None) == (self.data is None):
            raise DomainError("give exactly one of a datum name or inline datum data")
        if self.name is not None:
            return datum_by_name(self.name)
        return self.data.to_datum()


class LatticeModel(BaseModel):
    rank: int
    generators: list[list[list[int]]]

    def to_lattice(self) -> GaloisLattice:
        return GaloisLattice.from_dict(self.model_dump())


def _factor_prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            f = 0
            while q % p == 0:
                q //= p
                f += 1
            if q != 1:
                raise DomainError("q must be a prime power")
            return p, f
    raise DomainError("q must be a prime power")


class FieldModel(BaseModel):
    kind: Literal["mixed", "equal_char"] = "mixed"
    p: Optional[int] = None
    q: Optional[int] = None
    precision: int = 24
    u: Optional[str] = None

    def resolve(self) -> LocalField:
        p, f = self.p, 1
        if p is None and self.q is None:
            raise DomainError("a field needs p or q")
        if self.q is not None:
            qp, qf = _factor_prime_power(self.q)
            if p is not None and p != qp:
                raise DomainError(f"p={p} conflicts with q={self.q}")
            p, f = qp, qf
        if self.kind == "mixed" and f != 1:
            raise DomainError("mixed-characteristic fields need q = p")
        return LocalField(p, f=f, kind=self.kind, precision=self.precision, u_expr=self.u)


# -- requests -------------------------------------------------------------------

class EndoscopyRequest(BaseModel):
    datum: DatumSpec
    order_bound: int = 4


class H1Request(BaseModel):
    lattice: LatticeModel


class KappaRequest(BaseModel):
    lattice: LatticeModel
    s: list[str]


class EmbedRequest(BaseModel):
    datum: DatumSpec
    theta: list[list[int]]
    search_automorphisms: bool = False


class JordanRequest(BaseModel):
    field: FieldModel
    x: Optional[str] = None
    matrix: Optional[list[list[str]]] = None


class ConjugacyRequest(BaseModel):
    field: FieldModel
    first: list[list[str]]
    second: list[list[str]]


class CountRequest(BaseModel):
    field: FieldModel
    matrix: list[list[str]]
    max_radius: Optional[int] = None


class FlRequest(BaseModel):
    field: FieldModel
    h: str = Field(description="UE1, Gm, or G")
    gamma: str = Field(description="element expression; 'a_expr,b_expr' for extension elements")


class OracleRequest(BaseModel):
    field: FieldModel
    matrix: Optional[list[list[str]]] = None
    gamma: Optional[str] = None
    bound: Optional[int] = None
    seed: int = 20240801


# -- responses ------------------------------------------------------------------

class Envelope(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_id: str = Field(alias="schema")
    status: Literal["ok"] = "ok"


class EndoscopicClassModel(BaseModel):
    s: list[str]
    w: list[list[int]]
    roots_H: list[list[int]]
    coroots_H: list[list[int]]
    twist_H: list[list[int]]
    elliptic: bool
    label: Optional[str] = None


class EndoscopyResponse(Envelope):
    schema_id: str = Field(default="endotree.endoscopy.v1", alias="schema")
    datum: str
    order_bound: int
    count: int
    classes: list[EndoscopicClassModel]


class H1Response(Envelope):
    schema_id: str = Field(default="endotree.h1.v1", alias="schema")
    rank: int
    invariant_factors: list[int]
    generators: list[list[int]]


class KappaEntryModel(BaseModel):
    generator: list[int]
    order: int
    rotation: str


class KappaResponse(Envelope):
    schema_id: str = Field(default="endotree.kappa.v1", alias="schema")
    invariant_factors: list[int]
    entries: list[KappaEntryModel]


class EmbedResponse(Envelope):
    schema_id: str = Field(default="endotree.embed.v1", alias="schema")
    embeds: bool
    searched_automorphisms: bool


class JordanResponse(Envelope):
    schema_id: str = Field(default="endotree.jordan.v1", alias="schema")
    kind: Literal["scalar", "matrix"]
    x_s: Any
    x_u: Any


class ConjugacyResponse(Envelope):
    schema_id: str = Field(default="endotree.conjugacy.v1", alias="schema")
    stable: bool
    rational: bool


class ClassCountModel(BaseModel):
    matrix: list[list[Any]]
    kappa: int
    fixed_count: int
    search_radius: int


class CountResponse(Envelope):
    schema_id: str = Field(default="endotree.count.v1", alias="schema")
    centralizer: str
    d: Optional[int] = None
    classes: list[ClassCountModel]


class ValueModel(BaseModel):
    mantissa: str
    q_half_exponent: int


class OrbitalReportModel(BaseModel):
    classes: list[ClassCountModel]
    d: int
    value: ValueModel


class FlResponse(Envelope):
    schema_id: str = Field(default="endotree.fl.v1", alias="schema")
    h: str
    lhs: OrbitalReportModel
    rhs: ValueModel
    equal: bool


class OracleClassModel(BaseModel):
    kappa: int
    oracle_count: int
    search_count: int


class OracleResponse(Envelope):
    schema_id: str = Field(default="endotree.oracle.v1", alias="schema")
    bound: int
    d: int
    classes: list[OracleClassModel]
    matches_search: bool
    conjugation_spot_check: Optional[bool] = None


class HealthResponse(Envelope):
    schema_id: str = Field(default="endotree.health.v1", alias="schema")
    version: str
