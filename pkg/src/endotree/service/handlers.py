"""One handler per pipeline: request model in, response model out.

Handlers raise :class:`DomainError` on bad inputs; the HTTP layer maps
that to a 400 and the command-line client to exit code 1.
"""

from __future__ import annotations

from .. import __version__, building_orbital as bo, oracles
from ..endoscopy import TorsionCharacter, describe_class, enumerate_endoscopic, is_elliptic
from ..errors import DomainError
from ..local_field import eval_expr, jordan_decompose, parse_quadext
from ..tori_cohomology import embeds_as_cartan, h1, kappa_character
from . import models as m


def handle_endoscopy(req: m.EndoscopyRequest) -> m.EndoscopyResponse:
    datum = req.datum.resolve()
    classes = enumerate_endoscopic(datum, order_bound=req.order_bound)
    items = [
        m.EndoscopicClassModel(
            s=e.s.to_strings(),
            w=[list(r) for r in e.w],
            roots_H=[list(v) for v in e.roots_H],
            coroots_H=[list(v) for v in e.coroots_H],
            twist_H=[list(r) for r in e.twist_H],
            elliptic=is_elliptic(e, datum),
            label=describe_class(e),
        )
        for e in classes
    ]
    return m.EndoscopyResponse(
        datum=datum.name or "custom",
        order_bound=req.order_bound,
        count=len(items),
        classes=items,
    )


def handle_h1(req: m.H1Request) -> m.H1Response:
    lattice = req.lattice.to_lattice()
    group = h1(lattice)
    return m.H1Response(
        rank=lattice.rank,
        invariant_factors=list(group.invariant_factors),
        generators=[list(v) for v in group.generator_reps],
    )


def handle_kappa(req: m.KappaRequest) -> m.KappaResponse:
    lattice = req.lattice.to_lattice()
    s = TorsionCharacter.from_strings(req.s)
    table = kappa_character(s, lattice)
    return m.KappaResponse(
        invariant_factors=[e.order for e in table],
        entries=[
            m.KappaEntryModel(
                generator=list(e.generator),
                order=e.order,
                rotation=f"{e.rotation.numerator}/{e.rotation.denominator}",
            )
            for e in table
        ],
    )


def handle_embed(req: m.EmbedRequest) -> m.EmbedResponse:
    datum = req.datum.resolve()
    theta = tuple(tuple(row) for row in req.theta)
    return m.EmbedResponse(
        embeds=embeds_as_cartan(theta, datum, search_automorphisms=req.search_automorphisms),
        searched_automorphisms=req.search_automorphisms,
    )


def _parse_grid(rows: list[list[str]], field):
    matrix = tuple(tuple(eval_expr(entry, field) for entry in row) for row in rows)
    if len(matrix) != 2 or any(len(r) != 2 for r in matrix):
        raise DomainError("expected a two-by-two matrix of expressions")
    return matrix


def handle_jordan(req: m.JordanRequest) -> m.JordanResponse:
    field = req.field.resolve()
    if (req.x is None) == (req.matrix is None):
        raise DomainError("give exactly one of a scalar expression or a matrix grid")
    if req.x is not None:
        x_s, x_u = jordan_decompose(eval_expr(req.x, field), field)
        return m.JordanResponse(kind="scalar", x_s=x_s.to_json(), x_u=x_u.to_json())
    x_s, x_u = jordan_decompose(_parse_grid(req.matrix, field), field)
    return m.JordanResponse(
        kind="matrix",
        x_s=[[e.to_json() for e in row] for row in x_s],
        x_u=[[e.to_json() for e in row] for row in x_u],
    )


def handle_conjugacy(req: m.ConjugacyRequest) -> m.ConjugacyResponse:
    field = req.field.resolve()
    g1 = bo.RegularElement(_parse_grid(req.first, field), field)
    g2 = bo.RegularElement(_parse_grid(req.second, field), field)
    stable = bo.are_stably_conjugate(g1, g2)
    rational = bo.are_conjugate(g1, g2) if stable else False
    return m.ConjugacyResponse(stable=stable, rational=rational)


def _class_model(c: bo.ClassCount) -> m.ClassCountModel:
    return m.ClassCountModel(
        matrix=[[e.to_json() for e in row] for row in c.element.matrix],
        kappa=c.kappa,
        fixed_count=c.fixed_count,
        search_radius=c.search_radius,
    )


def handle_count(req: m.CountRequest) -> m.CountResponse:
    field = req.field.resolve()
    g = bo.RegularElement(_parse_grid(req.matrix, field), field)
    kind = bo.classify_centralizer(g)
    if kind == "ramified_elliptic":
        # no endoscopic class structure here; report the element's own count
        if bo._is_noncompact(g):
            count, radius = 0, 0
        else:
            count, radius = bo.count_fixed_elliptic(g.matrix, field, max_radius=req.max_radius)
        classes = [m.ClassCountModel(
            matrix=[[e.to_json() for e in row] for row in g.matrix],
            kappa=1, fixed_count=count, search_radius=radius,
        )]
        return m.CountResponse(centralizer=kind, d=None, classes=classes)
    report = bo.kappa_orbital(g, max_radius=req.max_radius)
    return m.CountResponse(
        centralizer=kind,
        d=report.d,
        classes=[_class_model(c) for c in report.classes],
    )


def _value_model(v: bo.ExactQ) -> m.ValueModel:
    doc = v.to_json()
    return m.ValueModel(mantissa=doc["mantissa"], q_half_exponent=doc["q_half_exponent"])


def handle_fl(req: m.FlRequest) -> m.FlResponse:
    field = req.field.resolve()
    gamma = parse_quadext(req.gamma, field)
    result = bo.fl_check(gamma, req.h, field)
    return m.FlResponse(
        h=req.h,
        lhs=m.OrbitalReportModel(
            classes=[_class_model(c) for c in result.lhs.classes],
            d=result.lhs.d,
            value=_value_model(result.lhs.value),
        ),
        rhs=_value_model(result.rhs),
        equal=result.equal,
    )


def handle_oracle(req: m.OracleRequest) -> m.OracleResponse:
    field = req.field.resolve()
    if (req.matrix is None) == (req.gamma is None):
        raise DomainError("give exactly one of a matrix grid or a gamma expression")
    if req.matrix is not None:
        g = bo.RegularElement(_parse_grid(req.matrix, field), field)
    else:
        g = bo._matched_regular(parse_quadext(req.gamma, field), field)
    report = oracles.oracle_class_counts(g, bound=req.bound)
    spot = None
    if bo.classify_centralizer(g) == "unramified_elliptic" and not bo._is_noncompact(g):
        spot = oracles.conjugation_spot_check(g, seed=req.seed, trials=1)
    return m.OracleResponse(
        bound=report["bound"],
        d=report["d"],
        classes=[m.OracleClassModel(**entry) for entry in report["classes"]],
        matches_search=report["matches_search"],
        conjugation_spot_check=spot,
    )


def handle_health() -> m.HealthResponse:
    return m.HealthResponse(version=__version__)


HANDLERS = {
    "endoscopy": (m.EndoscopyRequest, handle_endoscopy),
    "h1": (m.H1Request, handle_h1),
    "kappa": (m.KappaRequest, handle_kappa),
    "embed": (m.EmbedRequest, handle_embed),
    "jordan": (m.JordanRequest, handle_jordan),
    "conjugacy": (m.ConjugacyRequest, handle_conjugacy),
    "count": (m.CountRequest, handle_count),
    "fl": (m.FlRequest, handle_fl),
    "oracle": (m.OracleRequest, handle_oracle),
}
