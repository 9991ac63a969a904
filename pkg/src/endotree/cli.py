"""Command-line client for the service handlers.

The CLI does no mathematics of its own: each subcommand assembles the
request model for the corresponding endpoint and dispatches it, in
process by default or against a running server with ``--server``.
Machine-readable payloads go to stdout (pretty-printed JSON with
``--json``), diagnostics to stderr.  Exit codes: 0 success, 1 domain
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import DomainError
from .service import handlers
from .service import models as m

_FIELD_SUBCOMMANDS = {"jordan", "conjugacy", "count", "fl", "oracle"}


def _add_field_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--q", type=int, default=None, help="residue field size (prime power)")
    parser.add_argument("--p", type=int, default=None, help="residue characteristic")
    parser.add_argument("--char", choices=("mixed", "equal"), default="mixed",
                        help="field kind: p-adic (mixed) or Laurent series (equal)")
    parser.add_argument("--precision", type=int, default=24, help="digits carried")
    parser.add_argument("--u", default=None, help="override the non-square unit (expression)")


def _field_model(args) -> m.FieldModel:
    kind = "equal_char" if args.char == "equal" else "mixed"
    return m.FieldModel(kind=kind, p=args.p, q=args.q, precision=args.precision, u=args.u)


def _datum_spec(value: str) -> m.DatumSpec:
    if value.endswith(".json") or os.path.exists(value):
        with open(value, encoding="utf-8") as fh:
            return m.DatumSpec(data=m.RootDatumModel(**json.load(fh)))
    return m.DatumSpec(name=value)


def _lattice_model(path: str) -> m.LatticeModel:
    with open(path, encoding="utf-8") as fh:
        return m.LatticeModel(**json.load(fh))


def _split_grid(text: str) -> list[list[str]]:
    stripped = text.strip()
    if not (stripped.startswith("[[") and stripped.endswith("]]")):
        raise DomainError("matrix grid must look like [[...],[...]]")
    return [row.split(",") for row in stripped[2:-2].split("],[")]


def _int_grid(text: str) -> list[list[int]]:
    try:
        return [[int(entry) for entry in row] for row in _split_grid(text)]
    except ValueError as exc:
        raise DomainError(f"matrix entries must be integers: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="endotree")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in process")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("endoscopy", help="enumerate endoscopic classes of a datum")
    sp.add_argument("--datum", required=True, help="built-in name or JSON file")
    sp.add_argument("--order-bound", type=int, default=4)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("h1", help="invariant factors of the lattice cohomology")
    sp.add_argument("--lattice", required=True, help="JSON lattice file")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("kappa", help="character induced on the cohomology")
    sp.add_argument("--lattice", required=True)
    sp.add_argument("--s", required=True, help="comma-separated rationals, e.g. 1/2 or 0,1/2")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("embed", help="Cartan embedding test for a twist matrix")
    sp.add_argument("--datum", required=True)
    sp.add_argument("--matrix", required=True, help="integer grid [[...],[...]]")
    sp.add_argument("--search-autos", action="store_true")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("jordan", help="topological Jordan decomposition")
    _add_field_flags(sp)
    sp.add_argument("--gamma", default=None, help="scalar expression")
    sp.add_argument("--matrix", default=None, help="expression grid")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("conjugacy", help="stable and rational conjugacy of two matrices")
    _add_field_flags(sp)
    sp.add_argument("--matrix", action="append", required=True,
                    help="expression grid; give the flag twice")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("count", help="fixed-vertex counts for the classes of an element")
    _add_field_flags(sp)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--bound", type=int, default=None, help="optional search-radius cap")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("fl", help="compare the two matching orbital sums")
    _add_field_flags(sp)
    sp.add_argument("--gamma", required=True, help="expression, or 'a_expr,b_expr'")
    sp.add_argument("--H", required=True, choices=("UE1", "Gm", "G"))
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("oracle", help="brute-force recount for cross-checking")
    _add_field_flags(sp)
    sp.add_argument("--matrix", default=None)
    sp.add_argument("--gamma", default=None)
    sp.add_argument("--bound", type=int, default=None)
    sp.add_argument("--seed", type=int, default=20240801)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)

    return parser


def _build_request(args):
    cmd = args.command
    if cmd == "endoscopy":
        return m.EndoscopyRequest(datum=_datum_spec(args.datum), order_bound=args.order_bound)
    if cmd == "h1":
        return m.H1Request(lattice=_lattice_model(args.lattice))
    if cmd == "kappa":
        return m.KappaRequest(lattice=_lattice_model(args.lattice), s=args.s.split(","))
    if cmd == "embed":
        return m.EmbedRequest(datum=_datum_spec(args.datum), theta=_int_grid(args.matrix),
                              search_automorphisms=args.search_autos)
    if cmd == "jordan":
        matrix = _split_grid(args.matrix) if args.matrix else None
        return m.JordanRequest(field=_field_model(args), x=args.gamma, matrix=matrix)
    if cmd == "conjugacy":
        if len(args.matrix) != 2:
            raise DomainError("conjugacy needs --matrix given exactly twice")
        return m.ConjugacyRequest(field=_field_model(args),
                                  first=_split_grid(args.matrix[0]),
                                  second=_split_grid(args.matrix[1]))
    if cmd == "count":
        return m.CountRequest(field=_field_model(args), matrix=_split_grid(args.matrix),
                              max_radius=args.bound)
    if cmd == "fl":
        return m.FlRequest(field=_field_model(args), h=args.H, gamma=args.gamma)
    if cmd == "oracle":
        matrix = _split_grid(args.matrix) if args.matrix else None
        return m.OracleRequest(field=_field_model(args), matrix=matrix, gamma=args.gamma,
                               bound=args.bound, seed=args.seed)
    raise DomainError(f"unknown subcommand {cmd!r}")


def _dispatch(args, request) -> dict:
    if args.server:
        import httpx

        url = args.server.rstrip("/") + f"/api/v1/{args.command}"
        reply = httpx.post(url, json=request.model_dump(), timeout=300.0)
        if reply.status_code != 200:
            detail = reply.json().get("detail", reply.text)
            raise DomainError(f"server rejected the request: {detail}")
        return reply.json()
    _, handler = handlers.HANDLERS[args.command]
    return handler(request).model_dump(by_alias=True)


def _render(command: str, doc: dict) -> str:
    if command == "endoscopy":
        lines = [f"{doc['datum']}: {doc['count']} classes (order bound {doc['order_bound']})"]
        for i, c in enumerate(doc["classes"]):
            label = c["label"] or "-"
            lines.append(
                f"  [{i}] {label} roots_H={c['roots_H']} twist_H={c['twist_H']} "
                f"s={c['s']} elliptic={c['elliptic']}"
            )
        return "\n".join(lines)
    if command == "h1":
        return f"invariant_factors: {doc['invariant_factors']} generators: {doc['generators']}"
    if command == "kappa":
        rows = [f"  kappa(gen {e['generator']}, order {e['order']}) = e(2*pi*i * {e['rotation']})"
                for e in doc["entries"]]
        return "\n".join(["character table:"] + rows) if rows else "character table: trivial group"
    if command == "embed":
        return f"embeds: {doc['embeds']}"
    if command == "jordan":
        return json.dumps({"x_s": doc["x_s"], "x_u": doc["x_u"]})
    if command == "conjugacy":
        return f"stable: {doc['stable']} rational: {doc['rational']}"
    if command == "count":
        lines = [f"centralizer: {doc['centralizer']} d: {doc['d']}"]
        lines += [f"  kappa={c['kappa']:+d} fixed_count={c['fixed_count']}" for c in doc["classes"]]
        return "\n".join(lines)
    if command == "fl":
        lhs = doc["lhs"]["value"]
        rhs = doc["rhs"]
        return (
            f"lhs = {lhs['mantissa']} * q^({lhs['q_half_exponent']}/2)  "
            f"rhs = {rhs['mantissa']} * q^({rhs['q_half_exponent']}/2)  "
            f"equal = {doc['equal']}"
        )
    if command == "oracle":
        lines = [f"bound: {doc['bound']} matches_search: {doc['matches_search']}"]
        lines += [
            f"  kappa={c['kappa']:+d} oracle={c['oracle_count']} search={c['search_count']}"
            for c in doc["classes"]
        ]
        if doc.get("conjugation_spot_check") is not None:
            lines.append(f"conjugation_spot_check: {doc['conjugation_spot_check']}")
        return "\n".join(lines)
    return json.dumps(doc)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0
    try:
        request = _build_request(args)
        doc = _dispatch(args, request)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if getattr(args, "json", False):
        print(json.dumps(doc, indent=2))
    else:
        print(_render(args.command, doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
