"""Command-line interface: config ingestion, dispatch, table emission.

Configs are JSON: a Toeplitz order N, an optional scalar degree cap, the
generator families with their distributions, and named variables whose N
entries are expression strings over the generators. Commands emit JSON
(default) or CSV tables with exact rational values; output is
deterministic byte-for-byte for identical inputs.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3
mathematical domain error (zero trace, degree cap exceeded, ...). Every
failure prints a single machine-parsable line ``error: <slug>: <message>``
on the error stream.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import nc_lattice
from .errors import (
    ConfigError,
    DegreeCapExceeded,
    DimensionMismatch,
    EngineError,
    InternalConsistencyError,
    MathDomainError,
)
from .ncpoly import (
    ExpressionError,
    format_rational,
    parse_expr,
    parse_rational,
)
from .scalar_space import DEFAULT_DEGREE, MAX_DEGREE, MomentFunctional, build_space
from .series import (
    all_index_words,
    boxed_convolution,
    check_even,
    check_freeness,
    compress_r_transform,
    free_family_sparsity,
    moment_series,
    r_transform,
)
from .toeplitz_core import TVariable

NC_LIST_CAP = nc_lattice.DEFAULT_DEGREE_CAP
NC_MOBIUS_CAP = 7

ENV_DEGREE_CAP = "TOEPFREE_DEGREE_CAP"

_TABLE_HEADER = ("query", "word", "entry", "value")


class UsageError(EngineError):
    """A bad command line: unknown names, malformed flags, shape misuse."""


class _ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage problems through UsageError."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _slug(exc: BaseException) -> str:
    name = type(exc).__name__
    if name.endswith("Error") and name != "Error":
        name = name[: -len("Error")]
    return re.sub(r"(?<!^)(?=[A-Z])", "-", name).lower()


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Config:
    """A validated run configuration."""

    order: int
    degree_cap: int
    functional: MomentFunctional
    variables: dict[str, TVariable]


def _pointer(*parts: object) -> str:
    return "/" + "/".join(str(p) for p in parts)


def _config_fail(pointer: str, message: str) -> ConfigError:
    return ConfigError(f"at {pointer}: {message}")


def _want_int(value: object, pointer: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _config_fail(pointer, f"expected an integer, got {value!r}")
    if value < minimum:
        raise _config_fail(pointer, f"expected an integer >= {minimum}, got {value}")
    return value


def _want_str(value: object, pointer: str) -> str:
    if not isinstance(value, str) or not value:
        raise _config_fail(pointer, f"expected a nonempty string, got {value!r}")
    return value


def _want_list(value: object, pointer: str) -> list[object]:
    if not isinstance(value, list):
        raise _config_fail(pointer, f"expected a list, got {type(value).__name__}")
    return value


def _want_obj(value: object, pointer: str) -> dict[str, object]:
    if not isinstance(value, dict):
        raise _config_fail(pointer, f"expected an object, got {type(value).__name__}")
    return value


def _want_rational(value: object, pointer: str) -> object:
    """Distribution parameters must be exact: integers or 'p/q' strings."""
    if isinstance(value, bool):
        raise _config_fail(pointer, "expected an exact rational, got a boolean")
    if isinstance(value, float):
        raise _config_fail(
            pointer, "floating-point values are not accepted; use 'p/q' strings"
        )
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            parse_rational(value)
        except (ValueError, ExpressionError) as exc:
            raise _config_fail(pointer, str(exc)) from None
        return value
    raise _config_fail(pointer, f"expected an exact rational, got {value!r}")


def _default_degree_cap() -> int:
    raw = os.environ.get(ENV_DEGREE_CAP)
    if raw is None:
        return DEFAULT_DEGREE
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(
            f"{ENV_DEGREE_CAP} must be an integer, got {raw!r}"
        ) from None
    if not 1 <= cap <= MAX_DEGREE:
        raise ConfigError(
            f"{ENV_DEGREE_CAP} must be in 1..{MAX_DEGREE}, got {cap}"
        )
    return cap


def _parse_distribution(
    dist: dict[str, object], pointer: str
) -> dict[str, object]:
    kind = _want_str(dist.get("kind"), _pointer(pointer, "kind"))
    out: dict[str, object] = {"kind": kind}
    for key, value in dist.items():
        if key in ("kind",):
            continue
        if key == "cumulants":
            table = _want_obj(value, _pointer(pointer, key))
            parsed: dict[tuple[str, ...], object] = {}
            for raw_key, raw_val in table.items():
                ids = tuple(part.strip() for part in raw_key.split(","))
                if not all(ids):
                    raise _config_fail(
                        _pointer(pointer, key, raw_key),
                        "expected comma-separated generator ids",
                    )
                parsed[ids] = _want_rational(
                    raw_val, _pointer(pointer, key, raw_key)
                )
            out[key] = parsed
        else:
            out[key] = _want_rational(value, _pointer(pointer, key))
    return out


def load_config(path: str) -> Config:
    """Read, validate, and assemble a Config; every expression is parsed
    eagerly so malformed configs fail before any computation starts."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        root = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    top = _want_obj(root, "/")

    known = {"N", "degree_cap", "families", "variables"}
    for key in top:
        if key not in known:
            raise _config_fail(_pointer(key), "unknown configuration key")

    order = _want_int(top.get("N"), _pointer("N"))
    if "degree_cap" in top:
        degree_cap = _want_int(top.get("degree_cap"), _pointer("degree_cap"))
    else:
        degree_cap = _default_degree_cap()
    if degree_cap > MAX_DEGREE:
        raise _config_fail(
            _pointer("degree_cap"), f"must be at most {MAX_DEGREE}"
        )

    family_tables: dict[str, dict[str, dict[str, object]]] = {}
    gen_ids: list[str] = []
    families = _want_list(top.get("families"), _pointer("families"))
    for f_at, raw_family in enumerate(families):
        f_ptr = _pointer("families", f_at)
        family = _want_obj(raw_family, f_ptr)
        name = _want_str(family.get("name"), _pointer("families", f_at, "name"))
        if name in family_tables:
            raise _config_fail(
                _pointer("families", f_at, "name"), f"duplicate family {name!r}"
            )
        table: dict[str, dict[str, object]] = {}
        generators = _want_list(
            family.get("generators"), _pointer("families", f_at, "generators")
        )
        for g_at, raw_gen in enumerate(generators):
            g_ptr = _pointer("families", f_at, "generators", g_at)
            gen = _want_obj(raw_gen, g_ptr)
            gen_id = _want_str(gen.get("id"), _pointer(g_ptr, "id"))
            if gen_id in gen_ids:
                raise _config_fail(
                    _pointer(g_ptr, "id"), f"duplicate generator id {gen_id!r}"
                )
            gen_ids.append(gen_id)
            dist = _want_obj(
                gen.get("distribution"), _pointer(g_ptr, "distribution")
            )
            table[gen_id] = _parse_distribution(
                dist, _pointer(g_ptr, "distribution")
            )
        family_tables[name] = table

    try:
        functional = build_space(family_tables, degree_cap)
    except ValueError as exc:
        raise ConfigError(f"in families: {exc}") from None

    variables: dict[str, TVariable] = {}
    raw_vars = _want_list(top.get("variables"), _pointer("variables"))
    for v_at, raw_var in enumerate(raw_vars):
        v_ptr = _pointer("variables", v_at)
        var = _want_obj(raw_var, v_ptr)
        name = _want_str(var.get("name"), _pointer(v_ptr, "name"))
        if any(ch.isspace() for ch in name) or "," in name:
            raise _config_fail(
                _pointer(v_ptr, "name"),
                f"variable name {name!r} may not contain spaces or commas",
            )
        if name in variables:
            raise _config_fail(
                _pointer(v_ptr, "name"), f"duplicate variable {name!r}"
            )
        entries = _want_list(var.get("entries"), _pointer(v_ptr, "entries"))
        if len(entries) != order:
            raise _config_fail(
                _pointer(v_ptr, "entries"),
                f"expected exactly N={order} entries, got {len(entries)}",
            )
        polys = []
        for e_at, raw_entry in enumerate(entries):
            e_ptr = _pointer(v_ptr, "entries", e_at)
            source = _want_str(raw_entry, e_ptr)
            try:
                polys.append(parse_expr(source, gen_ids))
            except ExpressionError as exc:
                raise _config_fail(
                    e_ptr, f"{exc} (column {exc.position + 1})"
                ) from None
        variables[name] = TVariable.of(polys)

    return Config(order, degree_cap, functional, variables)


# --------------------------------------------------------------------------
# emission
# --------------------------------------------------------------------------

Row = tuple[str, str, int, str]


@dataclass(frozen=True)
class Emission:
    """One command's result: a JSON payload plus flat 4-column rows."""

    payload: object
    rows: list[Row]


def _compact(obj: object) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _series_rows(query: str, series_obj: Mapping[str, object]) -> list[Row]:
    rows: list[Row] = []
    for item in series_obj["coefficients"]:  # type: ignore[index]
        word = _compact(item["word"])  # type: ignore[index]
        for at, value in enumerate(item["value"], start=1):  # type: ignore[index]
            rows.append((query, word, at, value))
    return rows


def _emit(args: argparse.Namespace, emission: Emission) -> None:
    if args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(_TABLE_HEADER)
        writer.writerows(emission.rows)
        text = buffer.getvalue()
    else:
        text = json.dumps(emission.payload, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# command handlers
# --------------------------------------------------------------------------


def _resolve_vars(config: Config, spec: str, flag: str) -> list[TVariable]:
    names = [part.strip() for part in spec.split(",")]
    if not all(names):
        raise UsageError(f"{flag} expects comma-separated variable names")
    missing = [name for name in names if name not in config.variables]
    if missing:
        raise UsageError(
            f"unknown variable {missing[0]!r}; config declares "
            f"{', '.join(sorted(config.variables))}"
        )
    return [config.variables[name] for name in names]


def _require_positive_n(n: int) -> None:
    if n < 1:
        raise UsageError(f"--n must be positive, got {n}")


def _cmd_nc_list(args: argparse.Namespace) -> Emission:
    _require_positive_n(args.n)
    partitions = nc_lattice.enumerate_nc(args.n, NC_LIST_CAP)
    rows: list[Row] = []
    out_rows = []
    for at, pi in enumerate(partitions, start=1):
        blocks = pi.to_json_obj()
        out_rows.append({"word": blocks, "entry": at, "value": len(pi.blocks)})
        rows.append(("nc-list", _compact(blocks), at, str(len(pi.blocks))))
    payload = {
        "query": "nc-list",
        "n": args.n,
        "count": len(partitions),
        "rows": out_rows,
    }
    return Emission(payload, rows)


def _cmd_nc_mobius(args: argparse.Namespace) -> Emission:
    _require_positive_n(args.n)
    if args.n > NC_MOBIUS_CAP:
        raise DegreeCapExceeded(
            f"mobius tables are limited to n <= {NC_MOBIUS_CAP}"
        )
    lat = nc_lattice.lattice(args.n)
    rows: list[Row] = []
    out_rows = []
    for hi_at, hi in enumerate(lat.elements):
        for lo_at in sorted(lat.below[hi_at]):
            lo = lat.elements[lo_at]
            value = format_rational(lat.mu(lo_at, hi_at))
            pair = [lo.to_json_obj(), hi.to_json_obj()]
            out_rows.append({"word": pair, "entry": 0, "value": value})
            rows.append(("nc-mobius", _compact(pair), 0, value))
    payload = {"query": "nc-mobius", "n": args.n, "rows": out_rows}
    return Emission(payload, rows)


def _degree_table(
    query: str, config: Config, args: argparse.Namespace, kind: str
) -> Emission:
    vars_ = _resolve_vars(config, args.vars, "--vars")
    degree = args.degree if args.degree is not None else config.degree_cap
    build = moment_series if kind == "moment" else r_transform
    series = build(config.functional, vars_, degree)
    out_rows = []
    rows: list[Row] = []
    for word in all_index_words(len(vars_), degree):
        if len(word) != degree:
            continue
        value = series.coef(word).to_json_obj()
        out_rows.append({"word": list(word), "value": value})
        word_json = _compact(list(word))
        for at, cell in enumerate(value, start=1):
            rows.append((query, word_json, at, cell))
    payload = {
        "query": query,
        "s": len(vars_),
        "N": config.order,
        "degree": degree,
        "rows": out_rows,
    }
    return Emission(payload, rows)


def _cmd_moments(config: Config, args: argparse.Namespace) -> Emission:
    return _degree_table("moments", config, args, "moment")


def _cmd_cumulants(config: Config, args: argparse.Namespace) -> Emission:
    return _degree_table("cumulants", config, args, "cumulant")


def _series_emission(query: str, series) -> Emission:
    obj = series.to_json_obj()
    return Emission(obj, _series_rows(query, obj))


def _cmd_rtransform(config: Config, args: argparse.Namespace) -> Emission:
    vars_ = _resolve_vars(config, args.vars, "--vars")
    series = r_transform(config.functional, vars_, args.degree)
    return _series_emission("rtransform", series)


def _cmd_boxconv(config: Config, args: argparse.Namespace) -> Emission:
    left = _resolve_vars(config, args.left, "--left")
    right = _resolve_vars(config, args.right, "--right")
    if len(left) != len(right):
        raise UsageError(
            f"--left names {len(left)} variables but --right names "
            f"{len(right)}; boxed convolution needs equally long lists"
        )
    f = r_transform(config.functional, left, args.degree)
    g = r_transform(config.functional, right, args.degree)
    return _series_emission("boxconv", boxed_convolution(f, g))


def _cmd_check_free(config: Config, args: argparse.Namespace) -> Emission:
    group_a = _resolve_vars(config, args.a, "--a")
    group_b = _resolve_vars(config, args.b, "--b")
    report = check_freeness(config.functional, group_a, group_b, args.degree)
    witness = list(report.witness) if report.witness else None
    payload = {"query": "check-free", "free": report.free, "witness": witness}
    rows: list[Row] = [
        (
            "check-free",
            _compact(witness if witness is not None else []),
            0,
            "true" if report.free else "false",
        )
    ]
    return Emission(payload, rows)


def _cmd_check_even(config: Config, args: argparse.Namespace) -> Emission:
    (var,) = _resolve_vars(config, args.var, "--var")
    result = check_even(config.functional, var, args.degree)
    payload = {"query": "check-even", "even": result}
    rows: list[Row] = [
        ("check-even", "[]", 0, "true" if result else "false")
    ]
    return Emission(payload, rows)


def _cmd_compress(config: Config, args: argparse.Namespace) -> Emission:
    (var,) = _resolve_vars(config, args.var, "--var")
    base = r_transform(config.functional, [var], args.degree)
    return _series_emission("compress", compress_r_transform(base, args.alpha))


def _cmd_sparsity(config: Config, args: argparse.Namespace) -> Emission:
    (var,) = _resolve_vars(config, args.var, "--var")
    series, pattern = free_family_sparsity(config.functional, var, args.degree)
    series_obj = series.to_json_obj()
    payload = {
        "query": "sparsity",
        "series": series_obj,
        "pattern": [row.to_json_obj() for row in pattern],
    }
    rows = _series_rows("sparsity", series_obj)
    for row in pattern:
        rows.append(
            (
                "sparsity-pattern",
                _compact([row.degree, row.source]),
                row.entry,
                format_rational(row.value),
            )
        )
    return Emission(payload, rows)


# --------------------------------------------------------------------------
# argument parsing and dispatch
# --------------------------------------------------------------------------


def _rational_flag(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ExpressionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("json", "csv"), default="json",
        help="output format (default json)",
    )
    parser.add_argument(
        "--out", metavar="PATH", help="write output to PATH instead of stdout"
    )


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config", metavar="PATH", required=True,
        help="JSON configuration file",
    )
    parser.add_argument(
        "--degree", type=int, metavar="N",
        help="truncation degree (default: the configured cap)",
    )
    _add_output_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="toepfree",
        description=(
            "Exact engine for moments, cumulants, R-transforms, and boxed "
            "convolution over Toeplitz matricial algebras."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)

    nc = commands.add_parser("nc", help="noncrossing partition lattice queries")
    nc_sub = nc.add_subparsers(dest="nc_command", required=True)
    nc_list = nc_sub.add_parser("list", help="enumerate NC(n)")
    nc_list.add_argument("--n", type=int, required=True, metavar="K")
    _add_output_flags(nc_list)
    nc_mobius = nc_sub.add_parser("mobius", help="full Moebius table of NC(n)")
    nc_mobius.add_argument("--n", type=int, required=True, metavar="K")
    _add_output_flags(nc_mobius)

    moments = commands.add_parser(
        "moments", help="moment table at one degree"
    )
    moments.add_argument("--vars", required=True, metavar="X,Y")
    _add_config_flags(moments)

    cumulants = commands.add_parser(
        "cumulants", help="cumulant table at one degree"
    )
    cumulants.add_argument("--vars", required=True, metavar="X,Y")
    _add_config_flags(cumulants)

    rtransform = commands.add_parser(
        "rtransform", help="R-transform series up to a degree"
    )
    rtransform.add_argument("--vars", required=True, metavar="X,Y")
    _add_config_flags(rtransform)

    boxconv = commands.add_parser(
        "boxconv", help="boxed convolution of two R-transforms"
    )
    boxconv.add_argument("--left", required=True, metavar="X,...")
    boxconv.add_argument("--right", required=True, metavar="Y,...")
    _add_config_flags(boxconv)

    check_free = commands.add_parser(
        "check-free", help="do all mixed cumulants across two groups vanish"
    )
    check_free.add_argument("--a", required=True, metavar="X,...")
    check_free.add_argument("--b", required=True, metavar="Y,...")
    _add_config_flags(check_free)

    check_even_p = commands.add_parser(
        "check-even", help="do all odd moments and cumulants vanish"
    )
    check_even_p.add_argument("--var", required=True, metavar="X")
    _add_config_flags(check_even_p)

    compress = commands.add_parser(
        "compress", help="R-transform after compression by a projection"
    )
    compress.add_argument("--var", required=True, metavar="X")
    compress.add_argument(
        "--alpha", required=True, type=_rational_flag, metavar="p/q",
        help="trace of the projection (must be nonzero)",
    )
    _add_config_flags(compress)

    sparsity = commands.add_parser(
        "sparsity", help="R-transform sparsity pattern of a free-generator tuple"
    )
    sparsity.add_argument("--var", required=True, metavar="A")
    _add_config_flags(sparsity)

    return parser


_HANDLERS = {
    "moments": _cmd_moments,
    "cumulants": _cmd_cumulants,
    "rtransform": _cmd_rtransform,
    "boxconv": _cmd_boxconv,
    "check-free": _cmd_check_free,
    "check-even": _cmd_check_even,
    "compress": _cmd_compress,
    "sparsity": _cmd_sparsity,
}


def _dispatch(args: argparse.Namespace) -> Emission:
    if args.command == "nc":
        if args.nc_command == "list":
            return _cmd_nc_list(args)
        return _cmd_nc_mobius(args)
    config = load_config(args.config)
    if args.degree is not None and args.degree < 1:
        raise UsageError(f"--degree must be positive, got {args.degree}")
    return _HANDLERS[args.command](config, args)


def _fail(exc: BaseException, code: int) -> int:
    sys.stderr.write(f"error: {_slug(exc)}: {exc}\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        emission = _dispatch(args)
        try:
            _emit(args, emission)
        except OSError as exc:
            sys.stderr.write(f"error: io: {exc}\n")
            return 1
        return 0
    except UsageError as exc:
        return _fail(exc, 1)
    except ConfigError as exc:
        return _fail(exc, 2)
    except ExpressionError as exc:
        return _fail(exc, 2)
    except DimensionMismatch as exc:
        return _fail(exc, 1)
    except (MathDomainError, InternalConsistencyError) as exc:
        return _fail(exc, 3)
    except EngineError as exc:
        return _fail(exc, 3)
