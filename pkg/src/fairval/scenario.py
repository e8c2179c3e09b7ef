"""Scenario files: JSON documents with a ``kind`` discriminator.

Unknown fields anywhere are rejected. Defaults are filled in here, once, and
the resolved parameters are echoed into every report header.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema

SCHEMA_VERSION = 1
KINDS = ("asset", "mm_trajectory", "mm_fuzz", "ledger")


class ParseError(Exception):
    """The scenario file is not well-formed JSON."""


class ValidationError(Exception):
    def __init__(self, message: str, path: str = "") -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.message = message
        self.path = path


_num = {"type": "number"}
_nonneg = {"type": "number", "minimum": 0}
_series = {"type": "array", "items": _num}
_nonneg_series = {"type": "array", "items": _nonneg}
_money = {"type": ["string", "number"]}


def _obj(props: dict, required=()) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(required),
        "additionalProperties": False,
    }


_asset = _obj(
    {
        "C": _nonneg, "K": _nonneg, "R": _num, "S": _nonneg, "n": {"type": "integer", "minimum": 1},
        "P": _num, "Q": _nonneg, "VC": _num, "W": _num, "L": _nonneg,
    },
    required=["n"],
)

_terminal = {
    "oneOf": [
        _obj({"type": {"const": "zero_goodwill"}}, ["type"]),
        _obj({"type": {"const": "explicit"}, "value": _nonneg}, ["type", "value"]),
    ]
}

_account = _obj(
    {
        "member_id": {"type": "string"},
        "balance": _money,
        "share_count": {"type": "integer", "minimum": 0},
        "labor_weight": _money,
        "active": {"type": "boolean"},
    },
    ["member_id"],
)

_book = _obj(
    {
        "denomination": {"enum": ["value", "shares"]},
        "nav": _money,
        "collective": _money,
        "share_price": _money,
        "total_shares": {"type": "integer", "minimum": 0},
        "ica_interest_rate": _money,
        "accounts": {"type": "array", "items": _account},
    }
)

_event = _obj(
    {
        "kind": {
            "enum": [
                "Contribution", "PatronageAllocation", "LossAllocation", "InterestCredit",
                "Withdrawal", "EsopPrincipalAllocation", "ShareRevaluation", "MarkToNAV", "Exit",
            ]
        },
        "payload": {"type": "object"},
    },
    ["kind"],
)

PARAM_SCHEMAS = {
    "asset": _obj({"r": _num, "asset": _asset}, ["r", "asset"]),
    "mm_trajectory": _obj(
        {
            "r": {"type": "number", "exclusiveMinimum": 0},
            "NAV0": {"type": "number", "exclusiveMinimum": 0},
            "n0": {"type": "number", "exclusiveMinimum": 0},
            "A": _series,
            "I": _series,
            "Div": _nonneg_series,
            "Depr": _nonneg_series,
            "COGS": _nonneg_series,
            "D": _nonneg_series,
            "terminal": _terminal,
        },
        ["r", "NAV0", "n0", "A", "I"],
    ),
    "mm_fuzz": _obj(
        {
            "count": {"type": "integer", "minimum": 1},
            "workers": {"type": "integer", "minimum": 1},
            "T_min": {"type": "integer", "minimum": 1},
            "T_max": {"type": "integer", "minimum": 1},
            "r_min": {"type": "number", "exclusiveMinimum": 0},
            "r_max": {"type": "number", "exclusiveMinimum": 0},
            "profit_frac": _nonneg,
            "nav0_min": {"type": "number", "exclusiveMinimum": 0},
            "nav0_max": {"type": "number", "exclusiveMinimum": 0},
            "invest_min_frac": _num,
            "invest_max_frac": _num,
            "explicit_terminal_prob": {"type": "number", "minimum": 0, "maximum": 1},
            "max_attempts": {"type": "integer", "minimum": 1},
        },
        ["count"],
    ),
    "ledger": _obj(
        {
            "book": _book,
            "events": {"type": "array", "items": _event},
            "market_value": _money,
        },
        ["book"],
    ),
}

TOP_SCHEMA = _obj(
    {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "name": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "tol": {"type": "number", "minimum": 0},
        "tables": {"type": "array", "items": {"type": "string"}},
        "params": {"type": "object"},
    },
    ["schema_version", "kind", "params"],
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Scenario:
    kind: str
    name: str
    params: dict
    seed: int | None
    tol: float
    tables: tuple | None
    digest: str
    source: str


def _path(err: jsonschema.ValidationError, prefix: str = "") -> str:
    parts = [prefix] if prefix else []
    parts += [str(p) for p in err.absolute_path]
    return ".".join(parts) or "<root>"


def _validate(doc, schema, prefix: str = "") -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        err = errors[0]
        raise ValidationError(err.message, _path(err, prefix))


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc}") from exc
    _validate(doc, TOP_SCHEMA)
    kind = doc["kind"]
    params = doc["params"]
    _validate(params, PARAM_SCHEMAS[kind], "params")
    if kind == "mm_trajectory":
        T = len(params["A"])
        for name in ("I", "Div", "Depr", "COGS", "D"):
            if name in params and len(params[name]) != T:
                raise ValidationError(f"length {len(params[name])} != len(A) = {T}", f"params.{name}")
    return Scenario(
        kind=kind,
        name=doc.get("name", Path(source).stem),
        params=params,
        seed=doc.get("seed"),
        tol=doc.get("tol", DEFAULT_TOL),
        tables=tuple(doc["tables"]) if "tables" in doc else None,
        digest=hashlib.sha256(text.encode()).hexdigest(),
        source=Path(source).name,
    )


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return parse_scenario(text, str(path))
