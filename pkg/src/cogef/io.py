"""Instance files in, formulation files out.

Instances are JSON documents::

    {"A": [[...], ...], "b": [...], "label": "...",
     "graph_hint": {"nodes": 4, "arcs": [[0, 3], ...], "column_map": [...]},
     "trusted_profile": {"delta": 2, "gcd": 2, "strict": true}}

Formulations go out as CPLEX-style LP text, fixed-field MPS, or JSON that
keeps every coefficient as an exact numerator/denominator pair.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from math import lcm
from pathlib import Path

from .formulation import ExtendedFormulation, Row, _tidy
from .linalg import Matrix, rank
from .modularity import ModularityProfile
from .pipeline import EfArtifact, GraphHint, ProblemInstance

FORMATS = ("lp", "mps", "json")
EF_SCHEMA = "cogef-ef/1"


class InstanceFormatError(ValueError):
    """Malformed instance document; the message names the offending field."""


# ---------------------------------------------------------------------------
# instances

def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceFormatError(f"{where}: expected an integer, got {value!r}")
    return value


def _int_list(value, where: str) -> list[int]:
    if not isinstance(value, list):
        raise InstanceFormatError(f"{where}: expected a list, got {type(value).__name__}")
    return [_int(v, f"{where}[{i}]") for i, v in enumerate(value)]


def instance_from_dict(doc, source: str = "<document>") -> ProblemInstance:
    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{source}: top level must be an object")
    unknown = set(doc) - {"A", "b", "label", "graph_hint", "trusted_profile"}
    if unknown:
        raise InstanceFormatError(f"{source}: unknown keys {sorted(unknown)}")
    for key in ("A", "b"):
        if key not in doc:
            raise InstanceFormatError(f"{source}: missing required key {key!r}")
    if not isinstance(doc["A"], list) or not doc["A"]:
        raise InstanceFormatError(f"{source}: A must be a non-empty list of rows")
    rows = [_int_list(r, f"A[{i}]") for i, r in enumerate(doc["A"])]
    width = len(rows[0])
    if width == 0:
        raise InstanceFormatError("A[0]: rows must be non-empty")
    for i, r in enumerate(rows):
        if len(r) != width:
            raise InstanceFormatError(f"A[{i}]: row has {len(r)} entries, A[0] has {width}")
    b = _int_list(doc["b"], "b")
    if len(b) != len(rows):
        raise InstanceFormatError(f"b: length {len(b)} does not match the {len(rows)} rows of A")
    A = Matrix(rows, width)
    r = rank(A)
    if r != width:
        raise InstanceFormatError(f"A: rank {r} is below the column count {width}")

    hint = None
    if doc.get("graph_hint") is not None:
        h = doc["graph_hint"]
        if not isinstance(h, dict):
            raise InstanceFormatError("graph_hint: expected an object")
        nodes = _int(h.get("nodes"), "graph_hint.nodes")
        raw_arcs = h.get("arcs")
        if not isinstance(raw_arcs, list):
            raise InstanceFormatError("graph_hint.arcs: expected a list of [tail, head] pairs")
        arcs = []
        for k, a in enumerate(raw_arcs):
            pair = _int_list(a, f"graph_hint.arcs[{k}]")
            if len(pair) != 2 or not all(0 <= v < nodes for v in pair):
                raise InstanceFormatError(f"graph_hint.arcs[{k}]: need two node ids below {nodes}")
            arcs.append(tuple(pair))
        if len(arcs) != len(rows):
            raise InstanceFormatError(
                f"graph_hint.arcs: {len(arcs)} arcs, expected one per row of A ({len(rows)})")
        cmap = h.get("column_map")
        if cmap is not None:
            cmap = _int_list(cmap, "graph_hint.column_map")
            if sorted(cmap) != list(range(len(rows))):
                raise InstanceFormatError("graph_hint.column_map: must be a permutation of the rows of A")
            cmap = tuple(cmap)
        hint = GraphHint(nodes, tuple(arcs), cmap)

    profile = None
    if doc.get("trusted_profile") is not None:
        p = doc["trusted_profile"]
        if not isinstance(p, dict):
            raise InstanceFormatError("trusted_profile: expected an object")
        strict = p.get("strict")
        if not isinstance(strict, bool):
            raise InstanceFormatError("trusted_profile.strict: expected true or false")
        try:
            profile = ModularityProfile(_int(p.get("delta"), "trusted_profile.delta"),
                                        _int(p.get("gcd"), "trusted_profile.gcd"), strict, trusted=True)
        except ValueError as exc:
            if isinstance(exc, InstanceFormatError):
                raise
            raise InstanceFormatError(f"trusted_profile: {exc}") from exc

    label = doc.get("label", "")
    if not isinstance(label, str):
        raise InstanceFormatError("label: expected a string")
    return ProblemInstance(A, tuple(b), hint, label, profile)


def parse_instance(path) -> ProblemInstance:
    path = Path(path)
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return instance_from_dict(doc, str(path))
    except InstanceFormatError as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc


def instance_to_dict(inst: ProblemInstance) -> dict:
    doc: dict = {"label": inst.label, "A": [list(inst.A.row(i)) for i in range(inst.m)], "b": list(inst.b)}
    if inst.graph_hint is not None:
        h = inst.graph_hint
        doc["graph_hint"] = {"nodes": h.nodes, "arcs": [list(a) for a in h.arcs],
                             "column_map": None if h.column_map is None else list(h.column_map)}
    if inst.trusted_profile is not None:
        p = inst.trusted_profile
        doc["trusted_profile"] = {"delta": p.delta, "gcd": p.gcd, "strict": p.strictly_modular}
    return doc


def dump_instance(inst: ProblemInstance, path) -> None:
    doc = instance_to_dict(inst)
    # one matrix row per line keeps diffs and error line numbers readable
    lines = ["{"]
    items = list(doc.items())
    for k, (key, val) in enumerate(items):
        tail = "," if k < len(items) - 1 else ""
        if key == "A":
            body = ",\n".join("    " + json.dumps(r) for r in val)
            lines.append(f'  "A": [\n{body}\n  ]{tail}')
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val)}{tail}")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# formulations: shared helpers

def _frac(v) -> Fraction:
    return Fraction(v)


def _integral_row(row: Row) -> tuple[list[tuple[int, int]], int]:
    """Scale a row by the lcm of its denominators so every number is an integer."""
    vals = [_frac(c) for _, c in row.coeffs] + [_frac(row.rhs)]
    k = lcm(*(v.denominator for v in vals)) if vals else 1
    coeffs = [(j, int(_frac(c) * k)) for j, c in row.coeffs]
    return coeffs, int(_frac(row.rhs) * k)


_NAME_BAD = re.compile(r"[^A-Za-z0-9_.]+")


def _lp_names(names: list[str], prefix: str) -> list[str]:
    out, seen = [], set()
    for i, nm in enumerate(names):
        base = _NAME_BAD.sub("_", nm).strip("_") or prefix
        cand = f"{prefix}{i}_{base}"
        if cand in seen:
            raise AssertionError(f"duplicate LP name {cand}")
        seen.add(cand)
        out.append(cand)
    return out


# ---------------------------------------------------------------------------
# LP

_SENSE_LP = {"<=": "<=", ">=": ">=", "==": "="}


def to_lp(ef: ExtendedFormulation, title: str = "") -> str:
    cols = _lp_names(ef.names, "v")
    rows = _lp_names([r.tag or "row" for r in ef.rows], "r")
    out = [f"\\ {title}" if title else "\\ cogef formulation",
           "\\ projection: " + " ".join(cols[j] for j in ef.projection),
           "Minimize",
           f" obj: 0 {cols[0]}" if cols else " obj:",
           "Subject To"]
    for name, row in zip(rows, ef.rows):
        coeffs, rhs = _integral_row(row)
        terms = []
        for j, c in coeffs:
            sign = "-" if c < 0 else "+"
            terms.append(f"{sign} {abs(c)} {cols[j]}")
        lhs = " ".join(terms) if terms else f"0 {cols[0]}"
        if lhs.startswith("+ "):
            lhs = lhs[2:]
        out.append(f" {name}: {lhs} {_SENSE_LP[row.sense]} {rhs}")
    out.append("Bounds")
    for j, lo in enumerate(ef.lower):
        if lo is None:
            out.append(f" {cols[j]} free")
        elif lo != 0:
            out.append(f" {cols[j]} >= {lo}")
    out.append("End")
    return "\n".join(out) + "\n"


_TERM = re.compile(r"([+-])?\s*(\d+)?\s*([A-Za-z_][\w.]*)")


def read_lp(text: str) -> ExtendedFormulation:
    """Parse the LP subset written by ``to_lp`` back into a formulation."""
    ef = ExtendedFormulation()
    index: dict[str, int] = {}
    section = None
    projection: list[str] = []
    pending: list[tuple[list, str, int, str]] = []
    free: set[str] = set()
    declared: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("\\ projection:"):
            projection = line.split(":", 1)[1].split()
            continue
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("minimize", "maximize", "subject to", "bounds", "end"):
            section = low
            continue
        if section == "minimize":
            declared += [t[2] for t in _TERM.findall(line.split(":", 1)[1])]
        elif section == "subject to":
            name, body = line.split(":", 1)
            m = re.match(r"(.*?)(<=|>=|=)\s*(-?\d+)\s*$", body)
            if not m:
                raise ValueError(f"cannot parse LP row {line!r}")
            lhs, sense, rhs = m.groups()
            terms = []
            for sign, coef, var in _TERM.findall(lhs):
                c = int(coef) if coef else 1
                terms.append((var, -c if sign == "-" else c))
                declared.append(var)
            pending.append((terms, {"=": "=="}.get(sense, sense), int(rhs), name.strip()))
        elif section == "bounds":
            parts = line.split()
            if len(parts) == 2 and parts[1].lower() == "free":
                free.add(parts[0])
                declared.append(parts[0])
            else:
                raise ValueError(f"unsupported bound {line!r}")
    def position(var):
        m = re.match(r"v(\d+)_", var)
        return (0, int(m.group(1))) if m else (1, var)

    for var in sorted(set(declared + projection), key=position):
        if var not in index:
            index[var] = ef.add_var(var, nonneg=var not in free)
    for terms, sense, rhs, name in pending:
        tag = name.split("_", 1)[1] if "_" in name else name
        ef.add_row([(index[v], c) for v, c in terms], sense, rhs, tag)
    ef.projection = [index[v] for v in projection]
    return ef


# ---------------------------------------------------------------------------
# fixed-field MPS

def _mps_line(f1: str = "", f2: str = "", f3: str = "", f4: str = "", f5: str = "", f6: str = "") -> str:
    """Columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61."""
    for val, width in ((f1, 2), (f2, 8), (f3, 8), (f4, 12), (f5, 8), (f6, 12)):
        if len(val) > width:
            raise ValueError(f"MPS field {val!r} is wider than {width} characters")
    line = f" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}"
    if f5:
        line += f"   {f5:<8}  {f6:>12}"
    return line.rstrip()


def to_mps(ef: ExtendedFormulation, title: str = "COGEF") -> str:
    nrow, ncol = len(ef.rows), ef.num_vars
    if max(nrow, ncol) >= 10 ** 7:
        raise ValueError("too many rows or columns for 8-character MPS names")
    rname = [f"R{i:07d}" for i in range(nrow)]
    cname = [f"C{j:07d}" for j in range(ncol)]
    kind = {"<=": "L", ">=": "G", "==": "E"}
    scaled = [_integral_row(r) for r in ef.rows]
    by_col: list[list[tuple[int, int]]] = [[] for _ in range(ncol)]
    for i, (coeffs, _) in enumerate(scaled):
        for j, c in coeffs:
            by_col[j].append((i, c))
    out = [f"NAME          {title[:8]}", "ROWS", _mps_line("N", "OBJ")]
    out += [_mps_line(kind[r.sense], rname[i]) for i, r in enumerate(ef.rows)]
    out.append("COLUMNS")
    for j in range(ncol):
        out.append(_mps_line("", cname[j], "OBJ", "0"))
        for i, c in by_col[j]:
            out.append(_mps_line("", cname[j], rname[i], str(c)))
    out.append("RHS")
    for i, (_, rhs) in enumerate(scaled):
        if rhs:
            out.append(_mps_line("", "RHS", rname[i], str(rhs)))
    out.append("BOUNDS")
    for j, lo in enumerate(ef.lower):
        if lo is None:
            out.append(_mps_line("FR", "BND", cname[j]))
        elif lo != 0:
            out.append(_mps_line("LO", "BND", cname[j], str(lo)))
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def read_mps(text: str) -> ExtendedFormulation:
    """Read fixed-field MPS by column position, as written by ``to_mps``."""
    ef = ExtendedFormulation()
    section = None
    senses: dict[str, str] = {}
    order: list[str] = []
    coeffs: dict[str, list] = {}
    rhs: dict[str, int] = {}
    cols: dict[str, int] = {}
    inv = {"L": "<=", "G": ">=", "E": "=="}
    for line in text.splitlines():
        if not line.strip():
            continue
        if not line.startswith(" "):
            section = line.split()[0]
            continue
        f1, f2, f3 = line[1:3].strip(), line[4:12].strip(), line[14:22].strip()
        f4 = line[24:36].strip()
        if section == "ROWS":
            if f1 != "N":
                senses[f2] = inv[f1]
                order.append(f2)
                coeffs[f2] = []
        elif section == "COLUMNS":
            if f2 not in cols:
                cols[f2] = ef.add_var(f2, nonneg=True)
            if f3 != "OBJ":
                coeffs[f3].append((cols[f2], int(f4)))
        elif section == "RHS":
            rhs[f3] = int(f4)
        elif section == "BOUNDS":
            if f1 == "FR":
                ef.lower[cols[f3]] = None
            elif f1 == "LO":
                ef.lower[cols[f3]] = int(f4)
    for r in order:
        ef.add_row(coeffs[r], senses[r], rhs.get(r, 0), r)
    return ef


# ---------------------------------------------------------------------------
# JSON

def _pair(v) -> list[int]:
    f = _frac(v)
    return [f.numerator, f.denominator]


def _plain(value):
    """JSON-safe copy of a metadata value, or None when it has no faithful encoding."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, (list, tuple)):
        items = [_plain(v) for v in value]
        return None if any(i is None and v is not None for i, v in zip(items, value)) else items
    return None


def _restore(value):
    if isinstance(value, dict) and set(value) == {"num", "den"}:
        return Fraction(value["num"], value["den"])
    if isinstance(value, list):
        return [_restore(v) for v in value]
    return value


def artifact_to_dict(art: EfArtifact) -> dict:
    ef = art.formulation
    meta = {}
    for key in sorted(art.meta):
        val = _plain(art.meta[key])
        if val is not None:
            meta[key] = val
    return {
        "schema": EF_SCHEMA,
        "label": art.label,
        "branch": art.branch,
        "target_coset": art.target_coset,
        "meta": meta,
        "variables": [{"name": nm, "lower": lo} for nm, lo in zip(ef.names, ef.lower)],
        "projection": list(ef.projection),
        "rows": [{"tag": r.tag, "sense": r.sense, "rhs": _pair(r.rhs),
                  "coeffs": [[j] + _pair(c) for j, c in r.coeffs]} for r in ef.rows],
    }


def artifact_from_dict(doc: dict) -> EfArtifact:
    if doc.get("schema") != EF_SCHEMA:
        raise ValueError(f"not a {EF_SCHEMA} document")
    ef = ExtendedFormulation()
    for v in doc["variables"]:
        ef.add_var(v["name"], v["lower"] == 0)
        if v["lower"] not in (None, 0):
            ef.lower[-1] = v["lower"]
    for r in doc["rows"]:
        coeffs = tuple((j, _tidy(Fraction(p, q))) for j, p, q in r["coeffs"])
        ef.rows.append(Row(coeffs, r["sense"], _tidy(Fraction(*r["rhs"])), r["tag"]))
    ef.projection = list(doc["projection"])
    meta = {k: _restore(v) for k, v in doc["meta"].items()}
    ef.meta.update(branch=doc["branch"])
    return EfArtifact(ef, doc["branch"], meta, doc["target_coset"], doc["label"])


def to_json(art: EfArtifact) -> str:
    return json.dumps(artifact_to_dict(art), indent=1, sort_keys=True) + "\n"


def read_json(text: str) -> EfArtifact:
    return artifact_from_dict(json.loads(text))


# ---------------------------------------------------------------------------

def render(art: EfArtifact, fmt: str) -> str:
    if fmt == "lp":
        return to_lp(art.formulation, art.label)
    if fmt == "mps":
        return to_mps(art.formulation, _NAME_BAD.sub("", art.label)[:8] or "COGEF")
    if fmt == "json":
        return to_json(art)
    raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")


def emit(art: EfArtifact, fmt: str, path) -> None:
    Path(path).write_text(render(art, fmt))
