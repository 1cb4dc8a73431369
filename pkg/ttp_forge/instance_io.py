"""Reading and writing benchmark-format instance files.

Parses the line-oriented TTP layout (key: value headers, then a
NODE_COORD_SECTION and an ITEMS SECTION) and TSPLIB `.tsp` coordinate
files, which share the NODE_COORD_SECTION grammar.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
import io
import logging
from pathlib import Path
from typing import TextIO

from ttp_forge.enums import EdgeWeightKind, KpType
from ttp_forge.errors import ParseError
from ttp_forge.instance import Item, TtpInstance

logger = logging.getLogger(__name__)

# Header keys in file order
HEADER_KEYS = (
    "PROBLEM NAME",
    "KNAPSACK DATA TYPE",
    "DIMENSION",
    "NUMBER OF ITEMS",
    "CAPACITY OF KNAPSACK",
    "MIN SPEED",
    "MAX SPEED",
    "RENTING RATIO",
    "EDGE_WEIGHT_TYPE",
)
NODE_SECTION_HEADER = "NODE_COORD_SECTION\t(INDEX, X, Y):"
ITEMS_SECTION_HEADER = "ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):"
UNKNOWN_KP_LABEL = "unknown"


@dataclass
class _Line:
    number: int
    text: str


def _numbered_lines(source: str | TextIO) -> list[_Line]:
    stream = io.StringIO(source) if isinstance(source, str) else source
    lines = []
    for number, raw in enumerate(stream, start=1):
        text = raw.strip()
        if text:
            lines.append(_Line(number, text))
    return lines


def _to_int(token: str, line: _Line, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"malformed {what}: {token!r}", line.number) from None


def _to_float(token: str, line: _Line, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"malformed {what}: {token!r}", line.number) from None


def _parse_coord_rows(lines: list[_Line], start: int, count: int, header: _Line) -> list[tuple[float, float]]:
    """Read `count` rows of `index x y` starting at lines[start]."""
    if start + count > len(lines):
        raise ParseError(
            f"NODE_COORD_SECTION declares {count} nodes but only {len(lines) - start} rows follow",
            header.number,
        )
    coords = []
    for offset in range(count):
        line = lines[start + offset]
        parts = line.text.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'index x y', got {line.text!r}", line.number)
        index = _to_int(parts[0], line, "node index")
        if index != offset + 1:
            raise ParseError(f"node index {index} out of order (expected {offset + 1})", line.number)
        coords.append((_to_float(parts[1], line, "x coordinate"), _to_float(parts[2], line, "y coordinate")))
    return coords


def _split_header(line: _Line) -> tuple[str, str] | None:
    if ":" not in line.text:
        return None
    key, value = line.text.split(":", 1)
    return key.strip().upper(), value.strip()


def parse_ttp(
    source: str | TextIO,
    v_max: float | None = None,
    v_min: float | None = None,
) -> TtpInstance:
    """Parse a TTP instance from text or a text stream.

    Args:
        source: File contents or an open text stream
        v_max: Override for the file's MAX SPEED
        v_min: Override for the file's MIN SPEED

    Returns:
        The parsed instance, items in file order

    Raises:
        ParseError: On a missing header key, a row-count mismatch, an item
            assigned to city 1, or a malformed number
    """
    lines = _numbered_lines(source)
    headers: dict[str, tuple[str, _Line]] = {}
    coords: list[tuple[float, float]] | None = None
    items: list[Item] | None = None

    index = 0
    while index < len(lines):
        line = lines[index]
        upper = line.text.upper()
        if upper.startswith("NODE_COORD_SECTION"):
            dimension = _require_int(headers, "DIMENSION", line)
            coords = _parse_coord_rows(lines, index + 1, dimension, line)
            index += dimension + 1
            continue
        if upper.startswith("ITEMS SECTION"):
            count = _require_int(headers, "NUMBER OF ITEMS", line)
            items = _parse_item_rows(lines, index + 1, count, line)
            index += count + 1
            continue
        if upper == "EOF":
            index += 1
            continue
        header = _split_header(line)
        if header is None:
            raise ParseError(f"unexpected line {line.text!r}", line.number)
        key, value = header
        if key in HEADER_KEYS:
            headers[key] = (value, line)
        else:
            logger.debug("Ignoring unknown header %s on line %d", key, line.number)
        index += 1

    last = lines[-1] if lines else _Line(0, "")
    for key in HEADER_KEYS:
        if key not in headers:
            raise ParseError(f"missing header key {key}", last.number or None)
    if coords is None:
        raise ParseError("missing NODE_COORD_SECTION", last.number or None)
    if items is None:
        raise ParseError("missing ITEMS SECTION", last.number or None)

    dimension = len(coords)
    for item in items:
        if item.city == 1:
            raise ParseError(f"item {item.id} is assigned to city 1")
        if not 2 <= item.city <= dimension:
            raise ParseError(f"item {item.id} is assigned to unknown city {item.city}")

    kp_label, _ = headers["KNAPSACK DATA TYPE"]
    kp_type = None if kp_label.lower() == UNKNOWN_KP_LABEL else _parse_kp_type(kp_label, headers)
    edge_value, edge_line = headers["EDGE_WEIGHT_TYPE"]
    try:
        edge_kind = EdgeWeightKind(edge_value.upper())
    except ValueError:
        raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {edge_value!r}", edge_line.number) from None

    file_v_max = _require_float(headers, "MAX SPEED")
    file_v_min = _require_float(headers, "MIN SPEED")
    try:
        return TtpInstance(
            name=headers["PROBLEM NAME"][0],
            coords=tuple(coords),
            items=tuple(items),
            capacity=_require_int(headers, "CAPACITY OF KNAPSACK", last),
            renting_ratio=_require_float(headers, "RENTING RATIO"),
            v_max=file_v_max if v_max is None else v_max,
            v_min=file_v_min if v_min is None else v_min,
            edge_weight_kind=edge_kind,
            kp_type=kp_type,
        )
    except ValueError as e:
        raise ParseError(str(e)) from e


def _parse_kp_type(label: str, headers: dict[str, tuple[str, _Line]]) -> KpType:
    try:
        return KpType.from_string(label)
    except ValueError as e:
        raise ParseError(str(e), headers["KNAPSACK DATA TYPE"][1].number) from None


def _require_int(headers: dict[str, tuple[str, _Line]], key: str, where: _Line) -> int:
    if key not in headers:
        raise ParseError(f"missing header key {key}", where.number)
    value, line = headers[key]
    number = _to_float(value, line, key)
    if not number.is_integer():
        raise ParseError(f"{key} must be an integer, got {value!r}", line.number)
    return int(number)


def _require_float(headers: dict[str, tuple[str, _Line]], key: str) -> float:
    value, line = headers[key]
    return _to_float(value, line, key)


def _parse_item_rows(lines: list[_Line], start: int, count: int, header: _Line) -> list[Item]:
    available = 0
    for line in lines[start:]:
        upper = line.text.upper()
        if _split_header(line) is not None or upper == "EOF" or upper.startswith("NODE_COORD_SECTION"):
            break
        available += 1
    if available != count:
        raise ParseError(
            f"ITEMS SECTION declares {count} items but {available} rows follow", header.number
        )
    items = []
    for offset in range(count):
        line = lines[start + offset]
        parts = line.text.split()
        if len(parts) != 4:
            raise ParseError(f"expected 'index profit weight city', got {line.text!r}", line.number)
        item_id = _to_int(parts[0], line, "item index")
        if item_id != offset + 1:
            raise ParseError(f"item index {item_id} out of order (expected {offset + 1})", line.number)
        profit = _to_int(parts[1], line, "profit")
        weight = _to_int(parts[2], line, "weight")
        city = _to_int(parts[3], line, "assigned node")
        if city == 1:
            raise ParseError(f"item {item_id} is assigned to city 1", line.number)
        try:
            items.append(Item(id=item_id, city=city, weight=weight, profit=profit))
        except ValueError as e:
            raise ParseError(str(e), line.number) from None
    return items


def format_number(value: float) -> str:
    """Shortest text that parses back to the same float; integral values print bare."""
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def serialize_ttp(instance: TtpInstance) -> str:
    """Render an instance in the benchmark layout (canonical form)."""
    kp_label = instance.kp_type.value if instance.kp_type is not None else UNKNOWN_KP_LABEL
    out = [
        f"PROBLEM NAME:\t{instance.name}",
        f"KNAPSACK DATA TYPE:\t{kp_label}",
        f"DIMENSION:\t{instance.n}",
        f"NUMBER OF ITEMS:\t{instance.m_total}",
        f"CAPACITY OF KNAPSACK:\t{instance.capacity}",
        f"MIN SPEED:\t{format_number(instance.v_min)}",
        f"MAX SPEED:\t{format_number(instance.v_max)}",
        f"RENTING RATIO:\t{format_number(instance.renting_ratio)}",
        f"EDGE_WEIGHT_TYPE:\t{instance.edge_weight_kind.value}",
        NODE_SECTION_HEADER,
    ]
    out.extend(
        f"{index}\t{format_number(x)}\t{format_number(y)}"
        for index, (x, y) in enumerate(instance.coords, start=1)
    )
    out.append(ITEMS_SECTION_HEADER)
    out.extend(f"{item.id}\t{item.profit}\t{item.weight}\t{item.city}" for item in instance.items)
    return "\n".join(out) + "\n"


def read_ttp(path: str | Path, v_max: float | None = None, v_min: float | None = None) -> TtpInstance:
    """Parse an instance file."""
    with open(path, encoding="utf-8") as f:
        return parse_ttp(f, v_max=v_max, v_min=v_min)


def write_ttp(path: str | Path, instance: TtpInstance) -> Path:
    """Write an instance file, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_ttp(instance), encoding="utf-8")
    return path


@dataclass(frozen=True)
class TspCoordinates:
    """Coordinates read from a TSPLIB `.tsp` file."""

    name: str
    coords: tuple[tuple[float, float], ...]
    edge_weight_kind: EdgeWeightKind


def parse_tsp_coords(source: str | TextIO) -> TspCoordinates:
    """Parse NAME, EDGE_WEIGHT_TYPE and NODE_COORD_SECTION of a TSPLIB file.

    Raises:
        ParseError: On a missing DIMENSION, unsupported edge type or bad rows
    """
    lines = _numbered_lines(source)
    name = "unnamed"
    dimension: int | None = None
    edge_kind = EdgeWeightKind.CEIL_2D
    for index, line in enumerate(lines):
        if line.text.upper().startswith("NODE_COORD_SECTION"):
            if dimension is None:
                raise ParseError("DIMENSION must precede NODE_COORD_SECTION", line.number)
            coords = _parse_coord_rows(lines, index + 1, dimension, line)
            return TspCoordinates(name=name, coords=tuple(coords), edge_weight_kind=edge_kind)
        header = _split_header(line)
        if header is None:
            continue
        key, value = header
        if key == "NAME":
            name = value
        elif key == "DIMENSION":
            dimension = _to_int(value, line, "DIMENSION")
        elif key == "EDGE_WEIGHT_TYPE":
            try:
                edge_kind = EdgeWeightKind(value.upper())
            except ValueError:
                raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {value!r}", line.number) from None
    raise ParseError("missing NODE_COORD_SECTION")


def read_tsp_coords(path: str | Path) -> TspCoordinates:
    with open(path, encoding="utf-8") as f:
        return parse_tsp_coords(f)


def parse_int_list(source: str | TextIO | Iterable[str]) -> list[int]:
    """Whitespace-separated integers (tour and plan files)."""
    text = source if isinstance(source, str) else "".join(source)
    tokens = text.split()
    values = []
    for position, token in enumerate(tokens, start=1):
        try:
            values.append(int(token))
        except ValueError:
            raise ParseError(f"token {position} is not an integer: {token!r}") from None
    return values
