from __future__ import annotations
import json
import logging
import os
import warnings
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple

import jsonschema

from .SRCover import CLOSED, OPEN, Cover, Interval
from .SRExceptions import FileFormatError
from .SRMachine import Machine
from .SRReal import KINDS, SEQUENCE, LscReal, format_q, parse_q
from .SRTransforms import DoubleSeries

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(PACKAGE_DIR, "data")
SCHEMA_DIR = os.path.join(PACKAGE_DIR, "schemas")

# bundled corpus sub-directory per object type
CORPUS_DIRS = {
    "machine": "machines",
    "real": "series",
    "cover": "covers",
    "double-series": "series",
    "weights": "covers",
}

OBJECT_TYPES = ("real", "cover", "machine", "double-series", "weights")

REAL_HEADERS = ("kind", "name", "limit", "known_sup")


def _content_lines(lines: Iterable[str]) -> List[Tuple[int, str]]:
    out = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line))
    return out


def _header(line: str) -> Optional[Tuple[str, str]]:
    key, sep, value = line.partition(":")
    if sep and key.strip().isidentifier():
        return key.strip(), value.strip()
    return None


class SRDataProcessor:
    """
    Reads and writes semireal objects as text or JSON files.

    Text formats (``#`` starts a comment everywhere):

    * real: optional ``kind``, ``name``, ``limit`` and ``known_sup`` headers
      (a trailing colon is allowed), then one term per line, either
      ``num/den`` or ``i num/den`` with consecutive indices from 0.
    * cover: optional ``name:`` and ``budget:`` headers, then lines
      ``left right [open|closed]``.
    * machine: ``program:<bits> output:<int> time:<int>`` per line.
    * double-series: ``i j num/den`` per line.
    * weights: ``point num/den`` per line (point masses for the union bound).

    Names without a path separator or extension that are not existing files
    resolve to the bundled corpus, so ``resolve("default", "machine")`` finds
    the shipped default machine.
    """

    def __init__(self, data_dir: str = DATA_DIR):
        self.data_dir = data_dir

    # --- corpus ---
    def resolve(self, name: str, object_type: str) -> str:
        """
        Path of ``name``: an existing file as given, or a bundled corpus entry.

        Raises:
            FileNotFoundError: If neither exists.
        """
        if os.path.exists(name):
            return name
        folder = os.path.join(self.data_dir, CORPUS_DIRS.get(object_type, ""))
        for ext in (".txt", ".json"):
            candidate = os.path.join(folder, name + ext)
            if os.path.exists(candidate):
                return candidate
        raise FileNotFoundError(f"No file or bundled {object_type} named '{name}'")

    def corpus(self, object_type: str) -> List[str]:
        """Names of the bundled entries of one type."""
        folder = os.path.join(self.data_dir, CORPUS_DIRS[object_type])
        return sorted(os.path.splitext(f)[0] for f in os.listdir(folder) if f.endswith((".txt", ".json")))

    def load(self, name: str, object_type: str):
        """Resolve ``name`` and read it with the reader its extension selects."""
        path = self.resolve(name, object_type)
        if path.endswith(".json"):
            return self.read_json(path, object_type)
        return self.read_txt(path, object_type)

    # --- JSON ---
    def read_json(self, file_path: str, object_type: str):
        """
        Reads an object from a .json file.

        Raises:
            FileFormatError: If the file is not valid JSON or has the wrong shape.
        """
        try:
            with open(file_path, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as exc:
            raise FileFormatError(file_path, exc.lineno, exc.msg) from exc
        try:
            return self.from_dict(data, object_type)
        except (KeyError, TypeError) as exc:
            raise FileFormatError(file_path, 1, f"missing or malformed field {exc}") from exc

    def from_dict(self, data: Dict[str, Any], object_type: str):
        kind = object_type.lower()
        if kind == "real":
            return LscReal.from_dict(data)
        if kind == "cover":
            return Cover.from_dict(data)
        if kind == "machine":
            return Machine.from_dict(data)
        if kind == "double-series":
            return DoubleSeries({(int(i), int(j)): v for i, j, v in data["cells"]}, name=data.get("name", "double-series"))
        if kind == "weights":
            return {parse_q(p): parse_q(w) for p, w in data["weights"].items()}
        raise ValueError(f"Unsupported object type '{object_type}', expected one of {OBJECT_TYPES}")

    def to_json(self, obj: Any, file_path: str, fuel: int = 0) -> None:
        """
        Writes an object to a .json file; streams are written up to ``fuel`` terms.
        """
        if isinstance(obj, (LscReal, Cover)):
            data = obj.to_dict(fuel)
        elif isinstance(obj, (Machine, DoubleSeries)):
            data = obj.to_dict()
        elif isinstance(obj, dict):
            data = obj
        else:
            raise ValueError(f"Unsupported object type for JSON serialization: {type(obj)}")
        with open(file_path, "w") as f:
            json.dump(data, f, indent=4, sort_keys=True)
        logger.debug("wrote %s", file_path)

    # --- TXT ---
    def read_txt(self, file_path: str, object_type: str):
        """
        Reads an object from a .txt file.

        Raises:
            FileFormatError: On a malformed line.
        """
        with open(file_path, "r") as f:
            lines = f.readlines()
        return self.parse_lines(lines, object_type, source=file_path)

    def parse_lines(self, lines: Iterable[str], object_type: str, source: str = "<lines>"):
        kind = object_type.lower()
        stem = os.path.splitext(os.path.basename(source))[0]
        if kind == "machine":
            return Machine.from_lines(lines, name=stem, source=source)
        if kind == "double-series":
            return DoubleSeries.from_lines(lines, name=stem, source=source)
        if kind == "real":
            return self._parse_real(lines, stem, source)
        if kind == "cover":
            return self._parse_cover(lines, stem, source)
        if kind == "weights":
            return self._parse_weights(lines, source)
        raise ValueError(f"Unsupported object type '{object_type}', expected one of {OBJECT_TYPES}")

    def _parse_real(self, lines: Iterable[str], stem: str, source: str) -> LscReal:
        headers: Dict[str, str] = {"kind": SEQUENCE, "name": stem}
        terms: List[Fraction] = []
        for lineno, line in _content_lines(lines):
            parts = line.split()
            key = parts[0].rstrip(":")
            try:
                if key in REAL_HEADERS:
                    if len(parts) != 2:
                        raise ValueError(f"header '{key}' takes one value")
                    headers[key] = parts[1]
                elif len(parts) == 2:
                    if int(parts[0]) != len(terms):
                        raise ValueError(f"expected term index {len(terms)}, got {parts[0]}")
                    terms.append(parse_q(parts[1]))
                elif len(parts) == 1:
                    terms.append(parse_q(parts[0]))
                else:
                    raise ValueError(f"expected '[i] num/den', got '{line}'")
            except ValueError as exc:
                raise FileFormatError(source, lineno, str(exc)) from exc
        if headers["kind"] not in KINDS:
            raise FileFormatError(source, 1, f"unknown kind '{headers['kind']}'")
        if not terms:
            raise FileFormatError(source, 1, "no terms")
        return LscReal.from_terms(
            headers["kind"],
            terms,
            known_sup=parse_q(headers["known_sup"]) if "known_sup" in headers else None,
            limit=parse_q(headers["limit"]) if "limit" in headers else None,
            name=headers["name"],
        )

    def _parse_cover(self, lines: Iterable[str], stem: str, source: str) -> Cover:
        name, budget = stem, None
        intervals: List[Interval] = []
        for lineno, line in _content_lines(lines):
            head = _header(line)
            if head is not None:
                if head[0] == "budget":
                    budget = parse_q(head[1])
                elif head[0] == "name":
                    name = head[1]
                else:
                    warnings.warn(f"{source}:{lineno}: unknown header '{head[0]}' ignored")
                continue
            parts = line.split()
            if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] not in (OPEN, CLOSED)):
                raise FileFormatError(source, lineno, f"expected 'left right [open|closed]', got '{line}'")
            try:
                intervals.append(Interval(parse_q(parts[0]), parse_q(parts[1]), parts[2] if len(parts) == 3 else OPEN))
            except ValueError as exc:
                raise FileFormatError(source, lineno, str(exc)) from exc
        return Cover.from_intervals(intervals, length_budget=budget, name=name)

    def _parse_weights(self, lines: Iterable[str], source: str) -> Dict[Fraction, Fraction]:
        weights: Dict[Fraction, Fraction] = {}
        for lineno, line in _content_lines(lines):
            parts = line.split()
            if len(parts) != 2:
                raise FileFormatError(source, lineno, f"expected 'point weight', got '{line}'")
            try:
                point, w = parse_q(parts[0]), parse_q(parts[1])
            except ValueError as exc:
                raise FileFormatError(source, lineno, str(exc)) from exc
            weights[point] = weights.get(point, Fraction(0)) + w
        return weights

    def to_txt(self, obj: Any, file_path: str, fuel: int = 0) -> None:
        """Writes a machine, double series, cover or real (``fuel`` terms) as text."""
        if isinstance(obj, (Machine, DoubleSeries)):
            lines = obj.to_lines()
        elif isinstance(obj, Cover):
            lines = [f"name: {obj.name}"] if obj.name else []
            if obj.length_budget is not None:
                lines.append(f"budget: {format_q(obj.length_budget)}")
            lines += [
                f"{format_q(iv.left)} {format_q(iv.right)} {iv.openness}"
                for iv in obj.emitted(fuel)
            ]
        elif isinstance(obj, LscReal):
            data = obj.to_dict(fuel)
            lines = [f"kind: {obj.kind}"]
            if obj.name:
                lines.append(f"name: {obj.name}")
            for key in ("limit", "known_sup"):
                if key in data:
                    lines.append(f"{key}: {data[key]}")
            lines += data["terms"]
        else:
            raise ValueError(f"Unsupported object type for TXT serialization: {type(obj)}")
        with open(file_path, "w") as f:
            f.write("\n".join(lines) + "\n")


# --- emitted documents ---
def load_schema(command: str) -> Dict[str, Any]:
    with open(os.path.join(SCHEMA_DIR, f"{command}.json"), "r") as f:
        return json.load(f)


def make_document(command: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    """
    Wrap a payload as a schema-versioned document and validate it.

    Raises:
        jsonschema.ValidationError: If the document does not match the shipped schema.
    """
    doc = {"schema": command, "schema_version": SCHEMA_VERSION}
    doc.update(payload)
    jsonschema.validate(instance=doc, schema=load_schema(command))
    return doc


def dumps(doc: Dict[str, Any]) -> str:
    """Deterministic JSON text."""
    return json.dumps(doc, indent=2, sort_keys=True)
