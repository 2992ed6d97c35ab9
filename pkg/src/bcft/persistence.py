"""Deterministic on-disk cache and canonical interchange documents.

Every computed object serializes to a structured document carrying a
mandatory format-version field.  Documents render to canonical text
(sorted keys, exact integers, fractions as "p/q" strings, decimals at
fixed precision) so that identical computations produce byte-identical
artifacts.  The cache keeps one document per content key in
``<root>/<first two hash chars>/<key>.json``; writes go through an
atomic rename, and reading a version this build does not understand
raises MigrationError instead of silently reinterpreting the data.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .characters import (
    QSERIES_DOCUMENT_FORMAT,
    QSeries,
    qseries_document,
    qseries_from_document,
)
from .errors import DocumentFormatError, MigrationError
from .fusion import (
    FUSION_DOCUMENT_FORMAT,
    FusionRing,
    fusion_document,
    fusion_from_document,
)
from .invariants import (
    INVARIANT_DOCUMENT_FORMAT,
    ModularInvariant,
    invariant_document,
    invariant_from_document,
)
from .modular_data import (
    MODEL_DOCUMENT_FORMAT,
    ModularData,
    load_model,
    model_to_document,
)
from .nimreps import Nimrep, nimrep_document, nimrep_from_document

ARTIFACT_VERSION = "0.1.0"
CACHE_DOCUMENT_FORMAT = "bcft-cache/1"

# formats whose documents decode back to a domain object
_LOADERS = {
    MODEL_DOCUMENT_FORMAT: load_model,
    FUSION_DOCUMENT_FORMAT: fusion_from_document,
    INVARIANT_DOCUMENT_FORMAT: invariant_from_document,
    "bcft-nimrep/1": nimrep_from_document,
    QSERIES_DOCUMENT_FORMAT: qseries_from_document,
}

# report-style formats that stay plain documents on both sides
_PASSTHROUGH = {
    "bcft-index/1",
    "bcft-report/1",
    "bcft-annulus/1",
    "bcft-characters/1",
    "bcft-check/1",
    "bcft-verify/1",
    "bcft-model-list/1",
    "bcft-invariant-list/1",
    "bcft-nimrep-list/1",
    CACHE_DOCUMENT_FORMAT,
}

_CURRENT_VERSIONS = {
    fmt.partition("/")[0]: fmt.partition("/")[2]
    for fmt in list(_LOADERS) + sorted(_PASSTHROUGH)
}


def serialize(obj) -> dict:
    """Canonical document for a domain object; documents pass through."""
    if isinstance(obj, ModularData):
        return model_to_document(obj)
    if isinstance(obj, FusionRing):
        return fusion_document(obj)
    if isinstance(obj, ModularInvariant):
        return invariant_document(obj)
    if isinstance(obj, Nimrep):
        return nimrep_document(obj)
    if isinstance(obj, QSeries):
        return qseries_document(obj)
    if isinstance(obj, dict) and "format" in obj:
        return obj
    raise TypeError("no canonical document for %s" % type(obj).__name__)


def deserialize(doc: dict):
    """Inverse of serialize.

    Domain-type documents come back as objects; report documents come
    back unchanged.  A known document family at an unknown version is a
    MigrationError, an unknown family is a DocumentFormatError.
    """
    if not isinstance(doc, dict) or "format" not in doc:
        raise DocumentFormatError("document must be a mapping with a format field")
    fmt = str(doc["format"])
    loader = _LOADERS.get(fmt)
    if loader is not None:
        return loader(doc)
    if fmt in _PASSTHROUGH:
        return doc
    name, _, version = fmt.partition("/")
    if name in _CURRENT_VERSIONS:
        raise MigrationError(
            "document format %r is version %r of %r; this build reads version %r"
            % (fmt, version, name, _CURRENT_VERSIONS[name])
        )
    raise DocumentFormatError("unknown document format %r" % fmt)


def canonical_json(doc) -> str:
    """The one deterministic text rendering used for hashing and files."""
    return json.dumps(
        doc, sort_keys=True, indent=1, separators=(",", ": "), ensure_ascii=False
    )


def cache_key(
    operation: str,
    inputs,
    precision: int | None = None,
    order: int | None = None,
) -> str:
    """Content hash of (operation, canonical inputs, precision, order)."""
    material = {
        "operation": operation,
        "inputs": inputs,
        "precision": precision,
        "order": order,
    }
    return hashlib.sha256(canonical_json(material).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    key: str
    payload: dict
    meta: dict


def make_entry(
    operation: str,
    inputs,
    result,
    precision: int | None = None,
    order: int | None = None,
) -> CacheEntry:
    return CacheEntry(
        key=cache_key(operation, inputs, precision, order),
        payload=serialize(result),
        meta={
            "artifact": ARTIFACT_VERSION,
            "operation": operation,
            "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        },
    )


class Cache:
    """Content-addressed document store under one directory.

    Concurrent reads are safe; each write lands via atomic rename, so a
    reader never sees a torn file.  Two writers racing on the same key
    write identical payloads (keys are content hashes of the inputs and
    results are deterministic), so last-writer-wins is harmless.
    """

    def __init__(self, root):
        self.root = Path(root)

    def path_for(self, key: str) -> Path:
        return self.root / key[:2] / (key + ".json")

    def store(self, entry: CacheEntry) -> str:
        wrapper = {
            "format": CACHE_DOCUMENT_FORMAT,
            "key": entry.key,
            "meta": entry.meta,
            "payload": entry.payload,
        }
        path = self.path_for(entry.key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(canonical_json(wrapper))
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
        return entry.key

    def load(self, key: str):
        """The stored payload document, or None on a miss."""
        path = self.path_for(key)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        wrapper = json.loads(text)
        fmt = wrapper.get("format")
        if fmt != CACHE_DOCUMENT_FORMAT:
            raise MigrationError(
                "cache file %s has format %r; this build reads %r"
                % (path, fmt, CACHE_DOCUMENT_FORMAT)
            )
        if wrapper.get("key") != key:
            raise DocumentFormatError(
                "cache file %s records key %r" % (path, wrapper.get("key"))
            )
        return wrapper["payload"]


def _text_lines(value, indent: int, out: list):
    pad = "  " * indent
    if isinstance(value, dict):
        for k in value:
            v = value[k]
            if isinstance(v, (dict, list)):
                out.append("%s%s:" % (pad, k))
                _text_lines(v, indent + 1, out)
            else:
                out.append("%s%s: %s" % (pad, k, v))
    elif isinstance(value, list):
        if all(not isinstance(x, (dict, list)) for x in value):
            out.append("%s[%s]" % (pad, ", ".join(str(x) for x in value)))
        else:
            for x in value:
                _text_lines(x, indent, out)
    else:
        out.append("%s%s" % (pad, value))


def export(obj, format: str = "structured") -> str:
    """Render an object or document for output.

    "structured" is the canonical JSON text; "text" is a plain indented
    listing of the same content.
    """
    doc = serialize(obj)
    if format == "structured":
        return canonical_json(doc) + "\n"
    if format == "text":
        lines: list = []
        _text_lines(doc, 0, lines)
        return "\n".join(lines) + "\n"
    raise ValueError("unknown export format %r" % format)
