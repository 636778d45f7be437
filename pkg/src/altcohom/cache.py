"""Versioned on-disk JSON cache for computed results.

The cache directory comes from the ALTCOHOM_CACHE environment variable.
Without it, or when the directory is missing, results are kept in memory
only.  Entries are content-addressed by a hash of the canonical key, carry
the schema version, and are written via a temporary file and rename so
readers never see partial files.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from typing import Any

SCHEMA_VERSION = 1
ENV_VAR = "ALTCOHOM_CACHE"

log = logging.getLogger(__name__)
_memory: dict[str, Any] = {}


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def key_digest(key: Any, version: int = SCHEMA_VERSION) -> str:
    return hashlib.sha256(canonical([version, list(key) if isinstance(key, tuple) else key]).encode()).hexdigest()


def cache_dir() -> str | None:
    path = os.environ.get(ENV_VAR)
    if path and os.path.isdir(path):
        return path
    return None


def hex_bits(v: int, nbits: int) -> str:
    """Little-endian 64-bit words, each as 16 hex digits."""
    words = max(1, (nbits + 63) // 64)
    return "".join(f"{(v >> (64 * i)) & ((1 << 64) - 1):016x}" for i in range(words))


def unhex_bits(text: str) -> int:
    v = 0
    for i in range(len(text) // 16):
        v |= int(text[16 * i : 16 * i + 16], 16) << (64 * i)
    return v


def cache_get(key: Any, version: int = SCHEMA_VERSION) -> Any | None:
    digest = key_digest(key, version)
    d = cache_dir()
    if d is None:
        return _memory.get(digest)
    path = os.path.join(d, digest + ".json")
    if not os.path.exists(path):
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError):
        log.warning("corrupt cache entry %s; it will be recomputed", path)
        return None
    if doc.get("version") != version or doc.get("key") != json.loads(canonical(key)):
        return None
    return doc.get("payload")


def cache_put(key: Any, payload: Any, version: int = SCHEMA_VERSION) -> None:
    digest = key_digest(key, version)
    d = cache_dir()
    if d is None:
        _memory[digest] = payload
        return
    doc = {"version": version, "key": json.loads(canonical(key)), "payload": payload}
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(canonical(doc))
        os.replace(tmp, os.path.join(d, digest + ".json"))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
