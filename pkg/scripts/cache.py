"""Content-addressed cache for expensive results (dimensions, kernels, characters).

Each entry is a JSON file named by the SHA-256 digest of the canonical JSON
of (module, operation, arguments). The file embeds the digest of its own
payload; anything unreadable or mismatched is logged, deleted and recomputed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any, Callable

log = logging.getLogger("pgl2_invariants.cache")

FORMAT_VERSION = 1


def canonical_json_bytes(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, ensure_ascii=True, separators=(",", ":")).encode("utf-8")


def sha256_bytes(b: bytes) -> str:
    return hashlib.sha256(b).hexdigest()


class ResultCache:
    """JSON results on disk keyed by what produced them.

    A disabled cache computes every value and stores nothing.
    """

    def __init__(self, directory: str | Path | None, enabled: bool = True):
        self.enabled = enabled and directory is not None
        self.directory = Path(directory).expanduser() if directory is not None else None
        self.hits = 0
        self.misses = 0
        if self.enabled:
            self.directory.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(module: str, operation: str, arguments: dict) -> str:
        return sha256_bytes(canonical_json_bytes(
            {"v": FORMAT_VERSION, "module": module, "operation": operation, "args": arguments}))

    def _path(self, key: str) -> Path:
        return self.directory / key[:2] / f"{key}.json"

    def get(self, module: str, operation: str, arguments: dict) -> Any | None:
        """Cached payload, or None on a miss or a corrupt entry."""
        if not self.enabled:
            return None
        path = self._path(self.key(module, operation, arguments))
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
            payload = entry["payload"]
            if entry.get("checksum") != sha256_bytes(canonical_json_bytes(payload)):
                raise ValueError("checksum mismatch")
        except (OSError, ValueError, KeyError, TypeError) as e:
            log.warning("discarding corrupt cache entry %s: %s", path.name, e)
            try:
                path.unlink()
            except OSError:
                pass
            return None
        log.debug("cache hit %s.%s %s", module, operation, arguments)
        return payload

    def put(self, module: str, operation: str, arguments: dict, payload: Any) -> None:
        if not self.enabled:
            return
        path = self._path(self.key(module, operation, arguments))
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "module": module,
            "operation": operation,
            "args": arguments,
            "checksum": sha256_bytes(canonical_json_bytes(payload)),
            "payload": payload,
        }
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(json.dumps(entry, sort_keys=True), encoding="utf-8")
        os.replace(tmp, path)

    def fetch(self, module: str, operation: str, arguments: dict,
              compute: Callable[[], Any]) -> Any:
        """Cached payload if present, else ``compute()`` stored and returned.

        ``compute`` must return JSON-serializable data.
        """
        payload = self.get(module, operation, arguments)
        if payload is not None:
            self.hits += 1
            return payload
        self.misses += 1
        payload = compute()
        self.put(module, operation, arguments, payload)
        return payload

    def clear(self) -> int:
        """Delete every entry; returns the number removed."""
        if not self.enabled or not self.directory.exists():
            return 0
        removed = 0
        for path in self.directory.glob("*/*.json"):
            path.unlink()
            removed += 1
        return removed
