"""Persistent content-checked cache for bases, matrices and reports.

Layout: <root>/v<ARTIFACT_VERSION>/<key>, one file per payload with a
sha256 digest alongside.  Payloads are immutable once written; writes
are atomic (temp file + rename) under an advisory lock, readers verify
the digest.  Eviction is manual.
"""

from __future__ import annotations

import fcntl
import hashlib
import os
import tempfile
from pathlib import Path
from typing import Optional

from .bases import GradedBasis, enumerate_basis
from .graphs import GradeKey

ARTIFACT_VERSION = "1"


class CacheError(RuntimeError):
    pass


def default_root() -> Path:
    env = os.environ.get("HEDGEHOG_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "hedgehog"


class CacheStore:
    def __init__(self, root: Optional[Path] = None, enabled: bool = True):
        self.root = Path(root) if root is not None else default_root()
        self.enabled = enabled
        self.base = self.root / ("v" + ARTIFACT_VERSION)

    def _path(self, key: str) -> Path:
        p = (self.base / key).resolve()
        if self.base.resolve() not in p.parents and p != self.base.resolve():
            raise CacheError("cache key escapes the cache root: %r" % key)
        return p

    def get(self, key: str) -> Optional[bytes]:
        if not self.enabled:
            return None
        path = self._path(key)
        dig = path.with_suffix(path.suffix + ".sha256")
        if not path.exists() or not dig.exists():
            return None
        payload = path.read_bytes()
        want = dig.read_text().strip()
        got = hashlib.sha256(payload).hexdigest()
        if want != got:
            raise CacheError("cache digest mismatch for %r" % key)
        return payload

    def put(self, key: str, payload: bytes) -> None:
        if not self.enabled:
            return
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        lock_path = self.base / ".lock"
        lock_path.parent.mkdir(parents=True, exist_ok=True)
        with open(lock_path, "w") as lock:
            fcntl.flock(lock, fcntl.LOCK_EX)
            try:
                if path.exists():
                    return  # immutable: first writer wins
                fd, tmp = tempfile.mkstemp(dir=str(path.parent))
                with os.fdopen(fd, "wb") as fh:
                    fh.write(payload)
                os.replace(tmp, path)
                dig = path.with_suffix(path.suffix + ".sha256")
                fd, tmp = tempfile.mkstemp(dir=str(path.parent))
                with os.fdopen(fd, "w") as fh:
                    fh.write(hashlib.sha256(payload).hexdigest() + "\n")
                os.replace(tmp, dig)
            finally:
                fcntl.flock(lock, fcntl.LOCK_UN)


# -- basis (de)serialization -------------------------------------------------

def _flatten(encoding: str) -> str:
    return encoding.rstrip("\n").replace("\n", ";")


def _unflatten(line: str) -> str:
    return line.replace(";", "\n") + "\n"


def serialize_bases(grade_tag: str, bases: dict[int, GradedBasis]) -> str:
    """Basis family file: a header per degree, one encoding per line."""
    lines = []
    for m in sorted(bases):
        b = bases[m]
        lines.append("basis %s m=%d count=%d" % (grade_tag, m, len(b)))
        for enc in b.encodings:
            lines.append(_flatten(enc))
    return "\n".join(lines) + "\n"


def deserialize_bases(text: str, flavor: str, n: int, g: int, r: int,
                      k: int) -> dict[int, GradedBasis]:
    out: dict[int, GradedBasis] = {}
    cur_m = None
    cur: list[str] = []
    for line in text.strip("\n").split("\n"):
        if line.startswith("basis "):
            if cur_m is not None:
                out[cur_m] = GradedBasis(GradeKey(flavor, n, g, r, k, cur_m),
                                         tuple(cur))
            cur_m = int(line.split("m=")[1].split()[0])
            cur = []
        elif line:
            cur.append(_unflatten(line))
    if cur_m is not None:
        out[cur_m] = GradedBasis(GradeKey(flavor, n, g, r, k, cur_m), tuple(cur))
    return out


def basis_key(flavor: str, n: int, g: int, r: int, k: int,
              vertex_bound: Optional[int]) -> str:
    tag = "%s_n%d_g%d_r%d_k%d" % (flavor, n, g, r, k)
    if vertex_bound is not None:
        tag += "_V%d" % vertex_bound
    return "basis/%s.txt" % tag


def grade_tag(flavor: str, n: int, g: int, r: int, k: int) -> str:
    return "flavor=%s n=%d g=%d r=%d k=%d" % (flavor, n, g, r, k)


def cached_basis(store: CacheStore, flavor: str, n: int, g: int, r: int,
                 k: int, vertex_bound: Optional[int] = None) -> dict[int, GradedBasis]:
    key = basis_key(flavor, n, g, r, k, vertex_bound)
    raw = store.get(key)
    if raw is not None:
        return deserialize_bases(raw.decode(), flavor, n, g, r, k)
    bases = enumerate_basis(flavor, n, g, r, k, vertex_bound)
    store.put(key, serialize_bases(grade_tag(flavor, n, g, r, k), bases).encode())
    return bases
