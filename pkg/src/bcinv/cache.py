"""Plain-text cache for computed class data.

One file per (field, bound, artifact kind), versioned and checksummed so a
stale or tampered entry reads as a miss, never as wrong data.  Writes go
through a temp file and an atomic replace; concurrent writers are safe and
the last one wins.
"""

from __future__ import annotations

import hashlib
import os
import re
import tempfile
from pathlib import Path

from .exact_algebra import IntMatrix, Lattice
from .fields import FieldSpec

CACHE_ENV = "BCINV_CACHE_DIR"
FORMAT_VERSION = 1
_MAGIC = "bcinv-cache"


def cache_root(explicit: str | os.PathLike | None = None) -> Path:
    """Resolve the cache directory: explicit argument, env var, or a default."""
    if explicit is not None:
        return Path(explicit)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    xdg = os.environ.get("XDG_CACHE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".cache"
    return base / "bcinv"


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._()-]+", "_", text)


def entry_path(root: Path, field: FieldSpec, bound: int, kind: str) -> Path:
    return Path(root) / f"{_slug(field.canonical_id)}.{bound}.{_slug(kind)}.txt"


def _checksum(payload: str) -> str:
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def save_entry(root, field: FieldSpec, bound: int, kind: str, lines) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    payload = "\n".join(lines)
    content = (
        f"{_MAGIC} {FORMAT_VERSION}\n"
        f"field {field.canonical_id}\n"
        f"bound {bound}\n"
        f"kind {kind}\n"
        f"checksum {_checksum(payload)}\n"
        "---\n" + payload + "\n"
    )
    path = entry_path(root, field, bound, kind)
    fd, tmp = tempfile.mkstemp(dir=root, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(content)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return path


def load_entry(root, field: FieldSpec, bound: int, kind: str):
    """The cached payload lines, or None on any kind of miss.

    Version drift, key mismatch, and checksum failure all read as misses;
    the caller recomputes and overwrites.
    """
    path = entry_path(Path(root), field, bound, kind)
    try:
        content = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError):
        return None
    head, sep, payload = content.partition("\n---\n")
    if not sep or not payload.endswith("\n"):
        return None
    payload = payload[:-1]
    header: dict[str, str] = {}
    for line in head.split("\n"):
        key, _, value = line.partition(" ")
        header[key] = value
    if header.get(_MAGIC) != str(FORMAT_VERSION):
        return None
    if header.get("field") != field.canonical_id:
        return None
    if header.get("bound") != str(bound) or header.get("kind") != kind:
        return None
    if header.get("checksum") != _checksum(payload):
        return None
    return payload.split("\n") if payload else []


def lattice_lines(lat: Lattice) -> list[str]:
    out = [f"ambient {lat.ambient_rank}"]
    for row in lat.basis.entries:
        out.append("row " + " ".join(str(x) for x in row))
    return out


def lattice_from_lines(lines) -> Lattice:
    it = iter(lines)
    first = next(it)
    tag, _, rank_text = first.partition(" ")
    if tag != "ambient":
        raise ValueError(f"expected an ambient line, got {first!r}")
    ambient = int(rank_text)
    rows = []
    for line in it:
        tag, _, rest = line.partition(" ")
        if tag != "row":
            raise ValueError(f"expected a row line, got {line!r}")
        rows.append(tuple(int(x) for x in rest.split()))
    return Lattice(ambient, IntMatrix(tuple(rows), cols=ambient))
