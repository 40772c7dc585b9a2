from __future__ import annotations

import hashlib
import json
import os
import typing
from contextlib import suppress
from dataclasses import dataclass
from pathlib import Path

import tomlkit
from tomlkit.exceptions import ParseError
from whenever import Instant

from ._homology import groups_from_json, groups_to_json
from ._qarith import CoeffRing

if typing.TYPE_CHECKING:
    from ._homology import HomologyGroup

SCHEMA_VERSION = 1
INDEX_NAME = "index.toml"


def code_hash(version: str | None = None) -> str:
    """First 12 hex digits of ``sha256("<version>:<schema>")``."""
    if version is None:
        from ._version import __version__ as version
    digest = hashlib.sha256(f"{version}:{SCHEMA_VERSION}".encode())
    return digest.hexdigest()[:12]


def default_cache_dir() -> Path:
    if "BRAIDQ_CACHE" in os.environ:
        return Path(os.environ["BRAIDQ_CACHE"])
    return Path.home() / ".cache" / "braidq"


def coeff_tag(coeff: CoeffRing) -> str:
    return coeff.spec.replace(":", "")


def dump_json(data: dict | list) -> str:
    """Byte-stable JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class CacheEntry:
    name: str
    n: int
    coeff: str
    size: int
    created: Instant | None = None
    seconds: float | None = None


@dataclass
class CacheStat:
    directory: Path
    entries: int
    size: int
    seconds: float
    stale: int


class ResultCache:
    """Per-degree homology results as JSON files keyed by (n, coeff, code hash).

    Only the process that owns the cache writes to it.
    """

    def __init__(self, directory: Path, *, version: str | None = None) -> None:
        self.directory = directory
        self.hash = code_hash(version)

    def ensure_writable(self) -> None:
        """Create the directory, raising ``OSError`` when it cannot be written."""
        self.directory.mkdir(parents=True, exist_ok=True)
        marker = self.directory / ".braidq-write-test"
        marker.write_text("")
        marker.unlink()

    def path_for(self, n: int, coeff: CoeffRing) -> Path:
        return self.directory / f"{coeff_tag(coeff)}-n{n:02d}-{self.hash}.json"

    def load(self, n: int, coeff: CoeffRing) -> list[HomologyGroup] | None:
        path = self.path_for(n, coeff)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            if data["n"] != n or data["coeff"] != coeff.spec:
                return None
            return groups_from_json(data)
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def store(
        self,
        n: int,
        coeff: CoeffRing,
        groups: list[HomologyGroup],
        seconds: float = 0.0,
    ) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(n, coeff)
        path.write_text(dump_json(groups_to_json(n, coeff, groups)), encoding="utf-8")

        index = self._read_index()
        entries = index.setdefault("entries", tomlkit.table())
        record = tomlkit.table()
        record["created"] = Instant.now().format_common_iso()
        record["seconds"] = round(seconds, 6)
        entries[path.name] = record
        (self.directory / INDEX_NAME).write_text(tomlkit.dumps(index), encoding="utf-8")
        return path

    def _read_index(self) -> tomlkit.TOMLDocument:
        path = self.directory / INDEX_NAME
        with suppress(OSError, ParseError):
            return tomlkit.parse(path.read_text(encoding="utf-8"))
        return tomlkit.document()

    def _files(self) -> list[Path]:
        if not self.directory.is_dir():
            return []
        return sorted(self.directory.glob("*-n*-*.json"))

    def entries(self) -> list[CacheEntry]:
        recorded = self._read_index().get("entries", {})
        out = []
        for path in self._files():
            tag, degree, _ = path.stem.split("-", 2)
            record = recorded.get(path.name, {})
            created = record.get("created")
            out.append(
                CacheEntry(
                    name=path.name,
                    n=int(degree[1:]),
                    coeff=tag.replace("fp", "fp:"),
                    size=path.stat().st_size,
                    created=Instant.parse_common_iso(str(created)) if created else None,
                    seconds=float(record["seconds"]) if "seconds" in record else None,
                )
            )
        return out

    def clear(self) -> int:
        """Remove every entry and the index; returns the number of entries removed."""
        files = self._files()
        for path in files:
            path.unlink()
        with suppress(FileNotFoundError):
            (self.directory / INDEX_NAME).unlink()
        return len(files)

    def stat(self) -> CacheStat:
        entries = self.entries()
        return CacheStat(
            directory=self.directory,
            entries=len(entries),
            size=sum(e.size for e in entries),
            seconds=sum(e.seconds or 0.0 for e in entries),
            stale=sum(not e.name.endswith(f"-{self.hash}.json") for e in entries),
        )
