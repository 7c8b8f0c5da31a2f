"""Line-oriented persistence for count tables.

A file holds one table::

    l;p1,...,pl;Kind;K
    i_lo,i_hi,count
    ...

Counts are decimal strings, so any size round-trips exactly.  Writes go to a
temporary file in the same directory followed by an atomic rename, which
makes concurrent writers to one cache directory safe.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .antichains import CountKind, CountTable
from .errors import CacheFormatError, FingerprintError
from .lattice import PrimeBasis, first_primes

CACHE_ENV = "PRIMBOUNDS_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "primbounds"


def dumps(table: CountTable) -> str:
    lines = [f"{table.basis.fingerprint()};{table.kind.name};{table.K}"]
    lines += [f"{lo},{hi},{c}" for lo, hi, c in table.rows]
    return "\n".join(lines) + "\n"


def _int(tok: str, what: str) -> int:
    tok = tok.strip()
    if not tok.isdigit():
        raise CacheFormatError(f"{what} is not a nonnegative decimal integer: {tok!r}")
    return int(tok)


def loads(text: str, basis: PrimeBasis | None = None,
          kind: CountKind | None = None) -> CountTable:
    """Parse a table, refusing it if it belongs to another basis or kind."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CacheFormatError("empty cache file")
    head = lines[0].split(";")
    if len(head) != 4:
        raise CacheFormatError(f"bad header {lines[0]!r}")
    l = _int(head[0], "l")
    primes = tuple(_int(p, "prime") for p in head[1].split(",")) if head[1] else ()
    try:
        got_kind = CountKind[head[2].strip()]
    except KeyError:
        raise CacheFormatError(f"unknown count kind {head[2]!r}") from None
    K = _int(head[3], "K")
    got_basis = first_primes(l)
    if got_basis.primes != primes:
        raise FingerprintError(f"header primes {primes} are not the first {l} primes")
    if basis is not None and basis != got_basis:
        raise FingerprintError(
            f"cached table is for {got_basis.fingerprint()}, wanted {basis.fingerprint()}")
    if kind is not None and kind is not got_kind:
        raise FingerprintError(f"cached table is {got_kind.name}, wanted {kind.name}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 3:
            raise CacheFormatError(f"bad row {ln!r}")
        rows.append((_int(parts[0], "i_lo"), _int(parts[1], "i_hi"), _int(parts[2], "count")))
    try:
        return CountTable(got_basis, got_kind, K, tuple(rows))
    except ValueError as exc:
        raise CacheFormatError(str(exc)) from None


def cache_store(path: str | os.PathLike, table: CountTable) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write(dumps(table))
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    return path


def cache_load(path: str | os.PathLike, basis: PrimeBasis | None = None,
               kind: CountKind | None = None) -> CountTable:
    return loads(Path(path).read_text(encoding="ascii"), basis, kind)


class TableStore:
    """A directory of tables, one file per (l, kind), keeping the largest K."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def path(self, basis: PrimeBasis, kind: CountKind) -> Path:
        return self.directory / f"l{basis.l}_{kind.name}.tbl"

    def load(self, basis: PrimeBasis, kind: CountKind) -> CountTable | None:
        p = self.path(basis, kind)
        if not p.exists():
            return None
        return cache_load(p, basis, kind)

    def save(self, table: CountTable) -> None:
        have = self.load(table.basis, table.kind)
        if have is not None and have.K >= table.K:
            return
        cache_store(self.path(table.basis, table.kind), table)
