"""Persistent cache of expensive high-precision constants.

One JSON file per constant name holds the most precise value computed so far.
Writes go to a temporary file in the same directory followed by os.replace,
so readers see either the previous entry or the new one. Writers serialize
on an flock'ed lock file carrying the holder's PID.
"""
import fcntl
import json
import logging
import os
import tempfile
import threading
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import psutil

from .exceptions import CacheError

logger = logging.getLogger('banana')

CACHE_DIR = Path(os.environ.get('BANANA_CACHE_DIR', '.cache'))

# Bump when a constant's algorithm changes so stale values are ignored.
ALGORITHM_VERSION = 1

LOCK_TIMEOUT = 30.0
LOCK_POLL_INTERVAL = 0.05

# Extra digits requested beyond decimal_digits when consulting the cache.
REQUEST_MARGIN = 5


def make_key(name: str, digits: int) -> str:
    return f"{name}@{digits}"


def parse_key(key: str) -> Tuple[str, int]:
    name, sep, digits = key.rpartition('@')
    if not sep or not name or not digits.isdigit():
        raise CacheError("Cache keys look like name@digits", {'key': key})
    return name, int(digits)


@dataclass
class CacheEntry:
    name: str
    digits: int
    value: str
    algorithm_version: int = ALGORITHM_VERSION
    created_at: str = field(default_factory=lambda: datetime.now().isoformat())
    pid: int = field(default_factory=os.getpid)

    @property
    def key(self) -> str:
        return make_key(self.name, self.digits)

    def satisfies(self, digits: int) -> bool:
        return self.algorithm_version == ALGORITHM_VERSION and self.digits >= digits


def _is_process_running(pid: int) -> bool:
    """Check if a process is actually running (not zombie/dead)."""
    try:
        process = psutil.Process(pid)
        return psutil.pid_exists(pid) and process.status() not in (
            psutil.STATUS_DEAD, psutil.STATUS_ZOMBIE
        )
    except (psutil.NoSuchProcess, psutil.AccessDenied, psutil.Error):
        return False


class ConstantCache:
    """Directory-backed constant store with atomic replace and a single writer."""

    def __init__(self, cache_dir: Path = CACHE_DIR):
        self.cache_dir = Path(cache_dir)
        self.constants_dir = self.cache_dir / 'constants'
        self.lock_file = self.cache_dir / 'cache.lock'
        try:
            self.constants_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise CacheError(f"Cannot create cache directory: {e}", {'cache_dir': str(self.cache_dir)})
        self._thread_lock = threading.Lock()

    def __repr__(self):
        return f"ConstantCache({str(self.cache_dir)!r})"

    def _path(self, name: str) -> Path:
        return self.constants_dir / f"{name}.v{ALGORITHM_VERSION}.json"

    def _read(self, name: str) -> Optional[CacheEntry]:
        path = self._path(name)
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text())
            entry = CacheEntry(**data)
            if entry.name != name or not isinstance(entry.digits, int):
                raise ValueError("entry does not match its file name")
            return entry
        except (ValueError, TypeError, OSError) as e:
            logger.warning(f"Corrupt cache entry {path.name}, discarding: {e}")
            path.unlink(missing_ok=True)
            return None

    def get(self, key: str) -> Optional[CacheEntry]:
        """Entry for name@digits holding at least that many digits, or None."""
        name, digits = parse_key(key)
        entry = self._read(name)
        if entry is None or not entry.satisfies(digits):
            logger.debug(f"Cache miss for {key}")
            return None
        logger.debug(f"Cache hit for {key} ({entry.digits} digits stored)")
        return entry

    def put(self, entry: CacheEntry) -> bool:
        """Store entry unless an equally precise one exists; returns True if written."""
        with self._writer_lock():
            existing = self._read(entry.name)
            if existing is not None and existing.satisfies(entry.digits):
                return False
            fd, tmp = tempfile.mkstemp(dir=str(self.constants_dir), prefix=f".{entry.name}.", suffix='.tmp')
            try:
                with os.fdopen(fd, 'w') as f:
                    json.dump(asdict(entry), f)
                    f.flush()
                    os.fsync(f.fileno())
                os.replace(tmp, self._path(entry.name))
            except OSError as e:
                Path(tmp).unlink(missing_ok=True)
                raise CacheError(f"Cannot write cache entry: {e}", {'key': entry.key})
        logger.info(f"Cached {entry.key}")
        return True

    @contextmanager
    def _writer_lock(self):
        """Exclusive flock on the lock file; waits up to LOCK_TIMEOUT seconds."""
        with self._thread_lock:
            fd = open(self.lock_file, 'a+')
            try:
                deadline = time.monotonic() + LOCK_TIMEOUT
                warned = False
                while True:
                    try:
                        fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
                        break
                    except BlockingIOError:
                        holder = self._lock_holder()
                        if holder is not None and not warned and not _is_process_running(holder):
                            logger.warning(f"Cache lock held by stale PID {holder}, waiting for release")
                            warned = True
                        if time.monotonic() > deadline:
                            raise CacheError("Timed out waiting for the cache lock",
                                             {'holder': holder, 'lock_file': str(self.lock_file)})
                        time.sleep(LOCK_POLL_INTERVAL)
                fd.seek(0)
                fd.truncate()
                fd.write(str(os.getpid()))
                fd.flush()
                yield
            finally:
                try:
                    fcntl.flock(fd, fcntl.LOCK_UN)
                finally:
                    fd.close()

    def _lock_holder(self) -> Optional[int]:
        try:
            return int(self.lock_file.read_text().strip())
        except (ValueError, OSError):
            return None

    def entries(self) -> List[CacheEntry]:
        result = []
        for path in sorted(self.constants_dir.glob(f"*.v{ALGORITHM_VERSION}.json")):
            entry = self._read(path.name[:-len(f".v{ALGORITHM_VERSION}.json")])
            if entry is not None:
                result.append(entry)
        return result

    def stat(self) -> Dict:
        entries = self.entries()
        files = list(self.constants_dir.glob('*.json'))
        return {
            'cache_dir': str(self.cache_dir),
            'algorithm_version': ALGORITHM_VERSION,
            'entries': len(entries),
            'stale_files': len(files) - len(entries),
            'bytes': sum(p.stat().st_size for p in files),
            'constants': {e.name: e.digits for e in entries},
        }

    def clear(self) -> int:
        removed = 0
        with self._writer_lock():
            for path in self.constants_dir.glob('*.json'):
                path.unlink(missing_ok=True)
                removed += 1
        logger.info(f"Cleared {removed} cache files from {self.cache_dir}")
        return removed


_active_lock = threading.Lock()
_active: Optional[ConstantCache] = None


def set_active_cache(cache: Optional[ConstantCache]) -> Optional[ConstantCache]:
    """Install the cache consulted by cached_constant; returns the previous one."""
    global _active
    with _active_lock:
        previous, _active = _active, cache
    return previous


def get_active_cache() -> Optional[ConstantCache]:
    return _active


def _accurate_digits(ball) -> int:
    mp = ball.ctx.mp
    if ball.rad == 0 or ball.mid == 0:
        return ball.ctx.working_digits
    return max(0, int(mp.floor(-mp.log10(ball.rad / abs(ball.mid)))))


def cached_constant(name: str, ctx, compute: Callable):
    """Value of a real constant from the active cache, computing and storing it on a miss."""
    cache = get_active_cache()
    if cache is None:
        return compute()
    requested = ctx.decimal_digits + REQUEST_MARGIN
    entry = cache.get(make_key(name, requested))
    if entry is not None:
        value = ctx.mp.mpf(entry.value)
        return ctx.ball(value, ctx.mp.mpf(10) ** (-entry.digits) * abs(value) + ctx.eps * abs(value))
    value = compute()
    digits = min(_accurate_digits(value), ctx.working_digits)
    if digits >= requested:
        cache.put(CacheEntry(name, digits, ctx.mp.nstr(value.mid, digits + 3, strip_zeros=False)))
    else:
        logger.debug(f"{name} only accurate to {digits} digits, not cached")
    return value
