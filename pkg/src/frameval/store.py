"""File-backed persistence for rubrics and assessments.

One JSON file per assessment. Writers take an advisory lock and replace the
file atomically, so readers always see a complete document. Version tokens
are content hashes of the canonical bytes: equal tokens means equal
contents, and a token changes exactly when a committed write changes the
document.
"""
from __future__ import annotations

import hashlib
import os
import tempfile
from contextlib import contextmanager
from importlib import resources
from pathlib import Path

from .assessment import Assessment, parse_assessment, serialize_assessment
from .rubric import Rubric, parse_rubric

try:
    import fcntl
except ImportError:  # non-POSIX: locking degrades to atomic replace only
    fcntl = None  # type: ignore[assignment]

RUBRIC_FILENAME = "rubric.json"
ASSESSMENTS_DIRNAME = "assessments"


class StoreError(Exception):
    pass


def version_token(document: str | bytes) -> str:
    data = document.encode("utf-8") if isinstance(document, str) else document
    return hashlib.sha256(data).hexdigest()


def assessment_token(assessment: Assessment) -> str:
    return version_token(serialize_assessment(assessment))


def slugify(name: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in name.strip().lower()).strip("_")


class AssessmentStore:
    """Directory of assessment files plus one rubric file."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.assessments_dir = self.directory / ASSESSMENTS_DIRNAME
        if not self.directory.is_dir():
            raise StoreError(f"not a directory: {self.directory}")

    # -- rubric ---------------------------------------------------------

    @property
    def rubric_path(self) -> Path:
        return self.directory / RUBRIC_FILENAME

    def load_rubric(self) -> Rubric:
        try:
            text = self.rubric_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreError(f"cannot read rubric: {exc}") from exc
        return parse_rubric(text)

    # -- assessments ----------------------------------------------------

    def _path(self, slug: str) -> Path:
        if not slug or any(sep in slug for sep in ("/", "\\", "..")):
            raise StoreError(f"invalid assessment id {slug!r}")
        return self.assessments_dir / f"{slug}.json"

    def list_ids(self) -> list[str]:
        if not self.assessments_dir.is_dir():
            return []
        return sorted(p.stem for p in self.assessments_dir.glob("*.json"))

    def exists(self, slug: str) -> bool:
        return self._path(slug).is_file()

    def read_bytes(self, slug: str) -> bytes:
        path = self._path(slug)
        try:
            return path.read_bytes()
        except FileNotFoundError:
            raise StoreError(f"no assessment {slug!r}") from None

    def load(self, slug: str, rubric: Rubric | None = None) -> tuple[Assessment, str]:
        """Returns the assessment and its version token."""
        data = self.read_bytes(slug)
        return parse_assessment(data.decode("utf-8"), rubric), version_token(data)

    @contextmanager
    def _write_lock(self, slug: str):
        self.assessments_dir.mkdir(parents=True, exist_ok=True)
        lock_path = self.assessments_dir / f".{slug}.lock"
        with open(lock_path, "w") as lock_file:
            if fcntl is not None:
                fcntl.flock(lock_file, fcntl.LOCK_EX)
            try:
                yield
            finally:
                if fcntl is not None:
                    fcntl.flock(lock_file, fcntl.LOCK_UN)

    def save(self, slug: str, assessment: Assessment) -> str:
        """Atomically persist; returns the new version token."""
        document = serialize_assessment(assessment)
        path = self._path(slug)
        with self._write_lock(slug):
            fd, tmp_name = tempfile.mkstemp(
                dir=str(self.assessments_dir), prefix=f".{slug}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(document)
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(tmp_name, path)
            except BaseException:
                try:
                    os.unlink(tmp_name)
                except OSError:
                    pass
                raise
        return version_token(document)

    def replace_if(self, slug: str, assessment: Assessment, expected_token: str) -> str:
        """Compare-and-swap on the version token. Raises TokenMismatch."""
        with self._write_lock(slug):
            current = version_token(self.read_bytes(slug))
            if current != expected_token:
                raise TokenMismatch(expected=expected_token, actual=current)
            document = serialize_assessment(assessment)
            path = self._path(slug)
            fd, tmp_name = tempfile.mkstemp(
                dir=str(self.assessments_dir), prefix=f".{slug}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(document)
                    handle.flush()
                    os.fsync(handle.fileno())
                os.replace(tmp_name, path)
            except BaseException:
                try:
                    os.unlink(tmp_name)
                except OSError:
                    pass
                raise
            return version_token(document)


class TokenMismatch(StoreError):
    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual
        super().__init__("version token mismatch: document changed since it was read")


# --- bundled dataset ---------------------------------------------------------

def bundled_data_path() -> Path:
    return Path(str(resources.files("frameval").joinpath("data")))


def load_bundled_rubric() -> Rubric:
    text = resources.files("frameval").joinpath("data", RUBRIC_FILENAME).read_text(encoding="utf-8")
    return parse_rubric(text)


def load_bundled_assessments(rubric: Rubric | None = None) -> dict[str, Assessment]:
    base = resources.files("frameval").joinpath("data", ASSESSMENTS_DIRNAME)
    out: dict[str, Assessment] = {}
    for entry in sorted(base.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            out[entry.name[:-5]] = parse_assessment(entry.read_text(encoding="utf-8"), rubric)
    return out
