"""Abstract base class for the JSON file repositories.

Every repository reads and writes one :class:`SystemFile` kind.

Extending for a new kind:
    1. Add the kind to ``SystemKind``.
    2. Subclass ``BaseFileRepository``, set ``KIND`` and implement
       ``decode()`` / ``encode()`` between the payload and the domain value.

Example::

    class RelationRepository(BaseFileRepository[LinearRelation]):
        KIND = SystemKind.RELATION
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, ClassVar, Generic, TypeVar

from pydantic import ValidationError

from phbridge.core.errors import FileFormatError
from phbridge.core.kinds import SystemKind
from phbridge.core.tolerance import TolerancePolicy, default_policy
from phbridge.models.files.schemas import SystemFile

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R", bound="BaseFileRepository")


def parse_document(text: str, source: str = "<input>") -> SystemFile:
    """Validate a JSON document.

    Raises:
        FileFormatError: malformed JSON or a schema violation.
    """
    try:
        return SystemFile.model_validate_json(text)
    except ValidationError as exc:
        raise FileFormatError(f"{source}: {exc}") from exc


def read_document(path: Path) -> SystemFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    return parse_document(text, str(path))


class BaseFileRepository(ABC, Generic[T]):
    """Base class that wires a repository to one file.

    Subclasses declare:
    - ``KIND`` - the ``SystemKind`` the file must carry.
    - ``decode()`` / ``encode()`` - payload ↔ domain value.

    The ``from_path`` classmethod is the standard factory used by the CLI.
    """

    KIND: ClassVar[SystemKind]

    def __init__(self, path: Path, tol: TolerancePolicy | None = None) -> None:
        self._path = Path(path)
        self._tol = tol or default_policy()

    # ------------------------------------------------------------------
    # Factory
    # ------------------------------------------------------------------

    @classmethod
    def from_path(cls: type[R], path: Path | str, tol: TolerancePolicy | None = None) -> R:
        return cls(Path(path), tol)

    @property
    def path(self) -> Path:
        return self._path

    # ------------------------------------------------------------------
    # Codec (override in subclasses)
    # ------------------------------------------------------------------

    @abstractmethod
    def decode(self, doc: SystemFile) -> T: ...

    @abstractmethod
    def encode(self, value: T, metadata: dict[str, Any] | None = None) -> SystemFile: ...

    # ------------------------------------------------------------------
    # I/O
    # ------------------------------------------------------------------

    def load(self) -> T:
        doc = read_document(self._path)
        if doc.header.kind != self.KIND:
            raise FileFormatError(f"{self._path} holds a {doc.header.kind}, expected {self.KIND}")
        return self.decode(doc)

    def save(self, value: T, metadata: dict[str, Any] | None = None) -> SystemFile:
        doc = self.encode(value, metadata)
        self._path.write_text(doc.model_dump_json(indent=2))
        logger.debug("wrote %s to %s", self.KIND, self._path)
        return doc
