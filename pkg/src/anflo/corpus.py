"""App bundle loading, the API catalog, and corpus filtering.

A bundle is a single UTF-8 text file with ``@`` sections:

    @id com.example.tripper
    @category Travel
    @description
    Plan trips, find hotels and share routes with friends.
    @program
    component Main public {
        loc = source read_gps
        sink openConnection(loc)
    }

``@id`` and ``@category`` take their value on the same line; ``@description``
and ``@program`` run until the next section header.  ``@id``, ``@description``
and ``@program`` are mandatory, ``@category`` is optional.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from . import taintir, textproc
from .taintir import ProgramIR

__all__ = [
    "Provenance",
    "AppBundle",
    "Role",
    "ApiEntry",
    "ApiCatalog",
    "CorpusFilterPolicy",
    "MalformedBundle",
    "CatalogSyntaxError",
    "DuplicateApi",
    "MissingIpcPseudoGroup",
    "load_bundle",
    "loads_bundle",
    "serialize_bundle",
    "find_bundles",
    "load_corpus",
    "load_api_catalog",
    "default_catalog_path",
    "filter_corpus",
]


class MalformedBundle(ValueError):
    pass


class CatalogSyntaxError(ValueError):
    pass


class DuplicateApi(CatalogSyntaxError):
    pass


class MissingIpcPseudoGroup(CatalogSyntaxError):
    pass


class Provenance(Enum):
    TRUSTED = "trusted"
    UNDER_ANALYSIS = "under_analysis"


@dataclass(frozen=True)
class AppBundle:
    app_id: str
    description: str
    category: str | None
    program: ProgramIR
    provenance: Provenance = Provenance.UNDER_ANALYSIS


class Role(Enum):
    SOURCE = "source"
    SINK = "sink"
    BOTH = "both"


@dataclass(frozen=True)
class ApiEntry:
    api: str
    role: Role
    permission_group: str


@dataclass(frozen=True)
class ApiCatalog:
    entries: dict[str, ApiEntry] = field(hash=False)

    def get(self, api: str) -> ApiEntry | None:
        return self.entries.get(api)

    def groups(self) -> set[str]:
        return {e.permission_group for e in self.entries.values()}

    def __len__(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------------
# Bundle parsing

_INLINE_SECTIONS = ("id", "category")
_BLOCK_SECTIONS = ("description", "program")
_SECTION_RE = re.compile(r"^@([a-z]+)(?:\s+(.*))?$")


def loads_bundle(text: str, provenance: Provenance = Provenance.UNDER_ANALYSIS,
                 origin: str = "<string>") -> AppBundle:
    """Parse bundle text.  Raises MalformedBundle on structural problems,
    including IR errors from the @program section."""
    sections: dict[str, str] = {}
    block: str | None = None
    block_lines: list[str] = []

    def close_block() -> None:
        nonlocal block
        if block is not None:
            sections[block] = "\n".join(block_lines).strip("\n")
            block = None
            block_lines.clear()

    for line_no, raw in enumerate(text.splitlines(), 1):
        m = _SECTION_RE.match(raw)
        if m:
            name, value = m.group(1), m.group(2)
            if name in sections or name == block:
                raise MalformedBundle(f"{origin}:{line_no}: duplicate @{name} section")
            close_block()
            if name in _INLINE_SECTIONS:
                if value is None or not value.strip():
                    raise MalformedBundle(f"{origin}:{line_no}: @{name} needs a value")
                sections[name] = value.strip()
            elif name in _BLOCK_SECTIONS:
                if value is not None and value.strip():
                    raise MalformedBundle(f"{origin}:{line_no}: @{name} takes no inline value")
                block = name
            else:
                raise MalformedBundle(f"{origin}:{line_no}: unknown section @{name}")
        else:
            if block is None:
                if raw.strip():
                    raise MalformedBundle(f"{origin}:{line_no}: content outside any section")
            else:
                block_lines.append(raw)
    close_block()

    for required in ("id", "description", "program"):
        if required not in sections:
            raise MalformedBundle(f"{origin}: missing @{required} section")

    try:
        program = taintir.parse_program(sections["program"])
    except taintir.IrSyntaxError as exc:
        raise MalformedBundle(f"{origin}: bad @program: {exc}") from exc

    return AppBundle(
        app_id=sections["id"],
        description=sections["description"].strip(),
        category=sections.get("category"),
        program=program,
        provenance=provenance,
    )


def load_bundle(path, provenance: Provenance = Provenance.UNDER_ANALYSIS) -> AppBundle:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedBundle(f"{path}: {exc}") from exc
    return loads_bundle(text, provenance, origin=str(path))


def serialize_bundle(bundle: AppBundle) -> str:
    """Canonical text form; loads_bundle(serialize_bundle(b)) == b."""
    if any(line.lstrip().startswith("@") for line in bundle.description.splitlines()):
        raise ValueError("description lines may not start with '@'")
    parts = [f"@id {bundle.app_id}"]
    if bundle.category is not None:
        parts.append(f"@category {bundle.category}")
    parts.append("@description")
    parts.append(bundle.description.strip())
    parts.append("@program")
    parts.append(taintir.serialize_program(bundle.program).rstrip("\n"))
    return "\n".join(parts) + "\n"


def find_bundles(directory) -> list[Path]:
    """All *.app files under a directory, sorted by path for determinism."""
    root = Path(directory)
    return sorted(root.rglob("*.app"), key=lambda p: p.as_posix())


def load_corpus(directory, provenance: Provenance = Provenance.TRUSTED) -> list[AppBundle]:
    bundles = [load_bundle(p, provenance) for p in find_bundles(directory)]
    seen: set[str] = set()
    for b in bundles:
        if b.app_id in seen:
            raise MalformedBundle(f"duplicate app id {b.app_id!r} in corpus {directory}")
        seen.add(b.app_id)
    return bundles


# ---------------------------------------------------------------------------
# API catalog

_CATALOG_RE = re.compile(
    r"^(?P<api>\S+)\s*->\s*(?P<role>source|sink|both)\s+(?P<group>\S+)$"
)


def load_api_catalog(path) -> ApiCatalog:
    """Parse ``<api> -> <role> <Group>`` lines ('#' comments allowed).

    Raises CatalogSyntaxError on malformed lines, DuplicateApi on repeated
    API names and MissingIpcPseudoGroup unless the IPC pseudo-group is
    present with role both.
    """
    entries: dict[str, ApiEntry] = {}
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = _CATALOG_RE.match(line)
            if not m:
                raise CatalogSyntaxError(f"{path}:{line_no}: expected '<api> -> <role> <Group>'")
            api = m.group("api")
            if api in entries:
                raise DuplicateApi(f"{path}:{line_no}: duplicate api {api!r}")
            entries[api] = ApiEntry(api, Role(m.group("role")), m.group("group"))

    ipc = [e for e in entries.values() if e.permission_group == taintir.IPC_GROUP]
    if not ipc or any(e.role is not Role.BOTH for e in ipc):
        raise MissingIpcPseudoGroup(
            f"{path}: catalog must define the {taintir.IPC_GROUP} pseudo-group with role both"
        )
    return ApiCatalog(entries)


def default_catalog_path() -> Path:
    """Path of the packaged default catalog."""
    from importlib import resources

    ref = resources.files("anflo.data").joinpath("api_catalog.txt")
    with resources.as_file(ref) as path:
        return Path(path)


# ---------------------------------------------------------------------------
# Corpus filtering


@dataclass(frozen=True)
class CorpusFilterPolicy:
    """Admission rules applied to descriptions before topic analysis."""

    min_description_words: int = 10
    require_english: bool = True
    english_threshold: float = textproc.DEFAULT_ENGLISH_THRESHOLD

    def __post_init__(self):
        if self.min_description_words < 0:
            raise ValueError("min_description_words must be >= 0")
        if not 0.0 <= self.english_threshold <= 1.0:
            raise ValueError("english_threshold must be in [0, 1]")


def filter_corpus(
    bundles: Sequence[AppBundle],
    policy: CorpusFilterPolicy,
    stopwords: frozenset[str] | None = None,
) -> tuple[list[AppBundle], list[tuple[str, str]]]:
    """Split bundles into (kept, rejected); rejected entries are
    (app_id, reason) with reason in {"non_english", "too_short"}.

    The word count is over whitespace-separated raw words, the English
    check over the stopword hit ratio of alphanumeric tokens.
    """
    if stopwords is None:
        stopwords = textproc.default_stopwords()
    kept: list[AppBundle] = []
    rejected: list[tuple[str, str]] = []
    for bundle in bundles:
        if policy.require_english and not textproc.detect_english(
            bundle.description, stopwords, policy.english_threshold
        ):
            rejected.append((bundle.app_id, "non_english"))
        elif len(bundle.description.split()) < policy.min_description_words:
            rejected.append((bundle.app_id, "too_short"))
        else:
            kept.append(bundle)
    return kept, rejected
