"""Sensitive-entity detection and deterministic pseudonymization.

Detection covers machine-recognizable entity shapes (mentions, emails, phone
numbers, IBAN-like account strings). Proper nouns cannot be detected reliably
by pattern alone, so they enter as externally supplied entities and must come
with an explicit replacement.

All generated replacements are pure functions of (salt, surface), so repeated
occurrences of one surface map to one pseudonym and reruns are byte-identical.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

import re

from .model import Span, remap_span

_ALNUM = "abcdefghijklmnopqrstuvwxyz0123456789"
_LOWER = "abcdefghijklmnopqrstuvwxyz"
_UPPER = _LOWER.upper()
_DIGITS = "0123456789"


class EntityKind(Enum):
    MENTION = "MENTION"
    EMAIL = "EMAIL"
    PHONE = "PHONE"
    BANK = "BANK"
    PROPER_NOUN = "PROPER_NOUN"


@dataclass(frozen=True)
class SensitiveEntity:
    kind: EntityKind
    start: int
    end: int
    surface: str

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid entity offsets [{self.start}, {self.end})")
        if self.end - self.start != len(self.surface):
            raise ValueError(f"surface length does not match offsets: {self.surface!r}")


_MENTION_RE = re.compile(r"(?<!\w)@\w{3,32}")
_EMAIL_RE = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")
# candidate digit runs with light separators; digit count checked afterwards
_PHONE_RE = re.compile(r"(?<![\w+])[+(]?\d(?:[\s().\-]?\d){5,14}(?![\s().\-]?\d)")
_BANK_RE = re.compile(r"(?<![A-Za-z0-9])[A-Z]{2}\d{2}[A-Za-z0-9]{10,30}(?![A-Za-z0-9])")

_PATTERNS = (
    (EntityKind.EMAIL, _EMAIL_RE),
    (EntityKind.BANK, _BANK_RE),
    (EntityKind.PHONE, _PHONE_RE),
    (EntityKind.MENTION, _MENTION_RE),
)
_KIND_PRIORITY = {kind: i for i, (kind, _) in enumerate(_PATTERNS)}

PHONE_MIN_DIGITS = 7
PHONE_MAX_DIGITS = 15


def detect_sensitive(text: str) -> list[SensitiveEntity]:
    """All pattern-detectable entities, leftmost-longest, non-overlapping.

    Overlapping candidates are resolved by earlier start, then longer match,
    then pattern priority (email > bank > phone > mention), so an e-mail
    address never decays into a mention of its domain.
    """
    candidates: list[SensitiveEntity] = []
    for kind, pattern in _PATTERNS:
        for m in pattern.finditer(text):
            surface = m.group(0)
            if kind is EntityKind.PHONE:
                n_digits = sum(ch.isdigit() for ch in surface)
                if not PHONE_MIN_DIGITS <= n_digits <= PHONE_MAX_DIGITS:
                    continue
            candidates.append(SensitiveEntity(kind, m.start(), m.end(), surface))
    candidates.sort(key=lambda e: (e.start, e.start - e.end, _KIND_PRIORITY[e.kind]))
    chosen: list[SensitiveEntity] = []
    cursor = 0
    for ent in candidates:
        if ent.start >= cursor:
            chosen.append(ent)
            cursor = ent.end
    return chosen


# --- deterministic replacement material ---


def _byte_stream(salt: str, surface: str) -> Iterator[int]:
    counter = 0
    while True:
        block = hashlib.sha256(
            f"{salt}\x1f{surface}\x1f{counter}".encode("utf-8")
        ).digest()
        yield from block
        counter += 1


def _draw(stream: Iterator[int], alphabet: str) -> str:
    # rejection sampling keeps the distribution uniform over the alphabet
    bound = 256 - 256 % len(alphabet)
    while True:
        b = next(stream)
        if b < bound:
            return alphabet[b % len(alphabet)]


def pseudonymize_username(surface: str, salt: str) -> str:
    """Same-length alphanumeric pseudonym with two decimal digits appended.

    A leading @ survives; everything after it is regenerated from a keyed
    hash stream, so one handle always gets one pseudonym under a given salt.
    """
    prefix = ""
    core = surface
    if core.startswith("@"):
        prefix, core = "@", core[1:]
    if not core:
        raise ValueError("cannot pseudonymize an empty handle")
    stream = _byte_stream(salt, surface)
    body = "".join(_draw(stream, _ALNUM) for _ in core)
    tail = "".join(_draw(stream, _DIGITS) for _ in range(2))
    return prefix + body + tail


def scramble_preserving_classes(surface: str, salt: str) -> str:
    """Replace digits with digits and letters with same-case letters.

    Separators and any other characters pass through, so the replacement
    keeps the visual shape of the original without leaking its content.
    """
    stream = _byte_stream(salt, surface)
    out = []
    for ch in surface:
        if ch.isdigit():
            out.append(_draw(stream, _DIGITS))
        elif "a" <= ch <= "z":
            out.append(_draw(stream, _LOWER))
        elif "A" <= ch <= "Z":
            out.append(_draw(stream, _UPPER))
        else:
            out.append(ch)
    return "".join(out)


def replacement_for(
    entity: SensitiveEntity,
    salt: str,
    proper_noun_replacements: Mapping[str, str] | None = None,
) -> str:
    if entity.kind is EntityKind.MENTION:
        return pseudonymize_username(entity.surface, salt)
    if entity.kind is EntityKind.EMAIL:
        local, _, domain = entity.surface.rpartition("@")
        return pseudonymize_username(local, salt) + "@" + domain
    if entity.kind in (EntityKind.PHONE, EntityKind.BANK):
        return scramble_preserving_classes(entity.surface, salt)
    if entity.kind is EntityKind.PROPER_NOUN:
        table = proper_noun_replacements or {}
        if entity.surface not in table:
            raise ValueError(
                f"no replacement supplied for proper noun {entity.surface!r}"
            )
        return table[entity.surface]
    raise ValueError(f"unhandled entity kind {entity.kind!r}")


# --- offset bookkeeping ---


@dataclass(frozen=True)
class Edit:
    old_start: int
    old_end: int
    new_length: int


@dataclass(frozen=True)
class OffsetMap:
    """Maps positions in the original text to positions in the rewritten one.

    Edits are disjoint and sorted. A position strictly inside a replaced
    region snaps to the region boundary: span starts snap left, span ends
    snap right, so remapped spans still cover the full replacement.
    """

    edits: tuple[Edit, ...]

    def __post_init__(self):
        prev_end = 0
        for e in self.edits:
            if e.old_start < prev_end:
                raise ValueError("offset map edits overlap or are unsorted")
            prev_end = e.old_end

    def map_position(self, pos: int, *, is_end: bool = False) -> int:
        if pos < 0:
            raise ValueError("negative position")
        delta = 0
        for e in self.edits:
            if e.old_end <= pos:
                delta += e.new_length - (e.old_end - e.old_start)
            elif e.old_start < pos:
                new_start = e.old_start + delta
                return new_start + (e.new_length if is_end else 0)
            else:
                break
        return pos + delta

    def map_span(self, span: Span) -> Span:
        return remap_span(
            span,
            self.map_position(span.start),
            self.map_position(span.end, is_end=True),
        )


def apply_replacements(
    text: str, replacements: Sequence[tuple[SensitiveEntity, str]]
) -> tuple[str, OffsetMap]:
    """Rewrite right to left so pending offsets stay valid while editing."""
    ordered = sorted(replacements, key=lambda pair: pair[0].start)
    prev_end = 0
    for ent, _ in ordered:
        if ent.start < prev_end:
            raise ValueError(f"overlapping replacements at offset {ent.start}")
        if text[ent.start : ent.end] != ent.surface:
            raise ValueError(
                f"entity surface mismatch at offset {ent.start}: "
                f"expected {ent.surface!r}"
            )
        prev_end = ent.end
    out = text
    for ent, repl in reversed(ordered):
        out = out[: ent.start] + repl + out[ent.end :]
    edits = tuple(Edit(e.start, e.end, len(r)) for e, r in ordered)
    return out, OffsetMap(edits)


@dataclass(frozen=True)
class AnonymizationResult:
    text: str
    offset_map: OffsetMap
    applied: tuple[tuple[SensitiveEntity, str], ...]


def anonymize(
    text: str,
    salt: str,
    extra_entities: Iterable[SensitiveEntity] = (),
    proper_noun_replacements: Mapping[str, str] | None = None,
) -> AnonymizationResult:
    """Detect, merge in hand-marked entities, and rewrite in one pass.

    Hand-marked entities win over detector output when they overlap; the
    detector is rerun conceptually by the caller if that matters.
    """
    manual = sorted(extra_entities, key=lambda e: e.start)
    prev_end = 0
    for ent in manual:
        if ent.start < prev_end:
            raise ValueError("overlapping hand-marked entities")
        prev_end = ent.end
    detected = detect_sensitive(text)
    merged = list(manual)
    for ent in detected:
        if all(ent.end <= m.start or ent.start >= m.end for m in manual):
            merged.append(ent)
    merged.sort(key=lambda e: e.start)
    pairs = tuple(
        (ent, replacement_for(ent, salt, proper_noun_replacements)) for ent in merged
    )
    new_text, offset_map = apply_replacements(text, pairs)
    return AnonymizationResult(new_text, offset_map, pairs)


def residual_surfaces(result: AnonymizationResult) -> list[str]:
    """Original sensitive surfaces still detectable verbatim after rewriting.

    Replacements intentionally keep the shape of the original (a mention
    stays a mention), so the check is for leaked content, not leaked shape.
    """
    originals = {ent.surface for ent, _ in result.applied}
    leaked = []
    for ent in detect_sensitive(result.text):
        if ent.surface in originals:
            leaked.append(ent.surface)
    return leaked
