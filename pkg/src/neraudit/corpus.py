"""BIO-tagged corpus data model: parsing, validation, serialization, mention
extraction, and span/type edits.

File format (one token per line):

    # broadcast/cnn_0001
    US      B-GPE
    economy O

Columns are separated by runs of spaces/tabs (configurable), a blank line
separates sentences, and lines starting with "#" carry a document id. Tags
follow the BIO2 scheme: every mention starts with B-<type>, continues with
I-<type>, and O marks tokens outside any mention.

All values are immutable; every operation returns new objects, so corpora can
be shared freely across threads.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, NamedTuple

__all__ = [
    "BioValidationError",
    "ColumnFormat",
    "Corpus",
    "CorpusParseError",
    "EditError",
    "EditOperation",
    "EntityType",
    "InvalidEditError",
    "LabeledToken",
    "Mention",
    "NAMED_TYPES",
    "ONTONOTES_TYPES",
    "ParseResult",
    "Sentence",
    "StaleTargetError",
    "VALUE_TYPES",
    "Violation",
    "apply_edit",
    "entity_type",
    "extract_mentions",
    "parse_corpus",
    "serialize_corpus",
    "validate_corpus",
]

# The 7 numeric/value entity types of the 18-type OntoNotes tagset; the other
# 11 (PERSON, GPE, ORG, ...) are proper-name types. Unknown type names are
# treated as named.
VALUE_TYPES = frozenset(
    {"CARDINAL", "DATE", "MONEY", "ORDINAL", "PERCENT", "QUANTITY", "TIME"}
)
NAMED_TYPES = frozenset(
    {
        "EVENT",
        "FAC",
        "GPE",
        "LANGUAGE",
        "LAW",
        "LOC",
        "NORP",
        "ORG",
        "PERSON",
        "PRODUCT",
        "WORK_OF_ART",
    }
)

_TAG_RE = re.compile(r"^(O|[BI]-\S+)$")


class CorpusParseError(Exception):
    """Raised in strict mode when the input contains any violation."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        head = "; ".join(str(v) for v in violations[:3])
        more = f" (+{len(violations) - 3} more)" if len(violations) > 3 else ""
        super().__init__(f"{len(violations)} violation(s): {head}{more}")


class BioValidationError(ValueError):
    """A tag sequence is not valid BIO2."""


class EditError(Exception):
    """Base class for rejected mention edits."""


class StaleTargetError(EditError):
    """The mention recorded in an edit no longer exists at that location."""


class InvalidEditError(EditError):
    """The edit itself is malformed (empty span, out of bounds, overlap)."""


@dataclass(frozen=True, slots=True)
class EntityType:
    """An entity type name plus whether it denotes a name or a value."""

    name: str
    kind: str  # "named" | "value"


def entity_type(name: str) -> EntityType:
    """Look up an entity type; unknown names are accepted as named types."""
    return EntityType(name, "value" if name in VALUE_TYPES else "named")


ONTONOTES_TYPES: dict[str, EntityType] = {
    name: entity_type(name) for name in sorted(NAMED_TYPES | VALUE_TYPES)
}


@dataclass(frozen=True, slots=True)
class LabeledToken:
    text: str
    tag: str  # "O", "B-<type>" or "I-<type>"

    @property
    def etype(self) -> str | None:
        """Entity type carried by the tag, or None for O."""
        return None if self.tag == "O" else self.tag[2:]


@dataclass(frozen=True, slots=True)
class Sentence:
    doc_id: str
    sent_index: int  # 0-based within the document
    tokens: tuple[LabeledToken, ...]

    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def tags(self) -> tuple[str, ...]:
        return tuple(t.tag for t in self.tokens)


@dataclass(frozen=True, slots=True)
class Mention:
    """A contiguous typed token span; end is exclusive."""

    doc_id: str
    sent_index: int
    start: int
    end: int
    etype: str
    surface: str

    def key(self) -> tuple[str, int, int, int, str]:
        return (self.doc_id, self.sent_index, self.start, self.end, self.etype)


@dataclass(frozen=True, slots=True)
class Violation:
    doc_id: str
    sent_index: int
    token_index: int
    kind: str  # I-after-O | I-type-mismatch | empty-sentence | malformed-tag
    message: str

    def __str__(self) -> str:
        return (
            f"{self.kind} at {self.doc_id or '<input>'}"
            f"[{self.sent_index}:{self.token_index}]: {self.message}"
        )

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "sent_index": self.sent_index,
            "token_index": self.token_index,
            "kind": self.kind,
            "message": self.message,
        }


@dataclass(frozen=True)
class Corpus:
    partition: str  # train | dev | test | any other name
    sentences: tuple[Sentence, ...]
    source_meta: dict = field(default_factory=dict, compare=False)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)

    def documents(self) -> list[tuple[str, list[Sentence]]]:
        """Sentences grouped by consecutive runs of the same doc_id."""
        groups: list[tuple[str, list[Sentence]]] = []
        for s in self.sentences:
            if groups and groups[-1][0] == s.doc_id:
                groups[-1][1].append(s)
            else:
                groups.append((s.doc_id, [s]))
        return groups

    def locate(self, doc_id: str, sent_index: int) -> Sentence | None:
        """Find a sentence by (doc_id, sent_index); None when absent."""
        try:
            index = self._index
        except AttributeError:
            index = {(s.doc_id, s.sent_index): s for s in self.sentences}
            object.__setattr__(self, "_index", index)
        return index.get((doc_id, sent_index))

    def mentions(self) -> Iterator[Mention]:
        for s in self.sentences:
            yield from extract_mentions(s)


@dataclass(frozen=True, slots=True)
class ColumnFormat:
    """Column layout of a token line.

    token_col / tag_col index into the split columns (tag_col=-1 means last);
    separator None means "any run of spaces/tabs" on input and a single space
    on output.
    """

    token_col: int = 0
    tag_col: int = -1
    separator: str | None = None

    def split(self, line: str) -> list[str]:
        return line.split(self.separator) if self.separator else line.split()

    def join(self, token: str, tag: str) -> str:
        return f"{token}{self.separator or ' '}{tag}"


class ParseResult(NamedTuple):
    corpus: Corpus
    violations: list[Violation]


def _tag_malformed(tag: str) -> bool:
    return not _TAG_RE.match(tag)


def parse_corpus(
    source: str | Iterable[str],
    fmt: ColumnFormat | None = None,
    *,
    repair: bool = False,
    partition: str = "other",
) -> ParseResult:
    """Parse token/tag lines into a Corpus.

    In strict mode (default) any violation aborts with CorpusParseError
    carrying the full violation list. With repair=True, I- tags that do not
    continue a mention are promoted to B- (dropping them would silently delete
    mention content), malformed tags become O, unusable lines and redundant
    blank lines are dropped, and all violations are returned alongside the
    corpus. Empty input yields an empty corpus.
    """
    fmt = fmt or ColumnFormat()
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [ln.rstrip("\r\n") for ln in source]

    violations: list[Violation] = []
    sentences: list[Sentence] = []
    next_index: dict[str, int] = defaultdict(int)
    doc_id = ""
    texts: list[str] = []
    tags: list[str] = []

    def close_sentence() -> None:
        nonlocal texts, tags
        if texts:
            idx = next_index[doc_id]
            next_index[doc_id] += 1
            toks = tuple(LabeledToken(w, t) for w, t in zip(texts, tags))
            sentences.append(Sentence(doc_id, idx, toks))
            texts, tags = [], []

    for lineno, raw in enumerate(lines, 1):
        if not raw.strip():
            if texts:
                close_sentence()
            else:
                violations.append(
                    Violation(
                        doc_id,
                        next_index[doc_id],
                        0,
                        "empty-sentence",
                        f"line {lineno}: blank line without sentence content",
                    )
                )
            continue
        if raw.lstrip().startswith("#"):
            close_sentence()
            doc_id = raw.lstrip().lstrip("#").strip()
            continue

        cols = fmt.split(raw)
        tok_i = fmt.token_col if fmt.token_col >= 0 else len(cols) + fmt.token_col
        tag_i = fmt.tag_col if fmt.tag_col >= 0 else len(cols) + fmt.tag_col
        if not (0 <= tok_i < len(cols)) or not cols[tok_i].strip():
            violations.append(
                Violation(
                    doc_id,
                    next_index[doc_id],
                    len(texts),
                    "malformed-tag",
                    f"line {lineno}: no token text in {raw!r}",
                )
            )
            continue  # nothing recoverable on this line
        text = cols[tok_i]
        tag = cols[tag_i] if 0 <= tag_i < len(cols) else ""

        if _tag_malformed(tag):
            violations.append(
                Violation(
                    doc_id,
                    next_index[doc_id],
                    len(texts),
                    "malformed-tag",
                    f"line {lineno}: bad tag {tag!r} for token {text!r}",
                )
            )
            tag = "O"
        elif tag.startswith("I-"):
            prev = tags[-1] if tags else "O"
            etype = tag[2:]
            if prev == "O":
                violations.append(
                    Violation(
                        doc_id,
                        next_index[doc_id],
                        len(texts),
                        "I-after-O",
                        f"line {lineno}: {tag} does not continue a mention",
                    )
                )
                tag = "B-" + etype
            elif prev[2:] != etype:
                violations.append(
                    Violation(
                        doc_id,
                        next_index[doc_id],
                        len(texts),
                        "I-type-mismatch",
                        f"line {lineno}: {tag} after {prev}",
                    )
                )
                tag = "B-" + etype
        texts.append(text)
        tags.append(tag)

    close_sentence()

    if violations and not repair:
        raise CorpusParseError(violations)
    return ParseResult(Corpus(partition, tuple(sentences)), violations)


def serialize_corpus(corpus: Corpus, fmt: ColumnFormat | None = None) -> str:
    """Render a corpus in canonical layout.

    Document boundary lines are emitted for non-empty doc_ids, directly
    followed by the document's first sentence; blocks are separated by single
    blank lines. parse(serialize(c)) == c always; serialize(parse(f)) is
    byte-identical for violation-free canonically spaced files.
    """
    fmt = fmt or ColumnFormat()
    blocks: list[str] = []
    for doc_id, sents in corpus.documents():
        for j, sent in enumerate(sents):
            lines = [fmt.join(t.text, t.tag) for t in sent.tokens]
            if j == 0 and doc_id:
                lines.insert(0, f"# {doc_id}")
            blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def validate_corpus(corpus: Corpus) -> list[Violation]:
    """BIO2-validate every sentence of an in-memory corpus."""
    violations: list[Violation] = []
    for s in corpus.sentences:
        if not s.tokens:
            violations.append(
                Violation(s.doc_id, s.sent_index, 0, "empty-sentence", "no tokens")
            )
            continue
        prev = "O"
        for i, tok in enumerate(s.tokens):
            tag = tok.tag
            if _tag_malformed(tag):
                violations.append(
                    Violation(
                        s.doc_id, s.sent_index, i, "malformed-tag", f"bad tag {tag!r}"
                    )
                )
                prev = "O"
                continue
            if tag.startswith("I-"):
                if prev == "O":
                    violations.append(
                        Violation(
                            s.doc_id,
                            s.sent_index,
                            i,
                            "I-after-O",
                            f"{tag} does not continue a mention",
                        )
                    )
                elif prev[2:] != tag[2:]:
                    violations.append(
                        Violation(
                            s.doc_id,
                            s.sent_index,
                            i,
                            "I-type-mismatch",
                            f"{tag} after {prev}",
                        )
                    )
            prev = tag
    return violations


def extract_mentions(sentence: Sentence) -> list[Mention]:
    """One Mention per maximal B-,I-,...,I- run of a single type.

    The sentence must be BIO2-valid (parse strict or repair first); raises
    BioValidationError otherwise.
    """
    mentions: list[Mention] = []
    start = -1
    etype = ""
    for i, tok in enumerate(sentence.tokens):
        tag = tok.tag
        if tag == "O":
            if start >= 0:
                mentions.append(_mention(sentence, start, i, etype))
                start = -1
        elif tag.startswith("B-"):
            if start >= 0:
                mentions.append(_mention(sentence, start, i, etype))
            start, etype = i, tag[2:]
        elif tag.startswith("I-"):
            if start < 0 or tag[2:] != etype:
                raise BioValidationError(
                    f"invalid {tag} at {sentence.doc_id}[{sentence.sent_index}:{i}]"
                )
        else:
            raise BioValidationError(
                f"malformed tag {tag!r} at {sentence.doc_id}[{sentence.sent_index}:{i}]"
            )
    if start >= 0:
        mentions.append(_mention(sentence, start, len(sentence.tokens), etype))
    return mentions


def _mention(sentence: Sentence, start: int, end: int, etype: str) -> Mention:
    surface = " ".join(t.text for t in sentence.tokens[start:end])
    return Mention(sentence.doc_id, sentence.sent_index, start, end, etype, surface)


@dataclass(frozen=True, slots=True)
class EditOperation:
    """Span/type modification applied to one mention.

    kind "shrink" trims `left`/`right` tokens off the edges, "grow" extends
    them, "retype" swaps the entity type, "delete" removes the mention.
    """

    kind: str  # shrink | grow | retype | delete
    left: int = 0
    right: int = 0
    new_etype: str | None = None

    @classmethod
    def shrink(cls, left: int = 0, right: int = 0) -> EditOperation:
        return cls("shrink", left=left, right=right)

    @classmethod
    def grow(cls, left: int = 0, right: int = 0) -> EditOperation:
        return cls("grow", left=left, right=right)

    @classmethod
    def retype(cls, new_etype: str) -> EditOperation:
        return cls("retype", new_etype=new_etype)

    @classmethod
    def delete(cls) -> EditOperation:
        return cls("delete")

    def to_json(self) -> dict:
        if self.kind in ("shrink", "grow"):
            return {"op": self.kind, "left": self.left, "right": self.right}
        if self.kind == "retype":
            return {"op": "retype", "etype": self.new_etype}
        return {"op": "delete"}

    @classmethod
    def from_json(cls, obj: dict) -> EditOperation:
        op = obj["op"]
        if op in ("shrink", "grow"):
            return cls(op, left=int(obj.get("left", 0)), right=int(obj.get("right", 0)))
        if op == "retype":
            return cls("retype", new_etype=obj["etype"])
        if op == "delete":
            return cls("delete")
        raise ValueError(f"unknown edit operation {op!r}")


def edit_tags(
    tags: list[str], start: int, end: int, etype: str, op: EditOperation
) -> list[str]:
    """Rewrite a tag list for one edit; pure helper shared by apply/replay.

    The caller must have verified that tags[start:end] is the B/I run of a
    mention of `etype`. Raises InvalidEditError when the operation is
    malformed for this span.
    """
    n = len(tags)
    out = list(tags)
    if op.kind == "delete":
        out[start:end] = ["O"] * (end - start)
        return out
    if op.kind == "retype":
        if not op.new_etype:
            raise InvalidEditError("retype without a target type")
        out[start] = "B-" + op.new_etype
        for i in range(start + 1, end):
            out[i] = "I-" + op.new_etype
        return out
    if op.kind == "shrink":
        if op.left < 0 or op.right < 0:
            raise InvalidEditError("negative shrink amount")
        new_start, new_end = start + op.left, end - op.right
        if new_start >= new_end:
            raise InvalidEditError(
                f"shrink({op.left},{op.right}) empties span [{start},{end})"
            )
        out[start:end] = ["O"] * (end - start)
        out[new_start] = "B-" + etype
        for i in range(new_start + 1, new_end):
            out[i] = "I-" + etype
        return out
    if op.kind == "grow":
        if op.left < 0 or op.right < 0:
            raise InvalidEditError("negative grow amount")
        new_start, new_end = start - op.left, end + op.right
        if new_start < 0 or new_end > n:
            raise InvalidEditError("grow extends outside the sentence")
        for i in range(new_start, start):
            if out[i] != "O":
                raise InvalidEditError("grow would overlap an adjacent mention")
        for i in range(end, new_end):
            if out[i] != "O":
                raise InvalidEditError("grow would overlap an adjacent mention")
        out[new_start] = "B-" + etype
        for i in range(new_start + 1, new_end):
            out[i] = "I-" + etype
        return out
    raise InvalidEditError(f"unknown operation kind {op.kind!r}")


def apply_edit(corpus: Corpus, target: Mention, op: EditOperation) -> Corpus:
    """Apply one mention edit, returning a new corpus.

    The target mention must still exist with exactly the recorded span, type
    and surface (StaleTargetError otherwise). Token texts are never changed;
    vacated tokens become O and the modified span is retagged consistently.
    """
    sentence = corpus.locate(target.doc_id, target.sent_index)
    if sentence is None:
        raise StaleTargetError(f"no sentence {target.doc_id}[{target.sent_index}]")
    current = extract_mentions(sentence)
    if target not in current:
        raise StaleTargetError(
            f"no {target.etype} mention at "
            f"{target.doc_id}[{target.sent_index}:{target.start}:{target.end}]"
        )
    tags = edit_tags(
        [t.tag for t in sentence.tokens], target.start, target.end, target.etype, op
    )
    tokens = tuple(
        LabeledToken(t.text, tag) for t, tag in zip(sentence.tokens, tags)
    )
    new_sentence = replace(sentence, tokens=tokens)
    sentences = tuple(
        new_sentence if s is sentence else s for s in corpus.sentences
    )
    return replace(corpus, sentences=sentences)
