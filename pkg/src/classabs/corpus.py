"""Multi-label text corpora with a three-level label hierarchy.

Documents carry sets of fine-grained labels ("beliefs"); the hierarchy maps
each belief to a theme and each theme to a main theme.  All types are
immutable; operations return new objects.
"""
from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, replace

from .stopwords import StopwordList, builtin_stopwords

LEVEL_BELIEF = "belief"
LEVEL_THEME = "theme"
LEVEL_MAIN = "main"


class CorpusError(Exception):
    pass


class ParseError(CorpusError):
    pass


class ValidationError(CorpusError):
    pass


@dataclass(frozen=True)
class Document:
    id: str
    lang: str
    text: str
    labels: frozenset
    sentences: tuple = ()


@dataclass(frozen=True)
class LabelHierarchy:
    belief_to_theme: dict
    theme_to_main: dict

    def __post_init__(self):
        missing = set(self.belief_to_theme.values()) - set(self.theme_to_main)
        if missing:
            raise ValidationError(
                f"themes without a main theme: {sorted(missing)}"
            )

    @property
    def beliefs(self):
        return frozenset(self.belief_to_theme)

    @property
    def themes(self):
        return frozenset(self.theme_to_main)

    @property
    def mains(self):
        return frozenset(self.theme_to_main.values())

    def level_sizes(self) -> dict:
        return {
            LEVEL_BELIEF: len(self.beliefs),
            LEVEL_THEME: len(self.themes),
            LEVEL_MAIN: len(self.mains),
        }

    def project(self, belief: str, level: str) -> str:
        theme = self.belief_to_theme[belief]
        if level == LEVEL_THEME:
            return theme
        if level == LEVEL_MAIN:
            return self.theme_to_main[theme]
        raise ValueError(f"cannot project to level {level!r}")


@dataclass(frozen=True)
class Corpus:
    documents: tuple
    hierarchy: LabelHierarchy
    active_level: str = LEVEL_BELIEF
    label_space: tuple = ()
    name: str = "corpus"

    def __len__(self):
        return len(self.documents)

    def doc_ids(self):
        return [d.id for d in self.documents]

    def subset(self, ids) -> "Corpus":
        wanted = set(ids)
        docs = tuple(d for d in self.documents if d.id in wanted)
        return replace(self, documents=docs)

    def languages(self):
        return sorted({d.lang for d in self.documents})


# ---------------------------------------------------------------------------
# loading / saving

def _validate_documents(docs, hierarchy):
    seen = set()
    for d in docs:
        if d.id in seen:
            raise ValidationError(f"duplicate document id {d.id!r}")
        seen.add(d.id)
        if not d.labels:
            raise ValidationError(f"document {d.id!r} has an empty label set")
        unknown = d.labels - hierarchy.beliefs
        if unknown:
            raise ValidationError(
                f"document {d.id!r} has unknown label {sorted(unknown)[0]!r}"
            )


def load_hierarchy(path) -> LabelHierarchy:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    for key in ("belief_to_theme", "theme_to_main"):
        if key not in raw:
            raise ParseError(f"{path}: missing key {key!r}")
    return LabelHierarchy(
        belief_to_theme=dict(raw["belief_to_theme"]),
        theme_to_main=dict(raw["theme_to_main"]),
    )


def _parse_jsonl(path):
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            try:
                docs.append(Document(
                    id=str(raw["id"]),
                    lang=str(raw["lang"]),
                    text=str(raw["text"]),
                    labels=frozenset(raw["labels"]),
                ))
            except KeyError as exc:
                raise ParseError(f"{path}:{lineno}: missing field {exc}") from exc
    return docs


def _parse_csv(path):
    docs = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                labels = frozenset(
                    l for l in (row["labels"] or "").split(";") if l
                )
                docs.append(Document(
                    id=row["id"], lang=row["lang"], text=row["text"],
                    labels=labels,
                ))
            except KeyError as exc:
                raise ParseError(f"{path}:{lineno}: missing column {exc}") from exc
    return docs


def load_corpus(path, hierarchy_path, format: str = "jsonl",
                name: str = None) -> Corpus:
    hierarchy = load_hierarchy(hierarchy_path)
    if format == "jsonl":
        docs = _parse_jsonl(path)
    elif format == "csv":
        docs = _parse_csv(path)
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    if not docs:
        raise ParseError(f"{path}: no documents")
    _validate_documents(docs, hierarchy)
    return Corpus(
        documents=tuple(docs),
        hierarchy=hierarchy,
        active_level=LEVEL_BELIEF,
        label_space=tuple(sorted(hierarchy.beliefs)),
        name=name or str(path),
    )


def save_corpus(corpus: Corpus, path, hierarchy_path=None):
    with open(path, "w", encoding="utf-8") as fh:
        for d in corpus.documents:
            fh.write(json.dumps({
                "id": d.id, "lang": d.lang, "text": d.text,
                "labels": sorted(d.labels),
            }, ensure_ascii=False) + "\n")
    if hierarchy_path is not None:
        save_hierarchy(corpus.hierarchy, hierarchy_path)


def save_hierarchy(hierarchy: LabelHierarchy, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({
            "belief_to_theme": dict(sorted(hierarchy.belief_to_theme.items())),
            "theme_to_main": dict(sorted(hierarchy.theme_to_main.items())),
        }, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# preprocessing

_TERMINAL = re.compile(r"([.!?]+)(?=\s|$)")
_LAST_TOKEN = re.compile(r"(\S+)$")
_URL = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def split_sentences(text: str):
    """Split at terminal punctuation followed by whitespace or end of text.

    A period directly after a single-letter token (initials like "J.") does
    not terminate a sentence.
    """
    text = text.strip()
    if not text:
        return []
    sentences = []
    start = 0
    for m in _TERMINAL.finditer(text):
        before = text[start:m.start(1)]
        tok = _LAST_TOKEN.search(before)
        if (m.group(1) == "." and tok is not None
                and len(tok.group(1)) == 1 and tok.group(1).isalpha()):
            continue
        sent = text[start:m.end(1)].strip()
        if sent:
            sentences.append(sent)
        start = m.end(1)
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def segment_sentences(doc: Document) -> Document:
    return replace(doc, sentences=tuple(split_sentences(doc.text)))


def segment_corpus(corpus: Corpus) -> Corpus:
    docs = tuple(segment_sentences(d) for d in corpus.documents)
    return replace(corpus, documents=docs)


def clean_text(text: str, stopwords: StopwordList):
    """Lowercased letter/digit tokens with URLs and stopwords removed.

    Brackets, quotes, line feeds, hyphens etc. are non-token characters and
    act as separators.
    """
    text = _URL.sub(" ", text).lower()
    return [t for t in _TOKEN.findall(text) if t not in stopwords.words]


def default_stopwords(corpus: Corpus) -> dict:
    out = {}
    for lang in corpus.languages():
        try:
            out[lang] = builtin_stopwords(lang)
        except KeyError:
            out[lang] = StopwordList(lang=lang, words=frozenset(["\0"]))
    return out


def corpus_tokens(corpus: Corpus, stopword_map: dict = None):
    """clean_text applied per document, stopwords chosen by document language."""
    if stopword_map is None:
        stopword_map = default_stopwords(corpus)
    return [clean_text(d.text, stopword_map[d.lang]) for d in corpus.documents]


# ---------------------------------------------------------------------------
# label projection

def project_labels(corpus: Corpus, target_level: str) -> Corpus:
    if corpus.active_level != LEVEL_BELIEF:
        raise ValueError(
            f"corpus must be at belief level, is at {corpus.active_level!r}"
        )
    if target_level not in (LEVEL_THEME, LEVEL_MAIN):
        raise ValueError(f"invalid target level {target_level!r}")
    h = corpus.hierarchy
    docs = tuple(
        replace(d, labels=frozenset(h.project(l, target_level) for l in d.labels))
        for d in corpus.documents
    )
    space = h.themes if target_level == LEVEL_THEME else h.mains
    return replace(corpus, documents=docs, active_level=target_level,
                   label_space=tuple(sorted(space)))
