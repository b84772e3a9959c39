"""Document-aligned bilingual corpora: data model, file formats, synthetic data.

A corpus file is UTF-8 JSON-lines, one object per document pair:

    {"pair_id": "p1",
     "source": {"doc_id": "d1", "lang": "en", "sentences": [["Hello", "world"], ...]},
     "target": {"doc_id": "d2", "lang": "zh", "sentences": [...]}}

Gold / system alignment files are UTF-8 text with one link per line:

    pair_id<TAB>src_idx_csv<TAB>tgt_idx_csv[<TAB>mass]

where an empty side is the literal "-". Input is expected pre-tokenized and
pre-sentence-split; no normalization is applied here.
"""

from __future__ import annotations

import json
import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .errors import ConfigError, ParseError, ValidationError

Sentence = tuple[str, ...]


def _check_token(surface: str, where: str) -> None:
    if not surface:
        raise ValidationError(f"{where}: empty token")
    if any(ch.isspace() for ch in surface):
        raise ValidationError(f"{where}: token {surface!r} contains whitespace")


@dataclass(frozen=True)
class Document:
    """One side of a document pair: an ordered list of tokenized sentences."""

    doc_id: str
    lang: str
    sentences: tuple[Sentence, ...]

    def validate(self) -> None:
        if not self.sentences:
            raise ValidationError(f"document {self.doc_id}: no sentences")
        for i, sent in enumerate(self.sentences):
            if not sent:
                raise ValidationError(f"document {self.doc_id}: sentence {i} is empty")
            for tok in sent:
                _check_token(tok, f"document {self.doc_id}, sentence {i}")

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    def sentence_lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sentences)


@dataclass(frozen=True)
class DocumentPair:
    pair_id: str
    source: Document
    target: Document

    def validate(self) -> None:
        self.source.validate()
        self.target.validate()
        if self.source.lang == self.target.lang:
            raise ValidationError(
                f"pair {self.pair_id}: source and target share language {self.source.lang!r}"
            )


@dataclass(frozen=True)
class Link:
    """One alignment link: sorted sentence index tuples, optionally with mass."""

    src: tuple[int, ...]
    tgt: tuple[int, ...]
    mass: float | None = None

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.src, self.tgt)


@dataclass(frozen=True)
class AlignmentSet:
    """A set of links for one document pair (system output or gold reference)."""

    links: tuple[Link, ...]

    def validate(self, n_src: int | None = None, n_tgt: int | None = None) -> None:
        seen_src: set[int] = set()
        seen_tgt: set[int] = set()
        for link in self.links:
            if not link.src and not link.tgt:
                raise ValidationError("link with both sides empty")
            if list(link.src) != sorted(set(link.src)) or list(link.tgt) != sorted(set(link.tgt)):
                raise ValidationError(f"link {link.src}-{link.tgt}: indices not sorted and unique")
            for i in link.src:
                if n_src is not None and not 0 <= i < n_src:
                    raise ValidationError(f"source index {i} out of bounds (document has {n_src})")
                if i in seen_src:
                    raise ValidationError(f"source index {i} appears in more than one link")
                seen_src.add(i)
            for j in link.tgt:
                if n_tgt is not None and not 0 <= j < n_tgt:
                    raise ValidationError(f"target index {j} out of bounds (document has {n_tgt})")
                if j in seen_tgt:
                    raise ValidationError(f"target index {j} appears in more than one link")
                seen_tgt.add(j)

    def link_keys(self) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
        return {link.key() for link in self.links}


def _document_from_json(obj: object, which: str, pair_id: str) -> Document:
    if not isinstance(obj, dict):
        raise ValidationError(f"pair {pair_id}: {which} is not an object")
    try:
        doc_id = obj["doc_id"]
        lang = obj["lang"]
        sentences = obj["sentences"]
    except KeyError as exc:
        raise ValidationError(f"pair {pair_id}: {which} is missing field {exc.args[0]!r}") from exc
    if not isinstance(doc_id, str) or not isinstance(lang, str) or not isinstance(sentences, list):
        raise ValidationError(f"pair {pair_id}: {which} has wrong field types")
    sents = []
    for sent in sentences:
        if not isinstance(sent, list) or not all(isinstance(t, str) for t in sent):
            raise ValidationError(f"pair {pair_id}: {which} sentence is not a list of strings")
        sents.append(tuple(sent))
    return Document(doc_id=doc_id, lang=lang, sentences=tuple(sents))


def load_corpus(path: str) -> list[DocumentPair]:
    """Load a JSON-lines corpus file, preserving record order.

    Raises ParseError (with line number) on malformed records and
    ValidationError (naming the pair_id) on invariant violations.
    """
    pairs: list[DocumentPair] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path=path, line=lineno) from exc
            if not isinstance(record, dict):
                raise ParseError("record is not a JSON object", path=path, line=lineno)
            pair_id = record.get("pair_id")
            if not isinstance(pair_id, str) or not pair_id:
                raise ParseError("missing or invalid pair_id", path=path, line=lineno)
            if pair_id in seen_ids:
                raise ValidationError(f"pair {pair_id}: duplicate pair_id")
            seen_ids.add(pair_id)
            if "source" not in record or "target" not in record:
                raise ParseError(f"pair {pair_id}: missing source/target", path=path, line=lineno)
            pair = DocumentPair(
                pair_id=pair_id,
                source=_document_from_json(record["source"], "source", pair_id),
                target=_document_from_json(record["target"], "target", pair_id),
            )
            pair.validate()
            pairs.append(pair)
    return pairs


def write_corpus(pairs: Iterable[DocumentPair], path: str) -> None:
    """Write pairs as JSON-lines; load_corpus(write_corpus(...)) round-trips."""
    with open(path, "w", encoding="utf-8") as f:
        for pair in pairs:
            record = {
                "pair_id": pair.pair_id,
                "source": _document_to_json(pair.source),
                "target": _document_to_json(pair.target),
            }
            f.write(json.dumps(record, ensure_ascii=False) + "\n")


def _document_to_json(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "lang": doc.lang,
        "sentences": [list(s) for s in doc.sentences],
    }


def _parse_index_csv(field: str, path: str, lineno: int) -> tuple[int, ...]:
    if field == "-":
        return ()
    try:
        indices = [int(x) for x in field.split(",")]
    except ValueError as exc:
        raise ParseError(f"invalid index list {field!r}", path=path, line=lineno) from exc
    if any(i < 0 for i in indices):
        raise ParseError(f"negative index in {field!r}", path=path, line=lineno)
    if len(set(indices)) != len(indices):
        raise ValidationError(f"{path}:{lineno}: duplicate index within a link: {field!r}")
    return tuple(sorted(indices))


def load_alignments(
    path: str,
    doc_sizes: Mapping[str, tuple[int, int]] | None = None,
) -> dict[str, AlignmentSet]:
    """Load a gold or system alignment file.

    When doc_sizes maps pair_id to (source sentence count, target sentence
    count), links are bounds-checked against it. Exclusivity (no sentence
    index in two links of the same side) is always checked. A trailing mass
    column is accepted and preserved.
    """
    by_pair: dict[str, list[Link]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) not in (3, 4):
                raise ParseError(
                    f"expected 3 or 4 tab-separated fields, got {len(fields)}",
                    path=path,
                    line=lineno,
                )
            pair_id = fields[0]
            src = _parse_index_csv(fields[1], path, lineno)
            tgt = _parse_index_csv(fields[2], path, lineno)
            mass = None
            if len(fields) == 4:
                try:
                    mass = float(fields[3])
                except ValueError as exc:
                    raise ParseError(f"invalid mass {fields[3]!r}", path=path, line=lineno) from exc
            by_pair.setdefault(pair_id, []).append(Link(src=src, tgt=tgt, mass=mass))
    result: dict[str, AlignmentSet] = {}
    for pair_id, links in by_pair.items():
        aset = AlignmentSet(links=tuple(links))
        sizes = doc_sizes.get(pair_id) if doc_sizes is not None else None
        try:
            if sizes is not None:
                aset.validate(n_src=sizes[0], n_tgt=sizes[1])
            else:
                aset.validate()
        except ValidationError as exc:
            raise ValidationError(f"pair {pair_id}: {exc}") from exc
        result[pair_id] = aset
    return result


# Kept as the documented name for the gold-reference use case.
load_gold = load_alignments


def write_alignments(
    alignments: Mapping[str, AlignmentSet],
    path: str,
    include_mass: bool = False,
) -> None:
    """Write alignments in the gold file format (optional 4th mass column)."""
    with open(path, "w", encoding="utf-8") as f:
        for pair_id, aset in alignments.items():
            for link in aset.links:
                src = ",".join(str(i) for i in link.src) if link.src else "-"
                tgt = ",".join(str(j) for j in link.tgt) if link.tgt else "-"
                fields = [pair_id, src, tgt]
                if include_mass and link.mass is not None:
                    fields.append(repr(link.mass))
                f.write("\t".join(fields) + "\n")


@dataclass(frozen=True)
class SyntheticConfig:
    """Parameters for synthetic corpus generation.

    Merge proportions are the per-step probabilities of emitting a 1-to-2,
    2-to-1, or 2-to-2 alignment instead of 1-to-1 while walking the source
    sentences. The target side is a token-level bijective "translation" of
    the source, so gold alignments are exact by construction.
    """

    n_pairs: int
    sentences_per_doc: int
    vocab_size: int
    p_one_to_two: float = 0.0
    p_two_to_one: float = 0.0
    p_two_to_two: float = 0.0
    min_sentence_len: int = 4
    max_sentence_len: int = 12
    shuffle_within_sentence: bool = False
    seed: int = 1
    source_lang: str = "aa"
    target_lang: str = "bb"

    def validate(self) -> None:
        if self.n_pairs < 1:
            raise ConfigError("n_pairs must be >= 1")
        if self.sentences_per_doc < 1:
            raise ConfigError("sentences_per_doc must be >= 1")
        if self.vocab_size < 1:
            raise ConfigError("vocab_size must be >= 1")
        if not 2 <= self.min_sentence_len <= self.max_sentence_len:
            raise ConfigError("need 2 <= min_sentence_len <= max_sentence_len")
        props = (self.p_one_to_two, self.p_two_to_one, self.p_two_to_two)
        if any(p < 0 for p in props) or sum(props) > 1.0:
            raise ConfigError("merge proportions must be >= 0 and sum to <= 1")
        if self.source_lang == self.target_lang:
            raise ConfigError("source_lang and target_lang must differ")


def source_token(index: int) -> str:
    return f"w{index:05d}"


def target_token_for(src: str) -> str:
    """Fixed bijection used by the synthetic generator (w00001 -> W00001)."""
    return src.upper()


def synthetic_bijection(config: SyntheticConfig) -> list[tuple[str, str]]:
    """The full (source token, target token) lexicon of the generator's bijection."""
    return [(source_token(i), target_token_for(source_token(i))) for i in range(config.vocab_size)]


def generate_synthetic(
    config: SyntheticConfig,
) -> tuple[list[DocumentPair], dict[str, AlignmentSet]]:
    """Generate a corpus of document pairs with exact gold alignments.

    Deterministic: equal configs (including seed) produce identical output.
    Every sentence of both documents is covered by exactly one gold link.
    """
    config.validate()
    rng = random.Random(config.seed)
    pairs: list[DocumentPair] = []
    gold: dict[str, AlignmentSet] = {}
    for d in range(config.n_pairs):
        pair_id = f"synth-{d:04d}"
        src_sentences = [
            tuple(
                source_token(rng.randrange(config.vocab_size))
                for _ in range(rng.randint(config.min_sentence_len, config.max_sentence_len))
            )
            for _ in range(config.sentences_per_doc)
        ]
        tgt_sentences: list[Sentence] = []
        links: list[Link] = []
        i = 0
        n = config.sentences_per_doc
        while i < n:
            r = rng.random()
            p12 = config.p_one_to_two
            p21 = p12 + config.p_two_to_one
            p22 = p21 + config.p_two_to_two
            two_left = i + 1 < n
            if r < p12:
                pattern = "1-2"
            elif r < p21 and two_left:
                pattern = "2-1"
            elif r < p22 and two_left:
                pattern = "2-2"
            else:
                pattern = "1-1"
            if pattern == "1-1":
                tokens = [target_token_for(t) for t in src_sentences[i]]
                links.append(Link(src=(i,), tgt=(len(tgt_sentences),)))
                tgt_sentences.append(_finish_sentence(tokens, rng, config))
                i += 1
            elif pattern == "1-2":
                tokens = [target_token_for(t) for t in src_sentences[i]]
                cut = rng.randint(1, len(tokens) - 1)
                j = len(tgt_sentences)
                links.append(Link(src=(i,), tgt=(j, j + 1)))
                tgt_sentences.append(_finish_sentence(tokens[:cut], rng, config))
                tgt_sentences.append(_finish_sentence(tokens[cut:], rng, config))
                i += 1
            elif pattern == "2-1":
                tokens = [target_token_for(t) for t in src_sentences[i] + src_sentences[i + 1]]
                links.append(Link(src=(i, i + 1), tgt=(len(tgt_sentences),)))
                tgt_sentences.append(_finish_sentence(tokens, rng, config))
                i += 2
            else:  # 2-2: redistribute the two translated sentences at a new cut
                tokens = [target_token_for(t) for t in src_sentences[i] + src_sentences[i + 1]]
                boundary = len(src_sentences[i])
                choices = [k for k in range(1, len(tokens)) if k != boundary]
                cut = rng.choice(choices) if choices else boundary
                j = len(tgt_sentences)
                links.append(Link(src=(i, i + 1), tgt=(j, j + 1)))
                tgt_sentences.append(_finish_sentence(tokens[:cut], rng, config))
                tgt_sentences.append(_finish_sentence(tokens[cut:], rng, config))
                i += 2
        pair = DocumentPair(
            pair_id=pair_id,
            source=Document(
                doc_id=f"{pair_id}.src", lang=config.source_lang, sentences=tuple(src_sentences)
            ),
            target=Document(
                doc_id=f"{pair_id}.tgt", lang=config.target_lang, sentences=tuple(tgt_sentences)
            ),
        )
        pair.validate()
        aset = AlignmentSet(links=tuple(links))
        aset.validate(n_src=len(src_sentences), n_tgt=len(tgt_sentences))
        pairs.append(pair)
        gold[pair_id] = aset
    return pairs, gold


def _finish_sentence(tokens: list[str], rng: random.Random, config: SyntheticConfig) -> Sentence:
    if config.shuffle_within_sentence:
        tokens = list(tokens)
        rng.shuffle(tokens)
    return tuple(tokens)
