"""Bilingual word embeddings from relative-position-merged pseudo-documents.

A document pair is merged into a single token stream by assigning each token
its relative position within its own document (1-based index over the whole
document, divided by the document's token count) and sorting all tokens of
both documents by that position in descending order. Skip-gram with negative
sampling trained on these streams places translation pairs close together,
because aligned words occupy near-identical relative positions.

Vocabulary keys are language-tagged ("en:cornea"), so the same surface form
may exist in both languages and nearest-neighbor queries can be restricted
to one language.
"""

from __future__ import annotations

import threading
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .corpus import DocumentPair
from .errors import ConfigError, OOVError, ParseError, TrainingError


def token_key(lang: str, surface: str) -> str:
    return f"{lang}:{surface}"


def split_key(key: str) -> tuple[str, str]:
    lang, _, surface = key.partition(":")
    return lang, surface


class MergedToken(NamedTuple):
    surface: str
    is_source: bool
    position: float


@dataclass(frozen=True)
class PseudoDocument:
    """A merged document pair: one token stream, sentence boundaries removed."""

    source_lang: str
    target_lang: str
    tokens: tuple[MergedToken, ...]

    def keys(self) -> list[str]:
        return [
            token_key(self.source_lang if t.is_source else self.target_lang, t.surface)
            for t in self.tokens
        ]


def merge_pair(pair: DocumentPair) -> PseudoDocument:
    """Merge a document pair into one pseudo-bilingual token stream.

    Token i (1-based) of an N-token document gets relative position i/N;
    the stream is sorted by position in descending order. Ties are broken
    deterministically: source-language token first, then original index.
    Positions are compared as exact fractions so equal ratios really tie.
    """
    entries: list[tuple[Fraction, int, int, str]] = []
    for is_source, doc in ((True, pair.source), (False, pair.target)):
        flat = [tok for sent in doc.sentences for tok in sent]
        total = len(flat)
        for idx, tok in enumerate(flat):
            entries.append((Fraction(idx + 1, total), 0 if is_source else 1, idx, tok))
    entries.sort(key=lambda e: (-e[0], e[1], e[2]))
    tokens = tuple(
        MergedToken(surface=tok, is_source=flag == 0, position=float(pos))
        for pos, flag, _, tok in entries
    )
    return PseudoDocument(
        source_lang=pair.source.lang, target_lang=pair.target.lang, tokens=tokens
    )


@dataclass(frozen=True)
class SkipGramParams:
    dim: int = 100
    window: int = 10
    negative_samples: int = 5
    epochs: int = 5
    min_count: int = 5
    learning_rate: float = 0.025
    seed: int = 1
    deterministic: bool = True
    threads: int = 4  # fast (non-deterministic) mode only

    def validate(self) -> None:
        if self.dim < 2:
            raise ConfigError("dim must be >= 2")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.negative_samples < 1:
            raise ConfigError("negative_samples must be >= 1")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.min_count < 1:
            raise ConfigError("min_count must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


class EmbeddingTable:
    """Immutable word -> vector map over the merged bilingual vocabulary."""

    def __init__(self, keys: Sequence[str], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(keys):
            raise ValueError("matrix must be (len(keys), dim)")
        if matrix.shape[1] < 1:
            raise ValueError("dim must be >= 1")
        norms = np.linalg.norm(matrix, axis=1)
        if np.any(norms == 0.0):
            zero = [k for k, nz in zip(keys, norms == 0.0) if nz]
            raise ValueError(f"zero vectors not allowed: {zero[:5]}")
        self._keys = tuple(keys)
        self._index = {k: i for i, k in enumerate(self._keys)}
        if len(self._index) != len(self._keys):
            raise ValueError("duplicate keys")
        self._matrix = matrix
        self._matrix.setflags(write=False)
        self._unit = matrix / norms[:, None]
        self._unit.setflags(write=False)
        lang_rows: dict[str, list[int]] = {}
        lang_surfaces: dict[str, list[str]] = {}
        for i, key in enumerate(self._keys):
            lang, surface = split_key(key)
            lang_rows.setdefault(lang, []).append(i)
            lang_surfaces.setdefault(lang, []).append(surface)
        self._by_lang = {
            lang: (np.asarray(rows, dtype=np.intp), lang_surfaces[lang])
            for lang, rows in lang_rows.items()
        }

    @property
    def dim(self) -> int:
        return self._matrix.shape[1]

    def __len__(self) -> int:
        return len(self._keys)

    def keys(self) -> tuple[str, ...]:
        return self._keys

    def has(self, lang: str, surface: str) -> bool:
        return token_key(lang, surface) in self._index

    def vector(self, lang: str, surface: str) -> np.ndarray:
        try:
            return self._matrix[self._index[token_key(lang, surface)]]
        except KeyError:
            raise OOVError(lang, surface) from None

    def unit_vector(self, lang: str, surface: str) -> np.ndarray:
        try:
            return self._unit[self._index[token_key(lang, surface)]]
        except KeyError:
            raise OOVError(lang, surface) from None

    def sentence_unit_matrix(self, lang: str, sentence: Iterable[str]) -> np.ndarray:
        """Unit vectors of the in-vocabulary tokens of a sentence (k x dim)."""
        rows = [
            self._index[token_key(lang, tok)]
            for tok in sentence
            if token_key(lang, tok) in self._index
        ]
        return self._unit[rows] if rows else np.empty((0, self.dim))

    def cosine(self, lang_a: str, word_a: str, lang_b: str, word_b: str) -> float:
        """Cosine similarity of two vocabulary entries; raises OOVError."""
        return float(np.dot(self.unit_vector(lang_a, word_a), self.unit_vector(lang_b, word_b)))

    def top_k(self, lang: str, surface: str, k: int, restrict_lang: str) -> list[tuple[str, float]]:
        """The k most cosine-similar tokens of restrict_lang, descending.

        Ties are broken lexicographically by surface form. If k exceeds the
        restricted vocabulary the full ranking is returned.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        query = self.unit_vector(lang, surface)
        rows, surfaces = self._by_lang.get(restrict_lang, (np.empty(0, dtype=np.intp), []))
        if len(surfaces) == 0:
            return []
        sims = self._unit[rows] @ query
        ranked = sorted(zip(surfaces, sims), key=lambda e: (-e[1], e[0]))
        return [(s, float(v)) for s, v in ranked[:k]]

    def save(self, path: str) -> None:
        """Write the text embedding format: header line, then one token per line."""
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"{len(self._keys)} {self.dim}\n")
            for key, row in zip(self._keys, self._matrix):
                f.write(key + " " + " ".join(repr(float(x)) for x in row) + "\n")

    @classmethod
    def load(cls, path: str) -> "EmbeddingTable":
        with open(path, encoding="utf-8") as f:
            header = f.readline()
            parts = header.split()
            if len(parts) != 2:
                raise ParseError("expected header '<vocab_size> <dim>'", path=path, line=1)
            try:
                vocab_size, dim = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ParseError("non-integer header fields", path=path, line=1) from exc
            keys: list[str] = []
            rows: list[list[float]] = []
            for lineno, line in enumerate(f, start=2):
                fields = line.rstrip("\n").split(" ")
                if len(fields) != dim + 1:
                    raise ParseError(
                        f"expected 1 key + {dim} floats, got {len(fields)} fields",
                        path=path,
                        line=lineno,
                    )
                if ":" not in fields[0]:
                    raise ParseError(f"key {fields[0]!r} is not language-tagged", path=path, line=lineno)
                try:
                    rows.append([float(x) for x in fields[1:]])
                except ValueError as exc:
                    raise ParseError("invalid float", path=path, line=lineno) from exc
                keys.append(fields[0])
        if len(keys) != vocab_size:
            raise ParseError(
                f"header declares {vocab_size} tokens but file has {len(keys)}", path=path
            )
        try:
            return cls(keys, np.asarray(rows, dtype=np.float64))
        except ValueError as exc:
            raise ParseError(str(exc), path=path) from exc


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class _Trainer:
    """Skip-gram-with-negative-sampling state shared across documents."""

    def __init__(self, vocab: list[str], counts: np.ndarray, params: SkipGramParams):
        self.params = params
        self.vocab = vocab
        rng = np.random.default_rng(params.seed)
        v = len(vocab)
        # Standard word2vec initialization: inputs uniform in [-0.5/dim, 0.5/dim],
        # output vectors start at zero.
        self.w_in = (rng.random((v, params.dim)) - 0.5) / params.dim
        self.w_out = np.zeros((v, params.dim))
        noise = counts.astype(np.float64) ** 0.75
        self.noise_cdf = np.cumsum(noise / noise.sum())
        self.lr0 = params.learning_rate
        self.total_centers = 0
        self.processed = 0
        self.lock = threading.Lock()

    def train_sequence(self, ids: np.ndarray, rng: np.random.Generator) -> None:
        p = self.params
        k = p.negative_samples
        w_in, w_out = self.w_in, self.w_out
        n = len(ids)
        for t in range(n):
            with self.lock:
                frac = self.processed / max(self.total_centers, 1)
                self.processed += 1
            lr = max(self.lr0 * (1.0 - frac), self.lr0 * 1e-4)
            b = int(rng.integers(1, p.window + 1))
            ctx = np.concatenate((ids[max(0, t - b) : t], ids[t + 1 : t + 1 + b]))
            if ctx.size == 0:
                continue
            c = int(ids[t])
            draws = rng.random((ctx.size, k))
            negs = np.searchsorted(self.noise_cdf, draws)
            idx = np.empty((ctx.size, k + 1), dtype=np.intp)
            idx[:, 0] = ctx
            idx[:, 1:] = negs
            out = w_out[idx]  # (C, k+1, dim)
            vin = w_in[c]
            scores = _sigmoid(out @ vin)  # (C, k+1)
            scores[:, 0] -= 1.0  # positive label
            scores[:, 1:][negs == ctx[:, None]] = 0.0  # skip colliding negatives
            g = lr * scores
            grad_in = np.tensordot(g, out, axes=([0, 1], [0, 1]))
            np.add.at(w_out, idx.ravel(), -g.reshape(-1, 1) * vin)
            w_in[c] = vin - grad_in


def train_bwe(pairs: Sequence[DocumentPair], params: SkipGramParams | None = None) -> EmbeddingTable:
    """Train skip-gram embeddings over the merged pseudo-documents of all pairs.

    Tokens occurring fewer than min_count times are removed from the streams
    before windowing. In deterministic mode (the default), training is
    single-threaded and identical inputs + seed give an identical table; the
    fast mode trains documents on a thread pool with unsynchronized updates
    and forfeits reproducibility.
    """
    if params is None:
        params = SkipGramParams()
    params.validate()
    if not pairs:
        raise TrainingError("no document pairs to train on")
    sequences = [merge_pair(pair).keys() for pair in pairs]
    counts = Counter(key for seq in sequences for key in seq)
    vocab = sorted(
        (key for key, cnt in counts.items() if cnt >= params.min_count),
        key=lambda key: (-counts[key], key),
    )
    if not vocab:
        raise TrainingError(
            f"vocabulary is empty after min_count={params.min_count} filtering"
        )
    index = {key: i for i, key in enumerate(vocab)}
    count_arr = np.array([counts[key] for key in vocab], dtype=np.int64)
    id_sequences = [
        np.array([index[key] for key in seq if key in index], dtype=np.intp) for seq in sequences
    ]
    trainer = _Trainer(vocab, count_arr, params)
    trainer.total_centers = sum(len(seq) for seq in id_sequences) * params.epochs
    if params.deterministic:
        rng = np.random.default_rng(params.seed + 1)
        for _ in range(params.epochs):
            for ids in id_sequences:
                trainer.train_sequence(ids, rng)
    else:
        from concurrent.futures import ThreadPoolExecutor

        seed_seq = np.random.SeedSequence()  # entropy-seeded: runs differ by contract
        with ThreadPoolExecutor(max_workers=params.threads) as pool:
            for _ in range(params.epochs):
                rngs = [np.random.default_rng(s) for s in seed_seq.spawn(len(id_sequences))]
                list(pool.map(trainer.train_sequence, id_sequences, rngs))
    matrix = trainer.w_in
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        # Degenerate but possible for tokens never touched by an update.
        matrix = matrix.copy()
        matrix[norms == 0.0] = 1e-8
    return EmbeddingTable(vocab, matrix)


@dataclass(frozen=True)
class LexiconReport:
    """Retrieval accuracy of a gold lexicon at several cutoffs."""

    accuracy: dict[int, float]
    oov_sources: int
    total: int


def lexicon_accuracy(
    table: EmbeddingTable,
    lexicon: Sequence[tuple[str, str]],
    ks: Sequence[int],
    src_lang: str,
    tgt_lang: str,
) -> LexiconReport:
    """Fraction of lexicon entries whose gold target is in the top-k neighbors.

    Entries whose source token is out of vocabulary count as misses at every
    k and are reported separately.
    """
    if not lexicon:
        raise ValueError("lexicon must be non-empty")
    if not ks or any(k < 1 for k in ks):
        raise ValueError("ks must be positive integers")
    max_k = max(ks)
    hits = {k: 0 for k in ks}
    oov = 0
    for src, tgt in lexicon:
        if not table.has(src_lang, src):
            oov += 1
            continue
        neighbors = table.top_k(src_lang, src, max_k, restrict_lang=tgt_lang)
        rank = next((r for r, (surface, _) in enumerate(neighbors, 1) if surface == tgt), None)
        if rank is None:
            continue
        for k in ks:
            if rank <= k:
                hits[k] += 1
    total = len(lexicon)
    return LexiconReport(
        accuracy={k: hits[k] / total for k in ks}, oov_sources=oov, total=total
    )
