"""Inverted index construction and binary persistence.

On-disk layout (all integers little-endian, strings UTF-8 with a u32 byte
length prefix):

    magic   4 bytes  b"SRIX"
    version u32      currently 1
    ndocs   u64
    per document, in corpus order: id (string), analyzed length (u64)
    nterms  u64
    per term: term (string), npostings (u64),
              then npostings pairs of (doc table index u64, tf u64)

``avgdl`` is recomputed on load from the document lengths.
"""

from __future__ import annotations

import struct
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable

from .analysis import AnalyzerConfig, analyze
from .corpus import Document

MAGIC = b"SRIX"
FORMAT_VERSION = 1


class IndexFormatError(ValueError):
    """Raised for bad magic bytes, unsupported versions, or truncated files."""


@dataclass
class InvertedIndex:
    n_docs: int
    avgdl: float
    doc_lens: dict[str, int]
    postings: dict[str, list[tuple[str, int]]]  # term -> [(doc_id, tf)] sorted by doc_id
    doc_ids: list[str] = field(default_factory=list)

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def tf(self, term: str, doc_id: str) -> int:
        plist = self.postings.get(term)
        if not plist:
            return 0
        i = bisect_left(plist, (doc_id,))
        if i < len(plist) and plist[i][0] == doc_id:
            return plist[i][1]
        return 0

    def check_consistency(self) -> None:
        """Verify that per-document posting mass matches the stored lengths."""
        totals: Counter[str] = Counter()
        for plist in self.postings.values():
            prev = None
            for doc_id, tf in plist:
                if tf <= 0:
                    raise ValueError(f"non-positive tf for doc {doc_id}")
                if prev is not None and doc_id <= prev:
                    raise ValueError("postings not sorted by doc id")
                prev = doc_id
                totals[doc_id] += tf
        for doc_id in self.doc_ids:
            if totals.get(doc_id, 0) != self.doc_lens[doc_id]:
                raise ValueError(
                    f"doc {doc_id}: postings sum {totals.get(doc_id, 0)} != "
                    f"length {self.doc_lens[doc_id]}"
                )


def build_index(docs: Iterable[Document], cfg: AnalyzerConfig | None = None) -> InvertedIndex:
    """Index ``docs``; documents that analyze to nothing still count, with length 0."""
    if cfg is None:
        cfg = AnalyzerConfig()
    doc_lens: dict[str, int] = {}
    doc_ids: list[str] = []
    postings: dict[str, list[tuple[str, int]]] = {}
    for doc in docs:
        if doc.id in doc_lens:
            raise ValueError(f"duplicate document id: {doc.id}")
        tokens = analyze(doc.text, cfg)
        doc_lens[doc.id] = len(tokens)
        doc_ids.append(doc.id)
        for term, tf in Counter(tokens).items():
            postings.setdefault(term, []).append((doc.id, tf))
    if not doc_ids:
        raise ValueError("cannot index an empty corpus")
    for plist in postings.values():
        plist.sort()
    n = len(doc_ids)
    avgdl = sum(doc_lens.values()) / n
    return InvertedIndex(
        n_docs=n, avgdl=avgdl, doc_lens=doc_lens, postings=postings, doc_ids=doc_ids
    )


def _write_str(sink: BinaryIO, s: str) -> None:
    data = s.encode("utf-8")
    sink.write(struct.pack("<I", len(data)))
    sink.write(data)


def _read_exact(stream: BinaryIO, n: int) -> bytes:
    data = stream.read(n)
    if len(data) != n:
        raise IndexFormatError("truncated index file")
    return data


def _read_str(stream: BinaryIO) -> str:
    (n,) = struct.unpack("<I", _read_exact(stream, 4))
    return _read_exact(stream, n).decode("utf-8")


def save_index(index: InvertedIndex, sink: BinaryIO) -> None:
    sink.write(MAGIC)
    sink.write(struct.pack("<I", FORMAT_VERSION))
    sink.write(struct.pack("<Q", index.n_docs))
    doc_pos = {doc_id: i for i, doc_id in enumerate(index.doc_ids)}
    for doc_id in index.doc_ids:
        _write_str(sink, doc_id)
        sink.write(struct.pack("<Q", index.doc_lens[doc_id]))
    terms = sorted(index.postings)
    sink.write(struct.pack("<Q", len(terms)))
    for term in terms:
        _write_str(sink, term)
        plist = index.postings[term]
        sink.write(struct.pack("<Q", len(plist)))
        for doc_id, tf in plist:
            sink.write(struct.pack("<QQ", doc_pos[doc_id], tf))


def load_index(stream: BinaryIO) -> InvertedIndex:
    magic = stream.read(4)
    if magic != MAGIC:
        raise IndexFormatError(f"not an index file (magic {magic!r})")
    (version,) = struct.unpack("<I", _read_exact(stream, 4))
    if version != FORMAT_VERSION:
        raise IndexFormatError(
            f"unsupported index format version {version} (expected {FORMAT_VERSION})"
        )
    (n_docs,) = struct.unpack("<Q", _read_exact(stream, 8))
    doc_ids: list[str] = []
    doc_lens: dict[str, int] = {}
    for _ in range(n_docs):
        doc_id = _read_str(stream)
        (length,) = struct.unpack("<Q", _read_exact(stream, 8))
        doc_ids.append(doc_id)
        doc_lens[doc_id] = length
    (n_terms,) = struct.unpack("<Q", _read_exact(stream, 8))
    postings: dict[str, list[tuple[str, int]]] = {}
    for _ in range(n_terms):
        term = _read_str(stream)
        (n_post,) = struct.unpack("<Q", _read_exact(stream, 8))
        plist = []
        for _ in range(n_post):
            pos, tf = struct.unpack("<QQ", _read_exact(stream, 16))
            if pos >= n_docs:
                raise IndexFormatError(f"posting references unknown document #{pos}")
            plist.append((doc_ids[pos], tf))
        plist.sort()
        postings[term] = plist
    if n_docs == 0:
        raise IndexFormatError("index contains no documents")
    avgdl = sum(doc_lens.values()) / n_docs
    return InvertedIndex(
        n_docs=n_docs, avgdl=avgdl, doc_lens=doc_lens, postings=postings, doc_ids=doc_ids
    )
