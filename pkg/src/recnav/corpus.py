"""Item, ratings and text data model: ingestion, serialization, synthetic data.

File formats
------------
* catalog CSV: ``item_id,title,year,genres`` with genres ``|``-separated and
  an empty year meaning "unknown".
* ratings CSV: ``user_id,item_id,rating``.
* corpus TSV:  ``item_id<TAB>text`` with backslash, tab, CR and LF escaped as
  ``\\\\``, ``\\t``, ``\\r``, ``\\n``.

External ids are remapped to dense internal ids ``0..n-1`` on ingestion
(ascending external id); all downstream modules work on internal ids.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import IngestError, MissingInputError, ParameterError, SchemaError
from .io_utils import atomic_write_text, fmt_value
from .seeds import substream

CATALOG_HEADER = ["item_id", "title", "year", "genres"]
RATINGS_HEADER = ["user_id", "item_id", "rating"]

# Users with fewer ratings than this are dropped on ingestion; the synthetic
# generator guarantees every user clears it.
MIN_USER_RATINGS = 20

DEFAULT_RATING_SCALE = (1.0, 5.0)


@dataclass(frozen=True)
class Item:
    item_id: int
    external_id: int
    title: str
    year: int | None
    genres: frozenset[str]


@dataclass
class ItemCatalog:
    """Dense-id item catalog plus the external-to-internal id map."""

    items: list[Item]
    external_to_internal: dict[int, int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        for internal, item in enumerate(self.items):
            if item.item_id != internal:
                raise ParameterError(
                    f"catalog ids must be dense: item at position {internal} has id {item.item_id}"
                )
            if not item.title:
                raise ParameterError(f"item {internal} has an empty title")
        self.external_to_internal = {item.external_id: item.item_id for item in self.items}
        if len(self.external_to_internal) != len(self.items):
            raise ParameterError("duplicate external ids in catalog")

    def __len__(self) -> int:
        return len(self.items)

    def titles(self) -> list[str]:
        return [item.title for item in self.items]


@dataclass
class RatingsMatrix:
    """Sparse user-by-item rating matrix with the declared rating scale."""

    matrix: sparse.csr_matrix
    user_ids: list[int]
    scale: tuple[float, float] = DEFAULT_RATING_SCALE

    @property
    def n_users(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_items(self) -> int:
        return self.matrix.shape[1]

    @property
    def n_ratings(self) -> int:
        return self.matrix.nnz


@dataclass
class TextCorpus:
    """Per-item documents keyed by internal item id."""

    docs: dict[int, str]
    n_items: int

    @property
    def missing(self) -> list[int]:
        """Catalog items without a document (excluded from CB networks)."""
        return [i for i in range(self.n_items) if i not in self.docs]


def _open_rows(path: Path | str, delimiter: str = ","):
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"input file not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as handle:
        yield from csv.reader(handle, delimiter=delimiter)


def load_catalog(path: Path | str, genre_sep: str = "|") -> ItemCatalog:
    """Read a catalog CSV into a dense-id :class:`ItemCatalog`.

    Rows are re-ordered by ascending external id; malformed rows raise
    :class:`IngestError` naming the offending line.
    """
    rows = _open_rows(path)
    header = next(rows, None)
    if header != CATALOG_HEADER:
        raise SchemaError(f"catalog header must be {CATALOG_HEADER}, got {header}")
    seen: dict[int, int] = {}
    parsed: list[tuple[int, str, int | None, frozenset[str]]] = []
    for line_no, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise IngestError(f"expected 4 columns, got {len(row)}", line=line_no)
        raw_id, title, raw_year, raw_genres = row
        try:
            external_id = int(raw_id)
        except ValueError:
            raise IngestError(f"invalid item_id {raw_id!r}", line=line_no) from None
        if external_id < 0:
            raise IngestError(f"negative item_id {external_id}", line=line_no)
        if external_id in seen:
            raise IngestError(
                f"duplicate external id {external_id} (first at line {seen[external_id]})",
                line=line_no,
            )
        seen[external_id] = line_no
        if not title.strip():
            raise IngestError("missing title", line=line_no)
        if raw_year.strip():
            try:
                year: int | None = int(raw_year)
            except ValueError:
                raise IngestError(f"invalid year {raw_year!r}", line=line_no) from None
        else:
            year = None
        genres = frozenset(g for g in raw_genres.split(genre_sep) if g) if raw_genres else frozenset()
        parsed.append((external_id, title, year, genres))
    parsed.sort(key=lambda entry: entry[0])
    items = [
        Item(item_id=i, external_id=ext, title=title, year=year, genres=genres)
        for i, (ext, title, year, genres) in enumerate(parsed)
    ]
    return ItemCatalog(items=items)


def save_catalog(catalog: ItemCatalog, path: Path | str, genre_sep: str = "|") -> None:
    lines = [",".join(CATALOG_HEADER)]
    for item in catalog.items:
        year = "" if item.year is None else str(item.year)
        genres = genre_sep.join(sorted(item.genres))
        lines.append(
            ",".join(_csv_field(v) for v in (str(item.external_id), item.title, year, genres))
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def _csv_field(text: str) -> str:
    if any(c in text for c in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def load_ratings(
    path: Path | str,
    catalog: ItemCatalog,
    min_ratings: int = MIN_USER_RATINGS,
    scale: tuple[float, float] = DEFAULT_RATING_SCALE,
) -> RatingsMatrix:
    """Read a ratings CSV, dropping users with fewer than ``min_ratings`` entries."""
    rows = _open_rows(path)
    header = next(rows, None)
    if header != RATINGS_HEADER:
        raise SchemaError(f"ratings header must be {RATINGS_HEADER}, got {header}")
    lo, hi = scale
    by_user: dict[int, list[tuple[int, float]]] = {}
    seen_pairs: set[tuple[int, int]] = set()
    for line_no, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise IngestError(f"expected 3 columns, got {len(row)}", line=line_no)
        try:
            user = int(row[0])
            ext_item = int(row[1])
            rating = float(row[2])
        except ValueError:
            raise IngestError(f"malformed row {row!r}", line=line_no) from None
        internal = catalog.external_to_internal.get(ext_item)
        if internal is None:
            raise IngestError(f"unknown item_id {ext_item}", line=line_no)
        if not (lo <= rating <= hi):
            raise IngestError(
                f"rating {rating} outside declared scale [{lo}, {hi}]", line=line_no
            )
        pair = (user, internal)
        if pair in seen_pairs:
            raise IngestError(f"duplicate (user, item) pair {pair}", line=line_no)
        seen_pairs.add(pair)
        by_user.setdefault(user, []).append((internal, rating))
    retained = sorted(u for u, entries in by_user.items() if len(entries) >= min_ratings)
    row_idx: list[int] = []
    col_idx: list[int] = []
    values: list[float] = []
    for r, user in enumerate(retained):
        for internal, rating in sorted(by_user[user]):
            row_idx.append(r)
            col_idx.append(internal)
            values.append(rating)
    matrix = sparse.csr_matrix(
        (values, (row_idx, col_idx)), shape=(len(retained), len(catalog)), dtype=np.float64
    )
    return RatingsMatrix(matrix=matrix, user_ids=retained, scale=(float(lo), float(hi)))


def save_ratings(ratings: RatingsMatrix, catalog: ItemCatalog, path: Path | str) -> None:
    lines = [",".join(RATINGS_HEADER)]
    coo = ratings.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    for k in order:
        user = ratings.user_ids[coo.row[k]]
        ext = catalog.items[coo.col[k]].external_id
        lines.append(f"{user},{ext},{fmt_value(float(coo.data[k]))}")
    atomic_write_text(path, "\n".join(lines) + "\n")


_UNESCAPE_RE = re.compile(r"\\([\\trn])")
_UNESCAPE_MAP = {"\\": "\\", "t": "\t", "r": "\r", "n": "\n"}


def _escape_text(text: str) -> str:
    return (
        text.replace("\\", "\\\\").replace("\t", "\\t").replace("\r", "\\r").replace("\n", "\\n")
    )


def _unescape_text(text: str) -> str:
    return _UNESCAPE_RE.sub(lambda m: _UNESCAPE_MAP[m.group(1)], text)


def load_corpus(path: Path | str, catalog: ItemCatalog) -> TextCorpus:
    """Read a TSV document corpus; every doc must belong to a catalog item."""
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"input file not found: {path}")
    docs: dict[int, str] = {}
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 1)
            if len(parts) != 2:
                raise IngestError("expected item_id<TAB>text", line=line_no)
            try:
                ext = int(parts[0])
            except ValueError:
                raise IngestError(f"invalid item_id {parts[0]!r}", line=line_no) from None
            internal = catalog.external_to_internal.get(ext)
            if internal is None:
                raise IngestError(f"unknown item_id {ext}", line=line_no)
            if internal in docs:
                raise IngestError(f"duplicate document for item {ext}", line=line_no)
            docs[internal] = _unescape_text(parts[1])
    return TextCorpus(docs=docs, n_items=len(catalog))


def save_corpus(corpus: TextCorpus, catalog: ItemCatalog, path: Path | str) -> None:
    lines = []
    for internal in sorted(corpus.docs):
        ext = catalog.items[internal].external_id
        lines.append(f"{ext}\t{_escape_text(corpus.docs[internal])}")
    atomic_write_text(path, "\n".join(lines) + "\n")


# --- synthetic data -------------------------------------------------------

GENRE_VOCAB_SIZE = 6
COMMON_VOCAB = [f"c{j:02d}" for j in range(20)]


def _genre_words(genre: int) -> list[str]:
    return [f"t{genre:02d}w{j}" for j in range(GENRE_VOCAB_SIZE)]


def generate_synthetic(
    seed: int,
    num_items: int = 500,
    num_users: int = 2000,
    zipf_exponent: float = 1.0,
    num_genres: int = 8,
    year_range: tuple[int, int] = (2000, 2004),
) -> tuple[ItemCatalog, RatingsMatrix, TextCorpus]:
    """Generate a seeded catalog, ratings matrix and document corpus.

    Item selection per user follows a Zipf law over a hidden popularity
    ranking; rating values carry a genre-preference signal; titles and docs
    are built from per-genre word pools so text similarity reflects genres.
    The output is a pure function of the arguments.
    """
    if num_items < 10 or num_users < 10:
        raise ParameterError("need at least 10 items and 10 users")
    if num_genres < 1:
        raise ParameterError("need at least one genre")
    if year_range[0] > year_range[1]:
        raise ParameterError(f"invalid year range {year_range}")
    if num_items < MIN_USER_RATINGS:
        raise ParameterError(
            f"{num_items} items leave users with fewer than {MIN_USER_RATINGS} possible ratings"
        )

    rng_cat = substream(seed, "catalog")
    items: list[Item] = []
    item_genres: list[np.ndarray] = []
    for i in range(num_items):
        n_genres = 2 if rng_cat.random() < 0.15 else 1
        picks = np.sort(rng_cat.choice(num_genres, size=n_genres, replace=False))
        item_genres.append(picks)
        words: list[str] = []
        for g in picks:
            vocab = _genre_words(int(g))
            words.extend(vocab[j] for j in sorted(rng_cat.choice(GENRE_VOCAB_SIZE, 2, replace=False)))
        words.append(f"op{i:04d}")
        year = int(rng_cat.integers(year_range[0], year_range[1] + 1))
        items.append(
            Item(
                item_id=i,
                external_id=1000 + 3 * i,
                title=" ".join(words),
                year=year,
                genres=frozenset(f"genre{int(g):02d}" for g in picks),
            )
        )
    catalog = ItemCatalog(items=items)

    rng_rate = substream(seed, "ratings")
    popularity_rank = np.empty(num_items, dtype=np.int64)
    popularity_rank[rng_rate.permutation(num_items)] = np.arange(num_items)
    weights = (popularity_rank + 1.0) ** (-float(zipf_exponent))
    genre_of = np.full(num_items, -1, dtype=np.int64)
    for i, picks in enumerate(item_genres):
        genre_of[i] = picks[0]
    k_hi = min(40, num_items)
    row_idx: list[np.ndarray] = []
    col_idx: list[np.ndarray] = []
    values: list[np.ndarray] = []
    for u in range(num_users):
        preferred = int(rng_rate.integers(num_genres))
        k = int(rng_rate.integers(MIN_USER_RATINGS, k_hi + 1))
        # Weighted sampling without replacement (Efraimidis-Spirakis keys).
        keys = rng_rate.random(num_items) ** (1.0 / weights)
        chosen = np.sort(np.argsort(-keys, kind="stable")[:k])
        liked = np.array(
            [preferred in item_genres[i] for i in chosen], dtype=np.float64
        )
        noise = rng_rate.integers(-1, 2, size=k).astype(np.float64)
        rating = np.clip(2.0 + 2.0 * liked + noise, 1.0, 5.0)
        row_idx.append(np.full(k, u, dtype=np.int64))
        col_idx.append(chosen)
        values.append(rating)
    matrix = sparse.csr_matrix(
        (np.concatenate(values), (np.concatenate(row_idx), np.concatenate(col_idx))),
        shape=(num_users, num_items),
        dtype=np.float64,
    )
    ratings = RatingsMatrix(matrix=matrix, user_ids=list(range(num_users)), scale=(1.0, 5.0))

    rng_doc = substream(seed, "docs")
    docs: dict[int, str] = {}
    for i in range(num_items):
        pool = [w for g in item_genres[i] for w in _genre_words(int(g))]
        length = int(rng_doc.integers(40, 61))
        from_pool = rng_doc.random(length) < 0.85
        pool_draws = rng_doc.integers(len(pool), size=length)
        common_draws = rng_doc.integers(len(COMMON_VOCAB), size=length)
        tokens = [
            pool[pool_draws[j]] if from_pool[j] else COMMON_VOCAB[common_draws[j]]
            for j in range(length)
        ]
        docs[i] = " ".join(tokens)
    corpus = TextCorpus(docs=docs, n_items=num_items)
    return catalog, ratings, corpus
