"""Text formats for votes and weights."""

from __future__ import annotations

import math
import os
import re
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from .aggregation import VoteProfile
from .errors import ParseError
from .perm import Permutation
from .weights import AdjacentWeights, DefiningTree, TranspositionWeights

_SPLIT = re.compile(r"[,\s]+")


def _content_lines(text: str):
    """(line number, stripped text) for non-blank, non-comment lines."""
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield k, line


def _tokens(line: str, sep: str = ",") -> list[str]:
    if sep == ",":
        return [t.strip() for t in line.split(",")]
    return [t for t in _SPLIT.split(line) if t]


def _is_int(tok: str) -> bool:
    return re.fullmatch(r"[+-]?\d+", tok) is not None


def parse_votes(text: str) -> VoteProfile:
    """One comma-separated vote per line, most preferred first.

    If every token is an integer the ids are used directly; otherwise tokens
    are labels numbered in the order the first vote lists them.
    """
    rows = [(k, _tokens(line)) for k, line in _content_lines(text)]
    if not rows:
        raise ParseError("no votes found")
    for k, toks in rows:
        if any(t == "" for t in toks):
            raise ParseError("empty candidate token", k)
    numeric = all(_is_int(t) for _, toks in rows for t in toks)
    n = len(rows[0][1])
    labels = None
    if not numeric:
        labels = rows[0][1]
        if len(set(labels)) != n:
            dup = next(t for t in labels if labels.count(t) > 1)
            raise ParseError(f"duplicate candidate {dup!r}", rows[0][0])
        index = {lab: i + 1 for i, lab in enumerate(labels)}
    votes = []
    for k, toks in rows:
        if len(toks) != n:
            raise ParseError(f"vote has {len(toks)} candidates, expected {n}", k)
        seen = set()
        for t in toks:
            if t in seen:
                raise ParseError(f"duplicate candidate {t!r}", k)
            seen.add(t)
        if numeric:
            ids = [int(t) for t in toks]
            bad = [x for x in ids if not 1 <= x <= n]
            if bad:
                raise ParseError(f"candidate id {bad[0]} outside 1..{n}", k)
        else:
            unknown = [t for t in toks if t not in index]
            if unknown:
                raise ParseError(f"unknown candidate {unknown[0]!r}", k)
            ids = [index[t] for t in toks]
        votes.append(Permutation(ids))
    return VoteProfile(votes, labels)


def serialize_votes(profile: VoteProfile) -> str:
    lab = profile.labels
    lines = [",".join(lab[c - 1] if lab else str(c) for c in v.entries) for v in profile]
    return "\n".join(lines) + "\n"


def parse_ranking(text: str, labels: Sequence[str] | None = None) -> Permutation:
    """A single ranking such as ``"1,3,4,2"`` or ``"(b,a,c)"``."""
    toks = _tokens(text.strip().strip("()"))
    try:
        if labels is not None and not all(_is_int(t) for t in toks):
            index = {lab: i + 1 for i, lab in enumerate(labels)}
            return Permutation(index[t] for t in toks)
        return Permutation(int(t) for t in toks)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad ranking {text!r}: {exc}") from None


def _number(tok: str, line: int | None = None) -> float:
    low = tok.lower()
    if low in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        x = float(Fraction(tok)) if "/" in tok else float(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a number: {tok!r}", line) from None
    if math.isnan(x):
        raise ParseError("NaN weight", line)
    if x < 0:
        raise ParseError(f"negative weight {tok}", line)
    return x


def parse_adjacent_weights(text: str, n: int | None = None) -> AdjacentWeights:
    """``r1, r2, ...`` (comma or whitespace separated) or ``geom:r`` (needs n)."""
    text = text.strip()
    if text.startswith("geom:"):
        if n is None:
            raise ParseError("geom:r weights need the number of candidates")
        ratio = _number(text[5:])
        return AdjacentWeights.geometric(ratio, n)
    lines = list(_content_lines(text))
    if len(lines) != 1:
        raise ParseError(f"adjacent weights must be a single line, got {len(lines)}")
    k, line = lines[0]
    vals = [_number(t, k) for t in _tokens(line, sep="any")]
    if any(math.isinf(v) for v in vals):
        raise ParseError("adjacent weights must be finite", k)
    if n is not None and len(vals) != n - 1:
        raise ParseError(f"need {n - 1} adjacent weights for n={n}, got {len(vals)}", k)
    return AdjacentWeights(vals)


def parse_matrix_weights(text: str, n: int | None = None) -> TranspositionWeights:
    """``n`` lines of ``n`` entries; ``inf`` marks a forbidden swap."""
    lines = list(_content_lines(text))
    rows = []
    for k, line in lines:
        rows.append([_number(t, k) for t in _tokens(line, sep="any")])
    size = len(rows)
    if n is not None and size != n:
        raise ParseError(f"weight matrix has {size} rows, expected {n}")
    for (k, _), row in zip(lines, rows):
        if len(row) != size:
            raise ParseError(f"row has {len(row)} entries, expected {size}", k)
    m = np.array(rows, dtype=float)
    for a in range(size):
        for b in range(a + 1, size):
            same = (math.isinf(m[a, b]) and math.isinf(m[b, a])) or abs(m[a, b] - m[b, a]) <= 1e-9
            if not same:
                raise ParseError(f"matrix is not symmetric at ({a + 1},{b + 1})", lines[a][0])
    return TranspositionWeights(m)


def parse_tree(text: str, n: int | None = None) -> DefiningTree:
    """``n - 1`` lines ``u v w`` describing a weighted spanning tree."""
    edges = []
    for k, line in _content_lines(text):
        toks = _tokens(line, sep="any")
        if len(toks) != 3 or not (_is_int(toks[0]) and _is_int(toks[1])):
            raise ParseError("tree lines must read 'u v w'", k)
        w = _number(toks[2], k)
        if math.isinf(w):
            raise ParseError("tree edge weights must be finite", k)
        edges.append((int(toks[0]), int(toks[1]), w))
    size = len(edges) + 1
    if n is not None and size != n:
        raise ParseError(f"tree has {len(edges)} edges, expected {n - 1}")
    try:
        return DefiningTree(size, edges)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_source(spec: str) -> tuple[str, bool]:
    """Return (text, came_from_file): a path is read, anything else is taken literally."""
    if spec == "-":
        return sys.stdin.read(), True
    if os.path.isfile(spec):
        with open(spec, encoding="utf-8") as fh:
            return fh.read(), True
    return spec, False


def load_weights(spec: str, n: int):
    """Adjacent weights or a transposition matrix from a file path, inline text or ``geom:r``."""
    text, _ = read_source(spec)
    stripped = text.strip()
    if stripped.startswith("geom:"):
        return parse_adjacent_weights(stripped, n)
    if len(list(_content_lines(stripped))) <= 1:
        return parse_adjacent_weights(stripped, n)
    return parse_matrix_weights(stripped, n)
