"""Hook partitions and hook semistandard tableaux with their crystal
structure.

Letters live in {1, ..., m+n}; the first m are "even", the rest "odd".  A
tableau is a tuple of weakly decreasing row tuples subject to the hook
semistandard conditions: rows and columns weakly increase, even letters are
strict down columns, odd letters are strict along rows.  The crystal
operators act through the column word (read column by column, right to
left, top to bottom), each letter being a vertex of the standard crystal
1 -> 2 -> ... -> m+n.
"""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .superroot import AlgebraType, Weight, bilinear, delta, simple_roots, \
    wt_add, wt_zero
from .tensorrule import select_iso, signature_high, signature_low

Partition = Tuple[int, ...]
Tableau = Tuple[Tuple[int, ...], ...]
Word = Tuple[int, ...]


# -- partitions ---------------------------------------------------------------

def normalize_partition(parts: Iterable[int]) -> Partition:
    out = tuple(p for p in parts if p)
    if any(out[k] < out[k + 1] for k in range(len(out) - 1)) or \
            any(p < 0 for p in out):
        raise ValueError("not weakly decreasing: %r" % (out,))
    return out


def conjugate(parts: Sequence[int]) -> Partition:
    parts = [p for p in parts if p]
    if not parts:
        return ()
    return tuple(sum(1 for p in parts if p >= j) for j in range(1, parts[0] + 1))


def is_hook(g: AlgebraType, lam: Partition) -> bool:
    return len(lam) <= g.m or lam[g.m] <= g.n


def hook_partitions(g: AlgebraType, max_size: int) -> List[Partition]:
    """All (m|n)-hook partitions with at most max_size boxes."""
    out = []

    def rec(first: int, left: int, acc: List[int]):
        out.append(tuple(acc))
        for p in range(min(first, left), 0, -1):
            acc.append(p)
            if is_hook(g, tuple(acc)):
                rec(p, left - p, acc)
            acc.pop()

    rec(max_size, max_size, [])
    return sorted(set(out))


def hw_weight(g: AlgebraType, lam: Partition) -> Weight:
    """Lambda_lambda for a hook partition."""
    lam = normalize_partition(lam)
    if not is_hook(g, lam):
        raise ValueError("%r is not an (%d|%d)-hook partition" % (lam, g.m, g.n))
    mu = conjugate(lam[g.m:])
    coords = [0] * g.rank
    for i in range(min(g.m, len(lam))):
        coords[i] = lam[i]
    for j, x in enumerate(mu):
        coords[g.m + j] = x
    return tuple(coords)


def weight_to_hook(g: AlgebraType, w: Weight) -> Optional[Partition]:
    """Invert hw_weight; None when w is not of the form Lambda_mu."""
    top = list(w[:g.m])
    arm = list(w[g.m:])
    if any(x < 0 for x in w):
        return None
    if any(top[k] < top[k + 1] for k in range(len(top) - 1)):
        return None
    if any(arm[k] < arm[k + 1] for k in range(len(arm) - 1)):
        return None
    tail = conjugate(arm)
    lam = tuple(p for p in top if p) + tail
    try:
        lam = normalize_partition(lam)
    except ValueError:
        return None
    if not is_hook(g, lam):
        return None
    if hw_weight(g, lam) != tuple(w):
        return None
    return lam


# -- tableaux -----------------------------------------------------------------

def shape(t: Tableau) -> Partition:
    return tuple(len(r) for r in t)


def is_hook_semistandard(g: AlgebraType, t: Tableau) -> bool:
    m, rank = g.m, g.rank
    rows = len(t)
    for r in range(rows):
        if r + 1 < rows and len(t[r + 1]) > len(t[r]):
            return False
        for c, x in enumerate(t[r]):
            if not 1 <= x <= rank:
                return False
            if c > 0:
                if x < t[r][c - 1]:
                    return False
                if x == t[r][c - 1] and x > m:
                    return False
            if r > 0 and c < len(t[r - 1]):
                if x < t[r - 1][c]:
                    return False
                if x == t[r - 1][c] and x <= m:
                    return False
    return is_hook(g, shape(t))


def genuine_hw(g: AlgebraType, lam: Partition) -> Tableau:
    """H_lambda: rows 1..m filled with the row index, then the j-th column of
    the remaining diagram filled with m+j."""
    lam = normalize_partition(lam)
    if not is_hook(g, lam):
        raise ValueError("%r is not an (%d|%d)-hook partition" % (lam, g.m, g.n))
    rows: List[Tuple[int, ...]] = []
    for i in range(min(g.m, len(lam))):
        rows.append((i + 1,) * lam[i])
    for r in range(g.m, len(lam)):
        rows.append(tuple(g.m + c + 1 for c in range(lam[r])))
    return tuple(rows)


def reading_order(lam: Partition) -> List[Tuple[int, int]]:
    """Box coordinates in column-word order (columns right to left)."""
    boxes = []
    width = lam[0] if lam else 0
    for c in range(width - 1, -1, -1):
        for r in range(len(lam)):
            if lam[r] > c:
                boxes.append((r, c))
    return boxes


def column_word(t: Tableau) -> Word:
    return tuple(t[r][c] for r, c in reading_order(shape(t)))


def tableau_weight(g: AlgebraType, t: Tableau) -> Weight:
    coords = [0] * g.rank
    for row in t:
        for x in row:
            coords[x - 1] += 1
    return tuple(coords)


def word_weight(g: AlgebraType, w: Word) -> Weight:
    coords = [0] * g.rank
    for x in w:
        coords[x - 1] += 1
    return tuple(coords)


# -- crystal structure ---------------------------------------------------------

def _letter_stats(i: int, x: int) -> Tuple[int, int]:
    """(eps_i, phi_i) of a single letter of the standard crystal."""
    return (1 if x == i + 1 else 0, 1 if x == i else 0)


def word_op_position(g: AlgebraType, i: int, w: Word, direction: str
                     ) -> Optional[int]:
    """Index in w on which e~_i/f~_i acts, or None when the result is 0."""
    if not 1 <= i <= g.rank - 1:
        raise ValueError("i must lie in I \\ {0}")
    if not w:
        return None
    if i == g.m:
        k = select_iso(g, [delta(g, x) for x in w])
        x = w[k]
        if direction == "f":
            return k if x == i else None
        return k if x == i + 1 else None
    stats = [_letter_stats(i, x) for x in w]
    fi, ei, _, _ = (signature_low if i < g.m else signature_high)(stats)
    k = fi if direction == "f" else ei
    if k is None:
        return None
    x = w[k]
    if direction == "f":
        return k if x == i else None
    return k if x == i + 1 else None


def word_eps_phi(g: AlgebraType, i: int, w: Word) -> Tuple[int, int]:
    if i == g.m:
        e = 1 if word_op_position(g, i, w, "e") is not None else 0
        f = 1 if word_op_position(g, i, w, "f") is not None else 0
        return e, f
    stats = [_letter_stats(i, x) for x in w]
    _, _, eps, phi = (signature_low if i < g.m else signature_high)(stats)
    return eps, phi


def crystal_op(g: AlgebraType, i: int, t: Tableau, direction: str
               ) -> Optional[Tableau]:
    """f~_i (direction 'f') or e~_i (direction 'e') on a tableau, or None."""
    w = column_word(t)
    k = word_op_position(g, i, w, direction)
    if k is None:
        return None
    r, c = reading_order(shape(t))[k]
    new = i + 1 if direction == "f" else i
    rows = [list(row) for row in t]
    rows[r][c] = new
    out = tuple(tuple(row) for row in rows)
    return out


def eps_phi(g: AlgebraType, i: int, t: Tableau) -> Tuple[int, int]:
    return word_eps_phi(g, i, column_word(t))


def enumerate_sst(g: AlgebraType, lam: Partition) -> List[Tableau]:
    """All (m|n)-hook semistandard tableaux of the given shape."""
    lam = normalize_partition(lam)
    if not lam:
        return [()]
    m, rank = g.m, g.rank
    rows = len(lam)
    grid = [[0] * lam[r] for r in range(rows)]
    out: List[Tableau] = []
    cells = [(r, c) for r in range(rows) for c in range(lam[r])]

    def ok(r: int, c: int, x: int) -> bool:
        if c > 0:
            left = grid[r][c - 1]
            if x < left or (x == left and x > m):
                return False
        if r > 0:
            up = grid[r - 1][c]
            if x < up or (x == up and x <= m):
                return False
        return True

    def rec(idx: int):
        if idx == len(cells):
            out.append(tuple(tuple(row) for row in grid))
            return
        r, c = cells[idx]
        lo = 1
        if c > 0:
            lo = max(lo, grid[r][c - 1])
        if r > 0:
            lo = max(lo, grid[r - 1][c])
        for x in range(lo, rank + 1):
            if ok(r, c, x):
                grid[r][c] = x
                rec(idx + 1)
        grid[r][c] = 0

    rec(0)
    return out


def connectivity_report(g: AlgebraType, lam: Partition) -> dict:
    """BFS check that SST_{m|n}(lam) is connected with unique source H_lam."""
    lam = normalize_partition(lam)
    full = set(enumerate_sst(g, lam))
    start = genuine_hw(g, lam)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for t in frontier:
            for i in range(1, g.rank):
                for d in ("f", "e"):
                    u = crystal_op(g, i, t, d)
                    if u is not None and u not in seen:
                        seen.add(u)
                        nxt.append(u)
        frontier = nxt
    sources = [t for t in full
               if all(crystal_op(g, i, t, "e") is None
                      for i in range(1, g.rank))]
    return {
        "shape": list(lam),
        "tableaux": len(full),
        "reached": len(seen),
        "connected": seen == full,
        "sources": len(sources),
        "unique_source_is_hw": sources == [start],
        "ok": seen == full and sources == [start],
    }


def tableau_to_json(t: Tableau) -> List[List[int]]:
    return [list(r) for r in t]


def tableau_from_json(rows: Iterable[Iterable[int]]) -> Tableau:
    return tuple(tuple(int(x) for x in r) for r in rows)
