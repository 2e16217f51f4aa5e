"""Tensor-product selection rules shared by the word, array and pair crystals.

A crystal operator on a tensor product acts on exactly one factor.  For the
two even regimes the factor is found by the signature rule (bracket
cancellation over per-factor epsilon/phi statistics); for the isotropic
direction it is the first-nonzero-weight-pairing rule applied left-nested.
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

from .superroot import AlgebraType, bilinear, simple_roots, wt_add, wt_zero

Selection = Tuple[Optional[int], Optional[int], int, int]


def signature_low(stats: Sequence[Tuple[int, int]]) -> Selection:
    """Rule for i < m: factors contribute (-^eps, +^phi); cancel (+,-).

    Returns (f_index, e_index, eps, phi) where f~ acts at the leftmost
    surviving + and e~ at the rightmost surviving -; None means the operator
    kills the element.
    """
    plus = []    # surviving +'s as factor indices (stack)
    minus = []   # surviving -'s as factor indices
    for k, (e, f) in enumerate(stats):
        for _ in range(e):
            if plus:
                plus.pop()
            else:
                minus.append(k)
        plus.extend([k] * f)
    f_idx = plus[0] if plus else None
    e_idx = minus[-1] if minus else None
    return f_idx, e_idx, len(minus), len(plus)


def signature_high(stats: Sequence[Tuple[int, int]]) -> Selection:
    """Reversed rule for i > m: factors contribute (+^phi, -^eps); cancel
    (-,+); f~ acts at the rightmost surviving +, e~ at the leftmost -."""
    minus = []   # stack of -'s waiting for a later +
    plus = []
    for k, (e, f) in enumerate(stats):
        for _ in range(f):
            if minus:
                minus.pop()
            else:
                plus.append(k)
        minus.extend([k] * e)
    f_idx = plus[-1] if plus else None
    e_idx = minus[0] if minus else None
    return f_idx, e_idx, len(minus), len(plus)


def select_iso(g: AlgebraType, weights: Sequence[Tuple[int, ...]]) -> int:
    """Factor index for the isotropic direction (left-nested rule): the last
    k with (wt(b_1) + ... + wt(b_{k-1}) | alpha_m) = 0."""
    alpha_m = simple_roots(g)[g.m]
    best = 0
    acc = wt_zero(g)
    for k in range(1, len(weights)):
        acc = wt_add(acc, weights[k - 1])
        if bilinear(g, acc, alpha_m) == 0:
            best = k
    return best
