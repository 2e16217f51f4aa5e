"""The quantum shuffle algebra on the alphabet w_0 < ... < w_{m+n-1}.

Elements are finite maps word -> Scalar (plain dicts; words are int tuples).
This module carries the twisted shuffle product, the closed-form images of
the radical root vectors, the same images rebuilt through the root-vector
recursion (the two are compared as an oracle-coherence property), and a
dynamic program that extracts a single word coefficient from a product
without expanding it.  The embedding of the negative half sends f_i to the
one-letter word (i,), so a free word in the f_i maps to the iterated
shuffle of its letters.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .qscalar import ONE, ZERO, Scalar, q_int
from .superroot import (AlgebraType, Root, RootSystem, bracket_divisor,
                        costandard_factorization, q_factor_parts,
                        root_system, wt_add, wt_zero)

Word = Tuple[int, ...]
SV = Dict[Word, Scalar]

EMPTY: Word = ()


def sv_iadd_scaled(acc: SV, vec: SV, c: Scalar) -> SV:
    """acc += c * vec, dropping exact zeros."""
    if not c:
        return acc
    for w, x in vec.items():
        y = acc.get(w)
        y = c * x if y is None else y + c * x
        if y:
            acc[w] = y
        elif w in acc:
            del acc[w]
    return acc


def sv_scale(vec: SV, c: Scalar) -> SV:
    if not c:
        return {}
    return {w: c * x for w, x in vec.items()}


def sv_sub(a: SV, b: SV) -> SV:
    out = dict(a)
    from .qscalar import MINUS_ONE
    return sv_iadd_scaled(out, b, MINUS_ONE)


def max_word(vec: SV) -> Word:
    return max(vec)


def _laurent_iadd(acc: dict, other: dict, sign: int, shift: int):
    for e, c in other.items():
        k = e + shift
        v = acc.get(k, 0) + sign * c
        if v:
            acc[k] = v
        elif k in acc:
            del acc[k]


class _TrieNode:
    __slots__ = ("children", "weight", "coeff")

    def __init__(self, weight):
        self.children: Dict[int, "_TrieNode"] = {}
        self.weight = weight
        self.coeff = None


class ShuffleAlgebra:
    """Per-algebra shuffle context: memoized products and root-vector images."""

    def __init__(self, g: AlgebraType):
        self.g = g
        self.rs: RootSystem = root_system(g)
        self._pair: Dict[Tuple[Word, Word], SV] = {}
        self._closed: Dict[int, SV] = {}
        self._recursive: Dict[Tuple[int, bool], SV] = {}
        self._prew: Dict[Word, List[Tuple[int, ...]]] = {}
        self._tries: Dict[int, tuple] = {}

    # -- weights -------------------------------------------------------------

    def word_weight(self, w: Word):
        wt = wt_zero(self.g)
        for let in w:
            wt = wt_add(wt, self.rs.alphas[let])
        return wt

    def _prefix_weights(self, w: Word) -> List[Tuple[int, ...]]:
        hit = self._prew.get(w)
        if hit is not None:
            return hit
        out = [wt_zero(self.g)]
        for let in w:
            out.append(wt_add(out[-1], self.rs.alphas[let]))
        self._prew[w] = out
        return out

    # -- the product ----------------------------------------------------------

    def shuffle_words(self, u: Word, v: Word) -> SV:
        """u * v for single words, memoized."""
        if not u:
            return {v: ONE}
        if not v:
            return {u: ONE}
        key = (u, v)
        hit = self._pair.get(key)
        if hit is not None:
            return hit
        upre = self._prefix_weights(u)
        vpre = self._prefix_weights(v)
        alphas = self.rs.alphas
        g = self.g
        # grid of prefix shuffles; cells hold {word: laurent dict}
        prev_row: List[Dict[Word, dict]] = [dict() for _ in range(len(v) + 1)]
        prev_row[0] = {EMPTY: {0: 1}}
        for j in range(1, len(v) + 1):
            prev_row[j] = {v[:j]: {0: 1}}
        for i in range(1, len(u) + 1):
            row: List[Dict[Word, dict]] = [dict() for _ in range(len(v) + 1)]
            row[0] = {u[:i]: {0: 1}}
            for j in range(1, len(v) + 1):
                cell: Dict[Word, dict] = {}
                for w, lau in row[j - 1].items():
                    acc = cell.setdefault(w + (v[j - 1],), {})
                    sgn, k = q_factor_parts(g, upre[i], alphas[v[j - 1]])
                    _laurent_iadd(acc, lau, sgn, -k)
                for w, lau in prev_row[j].items():
                    acc = cell.setdefault(w + (u[i - 1],), {})
                    _laurent_iadd(acc, lau, 1, 0)
                row[j] = {w: lau for w, lau in cell.items() if lau}
            prev_row = row
        out = {w: Scalar.from_laurent(lau) for w, lau in prev_row[len(v)].items()}
        self._pair[key] = out
        return out

    def shuffle(self, a: SV, b: SV) -> SV:
        out: SV = {}
        for u, cu in a.items():
            for v, cv in b.items():
                sv_iadd_scaled(out, self.shuffle_words(u, v), cu * cv)
        return out

    def shuffle_letter(self, a: SV, letter: int, on_right: bool) -> SV:
        w = (letter,)
        out: SV = {}
        for u, cu in a.items():
            prod = self.shuffle_words(u, w) if on_right else self.shuffle_words(w, u)
            sv_iadd_scaled(out, prod, cu)
        return out

    def psi_free(self, fe: SV) -> SV:
        """Image of a free element (a map generator-word -> Scalar)."""
        out: SV = {}
        for word, c in fe.items():
            img: SV = {EMPTY: ONE}
            for let in word:
                img = self.shuffle(img, {(let,): ONE})
            sv_iadd_scaled(out, img, c)
        return out

    # -- coefficient extraction ------------------------------------------------

    def coeff_in_words(self, w: Word, factors: Sequence[Word]) -> Scalar:
        """Coefficient of the word w inside factors[0] * ... * factors[-1]."""
        total = sum(len(f) for f in factors)
        if total != len(w):
            return ZERO
        pres = [self._prefix_weights(f) for f in factors]
        alphas = self.rs.alphas
        g = self.g
        k = len(factors)
        memo: Dict[Tuple[int, ...], dict] = {(0,) * k: {0: 1}}

        def rec(state: Tuple[int, ...]) -> dict:
            hit = memo.get(state)
            if hit is not None:
                return hit
            pos = sum(state)
            letter = w[pos - 1]
            acc: dict = {}
            for t in range(k):
                jt = state[t]
                if jt == 0 or factors[t][jt - 1] != letter:
                    continue
                sub = rec(state[:t] + (jt - 1,) + state[t + 1:])
                if not sub:
                    continue
                left = wt_zero(g)
                for s in range(t):
                    left = wt_add(left, pres[s][state[s]])
                sgn, sh = q_factor_parts(g, left, alphas[letter])
                _laurent_iadd(acc, sub, sgn, -sh)
            memo[state] = acc
            return acc

        return Scalar.from_laurent(rec(tuple(len(f) for f in factors)))

    def _trie(self, vec: SV) -> "_TrieNode":
        key = id(vec)
        hit = self._tries.get(key)
        if hit is not None and hit[0] is vec:
            return hit[1]
        root = _TrieNode(wt_zero(self.g))
        for word, c in vec.items():
            node = root
            for let in word:
                child = node.children.get(let)
                if child is None:
                    child = _TrieNode(wt_add(node.weight, self.rs.alphas[let]))
                    node.children[let] = child
                node = child
            node.coeff = c
        self._tries[key] = (vec, root)
        return root

    def coeff_in_pair(self, w: Word, a: SV, b: SV) -> Scalar:
        """Coefficient of w in a * b, by a DP over pairs of trie nodes."""
        ta, tb = self._trie(a), self._trie(b)
        g, alphas = self.g, self.rs.alphas
        states: Dict[Tuple["_TrieNode", "_TrieNode"], dict] = {(ta, tb): {0: 1}}
        for let in w:
            nxt: Dict[Tuple["_TrieNode", "_TrieNode"], dict] = {}
            for (na, nb), lau in states.items():
                ca = na.children.get(let)
                if ca is not None:
                    acc = nxt.setdefault((ca, nb), {})
                    _laurent_iadd(acc, lau, 1, 0)
                cb = nb.children.get(let)
                if cb is not None:
                    sgn, k = q_factor_parts(g, na.weight, alphas[let])
                    acc = nxt.setdefault((na, cb), {})
                    _laurent_iadd(acc, lau, sgn, -k)
            states = {s: l for s, l in nxt.items() if l}
            if not states:
                return ZERO
        out = ZERO
        for (na, nb), lau in states.items():
            if na.coeff is not None and nb.coeff is not None:
                out = out + na.coeff * nb.coeff * Scalar.from_laurent(lau)
        return out

    def coeff_in_product(self, w: Word, vecs: Sequence[SV]) -> Scalar:
        """Coefficient of w in the shuffle product of the given vectors."""
        if len(vecs) == 1:
            return vecs[0].get(w, ZERO)
        if len(vecs) == 2:
            return self.coeff_in_pair(w, vecs[0], vecs[1])
        need: Dict[int, int] = {}
        for let in w:
            need[let] = need.get(let, 0) + 1
        counters = []
        for vec in vecs:
            cs = []
            for word in vec:
                cnt: Dict[int, int] = {}
                ok = len(word) <= len(w)
                for let in word:
                    cnt[let] = cnt.get(let, 0) + 1
                    if cnt[let] > need.get(let, 0):
                        ok = False
                        break
                if ok:
                    cs.append((word, cnt))
            counters.append(cs)

        out = ZERO
        choice: List[Word] = []

        def dfs(t: int, remaining: Dict[int, int], coeff: Scalar):
            nonlocal out
            if t == len(vecs):
                if any(remaining.values()):
                    return
                out = out + coeff * self.coeff_in_words(w, tuple(choice))
                return
            for word, cnt in counters[t]:
                if any(remaining.get(l, 0) < c for l, c in cnt.items()):
                    continue
                c = vecs[t][word]
                for l, cc in cnt.items():
                    remaining[l] -= cc
                choice.append(word)
                dfs(t + 1, remaining, coeff * c)
                choice.pop()
                for l, cc in cnt.items():
                    remaining[l] += cc

        dfs(0, dict(need), ONE)
        return out

    # -- last-letter truncation (the shuffle side of e'_i) ----------------------

    def r_last(self, vec: SV, i: int) -> SV:
        return {w[:-1]: c for w, c in vec.items() if w and w[-1] == i}

    # -- root-vector images ------------------------------------------------------

    def _one_minus_qa2(self, a: int) -> Scalar:
        k = 2 * self.g.r_g if a <= self.g.m else -2 * self.g.r_g
        return ONE - Scalar.q_power(k)

    def _coeff_a(self, i: int) -> Scalar:
        out = ONE
        for a in range(1, i + 1):
            out = out * self._one_minus_qa2(a)
        return out

    def _coeff_b(self, i: int) -> Scalar:
        out = ONE
        for a in range(2, i + 1):
            out = out * self._one_minus_qa2(a)
        return out

    @staticmethod
    def _prepend(letter: int, vec: SV) -> SV:
        return {(letter,) + w: c for w, c in vec.items()}

    def psi_image(self, p: int) -> SV:
        """Closed-form image of the radical root vector at position p."""
        hit = self._closed.get(p)
        if hit is not None:
            return hit
        rs, g = self.rs, self.g
        root = rs.roots[p]
        if root.kind != "u":
            raise ValueError("closed-form images exist for radical roots only")
        i, j = root.i, root.j
        rng = lambda a, b: tuple(range(a, b + 1))
        q = Scalar.q_power(1)
        if g.family == "b":
            if i == j == 1:
                out = {(0,): ONE}
            elif i == j:
                out = sv_scale({rng(0, i - 1): ONE}, self._coeff_a(i - 1))
            elif i == 1:
                c = (q.inverse() - q) * self._coeff_a(j - 1)
                out = sv_scale({(0,) + rng(0, j - 1): ONE}, c)
            else:
                c = (q.inverse() - q) * self._coeff_a(i - 1) * self._coeff_a(j - 1)
                inner = self.shuffle_words(rng(1, i - 1), rng(0, j - 1))
                out = sv_scale(self._prepend(0, inner), c)
        elif g.family == "c":
            one_p_q2 = ONE + q * q
            if i == j == 1:
                out = {(0,): ONE}
            elif i == 1:
                out = sv_scale({rng(0, j - 1): ONE}, one_p_q2 * self._coeff_a(j - 1))
            elif i < j:
                c = one_p_q2 * self._coeff_a(i - 1) * self._coeff_a(j - 1)
                inner = self.shuffle_words(rng(1, i - 1), rng(1, j - 1))
                out = sv_scale(self._prepend(0, inner), c)
            else:
                c = q * self._coeff_a(i - 1) * self._coeff_a(i - 1)
                inner = self.shuffle_words(rng(1, i - 1), rng(1, i - 1))
                out = sv_scale(self._prepend(0, inner), c)
        else:
            one_m_q2 = ONE - q * q
            if (i, j) == (1, 2):
                out = {(0,): ONE}
            elif i == 1:
                out = sv_scale({(0,) + rng(2, j - 1): ONE}, self._coeff_b(j - 1))
            elif i < j:
                c = one_m_q2 * self._coeff_b(i - 1) * self._coeff_b(j - 1)
                t1 = self.shuffle_words(rng(1, i - 1), rng(2, j - 1))
                t2 = self.shuffle_words(rng(2, i - 1), rng(1, j - 1))
                inner = sv_iadd_scaled(dict(t1), t2, -q)
                out = sv_scale(self._prepend(0, inner), c)
            else:
                c = q * one_m_q2 * self._coeff_b(i - 1) * self._coeff_b(i - 1)
                inner = self.shuffle_words(rng(1, i - 1), rng(2, i - 1))
                out = sv_scale(self._prepend(0, inner), c)
        self._closed[p] = out
        return out

    def psi_root_vector(self, p: int, odd_braces: bool = False) -> SV:
        """Image of the root vector built by the bracket recursion."""
        key = (p, odd_braces)
        hit = self._recursive.get(key)
        if hit is not None:
            return hit
        rs, g = self.rs, self.g
        root = rs.roots[p]
        if rs.ht[p] == 1:
            out = {rs.word[p]: ONE}
        else:
            if (g.family == "d" and root.kind == "u" and root.i == root.j):
                u = root.i - 1
                p1 = rs.upos(u, u + 1)
                p2 = rs.pos[Root("l", u, u + 1)]
                divisor = q_int(2, 1)
            else:
                p1, p2, r = costandard_factorization(rs, p)
                divisor = bracket_divisor(rs, p1, p2, r, odd_braces)
            a = self.psi_root_vector(p1, odd_braces)
            b = self.psi_root_vector(p2, odd_braces)
            sgn, k = q_factor_parts(g, rs.beta[p1], rs.beta[p2])
            out = self.shuffle(b, a)
            sv_iadd_scaled(out, self.shuffle(a, b), Scalar.monomial(-sgn, -k))
            inv = divisor.inverse()
            out = {w: c * inv for w, c in out.items()}
        self._recursive[key] = out
        return out


def _sa_cache():
    cache: Dict[Tuple[str, int, int], ShuffleAlgebra] = {}

    def get(g: AlgebraType) -> ShuffleAlgebra:
        key = (g.family, g.m, g.n)
        if key not in cache:
            cache[key] = ShuffleAlgebra(g)
        return cache[key]

    return get


shuffle_algebra = _sa_cache()
