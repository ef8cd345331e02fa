"""Named function families, composition, DNF formulas and the block-OR construction."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np

from .bfcore import CERTIFICATE_LIMIT, MAX_VARS, TruthTable, index_to_input, min_certificate
from .errors import LimitExceeded, ParseError, PreconditionError
from .report import map_trials

Term = tuple[frozenset, frozenset]


def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _bit(idx: np.ndarray, var: int) -> np.ndarray:
    return (idx >> (var - 1)) & 1


def _check_size(n: int):
    if n > MAX_VARS:
        raise LimitExceeded(f"{n} variables exceeds the truth-table limit {MAX_VARS}")


def make_named(kind: str, n: int, z=None) -> TruthTable:
    """``and``, ``or``, ``xor``, ``point`` (black point ``z``) or ``constant`` (value ``z``).

    ``kind`` may also carry the argument inline, e.g. ``"point(5)"`` (a table
    index) or ``"constant(1)"``. A sequence ``z`` is read as ``(x_1, ..., x_n)``.
    """
    m = re.fullmatch(r"\s*(\w+)\s*(?:\((.*)\))?\s*", kind)
    if not m:
        raise ValueError(f"unknown family {kind!r}")
    name, arg = m.group(1).lower(), m.group(2)
    if arg is not None and z is None:
        z = int(arg.strip())
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_size(n)
    idx = _indices(n)
    full = (1 << n) - 1
    if name == "and":
        bits = idx == full
    elif name == "or":
        bits = idx != 0
    elif name == "xor":
        bits = np.zeros(idx.shape, dtype=np.int64)
        for v in range(1, n + 1):
            bits ^= _bit(idx, v)
    elif name == "point":
        if z is None:
            raise ValueError("point needs a black point")
        if not isinstance(z, (int, np.integer)):
            z = sum(int(b) << i for i, b in enumerate(z))
        if not 0 <= z <= full:
            raise ValueError(f"point {z} out of range")
        bits = idx == z
    elif name == "constant":
        bits = np.full(1 << n, 1 if z else 0)
    else:
        raise ValueError(f"unknown family {kind!r}")
    return TruthTable(n, np.asarray(bits, dtype=np.uint8))


def pso(n: int) -> TruthTable:
    """Penalty shoot-out on ``2n + 1`` variables.

    Round ``i`` uses ``x_{2i-1}`` (A scores when 1) and ``x_{2i}`` (B scores
    when 0). A round is decisive iff exactly one side scores, i.e.
    ``x_{2i-1} == x_{2i}``, and then the output is ``x_{2i-1}``. With no
    decisive round the output is ``x_{2n+1}``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    nv = 2 * n + 1
    _check_size(nv)
    idx = _indices(nv)
    out = _bit(idx, nv)
    decided = np.zeros(idx.shape, dtype=bool)
    for i in range(1, n + 1):
        a, b = _bit(idx, 2 * i - 1), _bit(idx, 2 * i)
        now = (a == b) & ~decided
        out = np.where(now, a, out)
        decided |= now
    return TruthTable(nv, out.astype(np.uint8))


def compose(F: TruthTable, G: TruthTable) -> TruthTable:
    """``F(G(x^(1)), ..., G(x^(n)))`` with block ``k`` on variables ``(k-1)m+1 .. km``."""
    n, m = F.n, G.n
    total = n * m
    _check_size(total)
    idx = _indices(total)
    mask = (1 << m) - 1
    g = G.bits.astype(np.int64)
    outer = np.zeros(idx.shape, dtype=np.int64)
    for k in range(n):
        outer |= g[(idx >> (k * m)) & mask] << k
    return TruthTable(total, F.bits[outer])


# ---------------------------------------------------------------------------
# DNF formulas

@dataclass(frozen=True)
class DnfFormula:
    """OR of terms; each term is ``(positive vars, negative vars)``, 1-based."""

    n: int
    terms: tuple[Term, ...]

    def __post_init__(self):
        terms = tuple((frozenset(p), frozenset(q)) for p, q in self.terms)
        for pos, neg in terms:
            if not pos and not neg:
                raise ValueError("empty term")
            if pos & neg:
                raise ValueError(f"contradictory literals on x{min(pos & neg)}")
            for v in pos | neg:
                if not 1 <= v <= self.n:
                    raise ValueError(f"variable x{v} out of range 1..{self.n}")
        object.__setattr__(self, "terms", terms)

    @property
    def width(self) -> int:
        return max((len(p) + len(q) for p, q in self.terms), default=0)

    @property
    def size(self) -> int:
        return len(self.terms)

    def evaluate(self, x) -> int:
        if isinstance(x, (int, np.integer)):
            x = index_to_input(int(x), self.n)
        return int(any(all(x[v - 1] for v in p) and not any(x[v - 1] for v in q)
                       for p, q in self.terms))

    def to_table(self) -> TruthTable:
        _check_size(self.n)
        idx = _indices(self.n)
        out = np.zeros(idx.shape, dtype=bool)
        for pos, neg in self.terms:
            pm = sum(1 << (v - 1) for v in pos)
            nm = sum(1 << (v - 1) for v in neg)
            out |= (idx & (pm | nm)) == pm
        return TruthTable(self.n, out.astype(np.uint8))

    def __str__(self):
        return dnf_print(self)


def dnf_eval(phi: DnfFormula, x) -> int:
    return phi.evaluate(x)


def dnf_to_table(phi: DnfFormula) -> TruthTable:
    return phi.to_table()


def _term_text(term: Term) -> str:
    pos, neg = term
    lits = sorted([(v, "") for v in pos] + [(v, "!") for v in neg])
    return " ".join(f"{s}x{v}" for v, s in lits)


def dnf_print(phi: DnfFormula, header: bool = True) -> str:
    """Text form; ``header`` adds the ``n=<int>`` line used by files."""
    body = " | ".join(_term_text(t) for t in phi.terms)
    return f"n={phi.n}\n{body}\n" if header else body


_TOKEN = re.compile(r"\s+|\||!?x\d+|\S+")


def dnf_parse(text: str, n: int | None = None) -> DnfFormula:
    """Parse ``x1 x2 | !x1 x3``; an optional first line ``n=<int>`` fixes ``n``.

    Without a header or ``n`` argument, ``n`` is the largest index used.
    Terms may span lines; ``|`` separates terms. Errors carry 1-based
    line and column.
    """
    lines = text.splitlines()
    start = 0
    while start < len(lines) and not lines[start].strip():
        start += 1
    if start < len(lines) and lines[start].strip().startswith("n"):
        head = re.fullmatch(r"\s*n\s*=\s*(\d+)\s*", lines[start])
        if not head:
            col = len(lines[start]) - len(lines[start].lstrip()) + 1
            raise ParseError("expected header 'n=<int>'", start + 1, col)
        header_n = int(head.group(1))
        if n is not None and n != header_n:
            raise ParseError(f"header says n={header_n}, caller says n={n}", start + 1, 1)
        n = header_n
        start += 1

    terms: list[Term] = []
    pos: set[int] = set()
    neg: set[int] = set()
    seen: dict[int, int] = {}
    last = (start + 1, 1)
    pending_bar = None

    def close(at):
        nonlocal pos, neg, seen
        if not pos and not neg:
            raise ParseError("empty term", *at)
        terms.append((frozenset(pos), frozenset(neg)))
        pos, neg, seen = set(), set(), {}

    any_token = False
    for lineno in range(start, len(lines)):
        line = lines[lineno]
        for m in _TOKEN.finditer(line):
            tok = m.group(0)
            at = (lineno + 1, m.start() + 1)
            if tok.isspace():
                continue
            any_token = True
            last = (lineno + 1, m.end() + 1)
            if tok == "|":
                close(at)
                pending_bar = at
                continue
            lit = re.fullmatch(r"(!?)x(\d+)", tok)
            if not lit:
                raise ParseError(f"unexpected token {tok!r}", *at)
            v = int(lit.group(2))
            if v < 1:
                raise ParseError("variable indices start at 1", *at)
            if n is not None and v > n:
                raise ParseError(f"x{v} exceeds n={n}", *at)
            sign = 0 if lit.group(1) else 1
            if seen.setdefault(v, sign) != sign:
                raise ParseError(f"contradictory literals on x{v} in one term", *at)
            (pos if sign else neg).add(v)
            pending_bar = None
    if any_token:
        if pending_bar is not None and not pos and not neg:
            raise ParseError("empty term after '|'", *pending_bar)
        close(last)
    if n is None:
        n = max((max(p | q) for p, q in terms), default=0)
    return DnfFormula(n, tuple(terms))


def canonical_dnf(f: TruthTable) -> DnfFormula:
    """One width-``n`` term per black point."""
    all_vars = frozenset(range(1, f.n + 1))
    terms = []
    for x in f.ones():
        pos = frozenset(v for v in all_vars if (int(x) >> (v - 1)) & 1)
        terms.append((pos, all_vars - pos))
    return DnfFormula(f.n, tuple(terms))


def read_dnf(path) -> DnfFormula:
    text = Path(path).read_text()
    if not text.lstrip().startswith("n"):
        raise ParseError("DNF files start with 'n=<int>'", 1, 1)
    return dnf_parse(text)


def write_dnf(phi: DnfFormula, path) -> None:
    Path(path).write_text(dnf_print(phi))


def random_dnf(n: int, width: int, size: int, rng: np.random.Generator) -> DnfFormula:
    """``size`` random terms, each on ``width`` distinct variables with random signs."""
    terms = []
    for _ in range(size):
        vs = rng.choice(n, size=width, replace=False) + 1
        signs = rng.integers(0, 2, size=width)
        terms.append((frozenset(int(v) for v, s in zip(vs, signs) if s),
                      frozenset(int(v) for v, s in zip(vs, signs) if not s)))
    return DnfFormula(n, tuple(terms))


# ---------------------------------------------------------------------------
# block-OR construction: f(x) = OR_k g(x^(k))

@dataclass(frozen=True)
class Theorem13Instance:
    n: int
    w: int
    m: int
    h: int
    s: int
    g: TruthTable
    d: int
    p: Fraction
    candidate: int
    candidate_certificates: tuple[int, ...]
    formula: DnfFormula

    def block_tables(self) -> list[TruthTable]:
        """``g`` on block ``k`` as an ``n``-variable table, ``k = 1..h``."""
        idx = _indices(self.n)
        mask = (1 << self.w) - 1
        return [TruthTable(self.n, self.g.bits[(idx >> (k * self.w)) & mask])
                for k in range(self.h)]


def theorem13_construct(n: int, w: int, candidates: int = 32, seed: int = 0,
                        threads: int = 1) -> Theorem13Instance:
    """Best-of-``candidates`` sample of ``g`` in ``B_{w,m}`` and the block DNF.

    Candidate ``c`` is drawn from seed ``seed XOR c``; the winner maximizes
    ``min_certificate(g)``, ties to the lowest ``c``.
    """
    from .randgen import sample_fixed_weight

    if n < 2 or not 2 * math.log2(n) <= w <= n:
        raise PreconditionError("2 log n <= w <= n", f"n={n}, w={w}")
    if w > CERTIFICATE_LIMIT:
        raise LimitExceeded(f"w = {w} exceeds the certificate search limit {CERTIFICATE_LIMIT}")
    if candidates < 1:
        raise ValueError("need at least one candidate")
    m = -(-(1 << w) // (2 * n))
    h = n // w
    s = -(-(1 << w) // w)

    def trial(c):
        g = sample_fixed_weight(w, m, seed ^ c)
        return g, min_certificate(g)

    found = map_trials(trial, range(candidates), threads)
    certs = tuple(d for _, d in found)
    best = max(range(candidates), key=lambda c: (certs[c], -c))
    g, d = found[best]

    terms = []
    for k in range(h):
        off = k * w
        for z in g.ones():
            z = int(z)
            pos = frozenset(off + i for i in range(1, w + 1) if (z >> (i - 1)) & 1)
            neg = frozenset(off + i for i in range(1, w + 1) if not (z >> (i - 1)) & 1)
            terms.append((pos, neg))
    return Theorem13Instance(n=n, w=w, m=m, h=h, s=s, g=g, d=d, p=Fraction(m, 1 << w),
                             candidate=best, candidate_certificates=certs,
                             formula=DnfFormula(n, tuple(terms)))


def theorem13_bounds(inst: Theorem13Instance) -> tuple[Fraction, float]:
    """``(h d (1-p)^h, h (log2 m + 2))``."""
    lower = inst.h * inst.d * (1 - inst.p) ** inst.h
    upper = inst.h * (math.log2(inst.m) + 2)
    return Fraction(lower), upper


def theorem13_strategy(inst: Theorem13Instance, f: TruthTable | None = None):
    """Evaluate the blocks in order with the naive procedure, stopping at a 1."""
    from .strategies import sequential_or_strategy

    f = inst.formula.to_table() if f is None else f
    return sequential_or_strategy(f, inst.block_tables(), name="block-sequential")


def named_families() -> Iterable[str]:
    return ("and", "or", "xor", "point", "constant")
