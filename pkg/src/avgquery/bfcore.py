"""Truth tables, restrictions, weight, equivalent coordinate sets, certificates.

Index convention: the input ``x = (x_1, ..., x_n)`` lives at table index
``sum(x_i << (i - 1))``, so ``x_1`` is the least significant bit. Variables are
1-based in every public function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError, PreconditionError, LimitExceeded

MAX_VARS = 24
CERTIFICATE_LIMIT = 16


@dataclass(frozen=True, eq=False)
class TruthTable:
    """Complete output table of ``f : {0,1}^n -> {0,1}``.

    ``bits[i]`` is ``f`` at table index ``i``. The array is stored read-only so
    tables can be shared and hashed.
    """

    n: int
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VARS:
            raise LimitExceeded(f"n = {self.n} outside 0..{MAX_VARS}")
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8).reshape(-1)
        if bits.size != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} bits, got {bits.size}")
        if bits.size and bits.max(initial=0) > 1:
            raise ValueError("truth table entries must be 0 or 1")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_ones(cls, n: int, ones: Iterable[int]) -> "TruthTable":
        bits = np.zeros(1 << n, dtype=np.uint8)
        bits[np.fromiter(ones, dtype=np.int64)] = 1
        return cls(n, bits)

    @classmethod
    def from_callable(cls, n: int, fn) -> "TruthTable":
        """Tabulate ``fn(x)`` where ``x`` is a tuple ``(x_1, ..., x_n)``."""
        bits = [int(bool(fn(index_to_input(i, n)))) for i in range(1 << n)]
        return cls(n, np.array(bits, dtype=np.uint8))

    @classmethod
    def constant(cls, n: int, value: int) -> "TruthTable":
        return cls(n, np.full(1 << n, int(bool(value)), dtype=np.uint8))

    def __call__(self, x) -> int:
        return int(self.bits[as_index(x, self.n)])

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, self.bits.tobytes()))

    def __len__(self):
        return self.bits.size

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.bits))

    def is_constant(self) -> bool:
        w = self.weight
        return w == 0 or w == self.bits.size

    def ones(self) -> np.ndarray:
        """Table indices of the black points, ascending."""
        return np.flatnonzero(self.bits)

    def cube(self) -> np.ndarray:
        """View of the table with shape ``(2,)*n``; axis ``i`` is ``x_{i+1}``."""
        return self.bits.reshape((2,) * self.n, order="F")

    def negate(self) -> "TruthTable":
        return TruthTable(self.n, 1 - self.bits)

    def permute(self, perm: Sequence[int]) -> "TruthTable":
        """Rename variables: new ``x_{perm[i]}`` carries old ``x_{i+1}``.

        ``perm`` is a permutation of ``1..n``.
        """
        axes = np.argsort(np.asarray(perm) - 1)
        cube = np.transpose(self.cube(), axes)
        return TruthTable(self.n, cube.reshape(-1, order="F"))

    def flip_input(self, var: int) -> "TruthTable":
        """``g(x) = f(x with x_var complemented)``."""
        _check_var(var, self.n)
        idx = np.arange(1 << self.n) ^ (1 << (var - 1))
        return TruthTable(self.n, self.bits[idx])


def index_to_input(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> i) & 1 for i in range(n))


def as_index(x, n: int) -> int:
    """Accept a table index or a bit tuple ``(x_1, ..., x_n)``."""
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < (1 << n):
            raise IndexError(f"input index {x} out of range for n = {n}")
        return int(x)
    bits = tuple(x)
    if len(bits) != n:
        raise ValueError(f"input has {len(bits)} coordinates, expected {n}")
    return sum(int(b) << i for i, b in enumerate(bits))


def _check_var(var: int, n: int):
    if not 1 <= var <= n:
        raise IndexError(f"variable x_{var} out of range 1..{n}")


@dataclass(frozen=True)
class Restriction:
    """Partial assignment ``rho``: a sorted tuple of ``(variable, bit)`` pairs."""

    items: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        items = tuple(sorted((int(v), int(b)) for v, b in self.items))
        seen = set()
        for v, b in items:
            if b not in (0, 1):
                raise ValueError(f"restriction value for x_{v} must be 0/1, got {b}")
            if v in seen:
                raise ValueError(f"variable x_{v} fixed twice")
            seen.add(v)
        object.__setattr__(self, "items", items)

    @classmethod
    def of(cls, mapping: Mapping[int, int] | None = None, **kw) -> "Restriction":
        data = dict(mapping or {})
        for key, val in kw.items():
            data[int(key.lstrip("x"))] = val
        return cls(tuple(data.items()))

    @property
    def fixed(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.items)

    @property
    def values(self) -> dict[int, int]:
        return dict(self.items)

    def __len__(self):
        return len(self.items)

    def __or__(self, other: "Restriction") -> "Restriction":
        if self.fixed & other.fixed:
            raise ValueError("restrictions overlap")
        return Restriction(self.items + other.items)


@dataclass(frozen=True)
class PathSpec:
    """Ordered query path ``x_{i_1} -v_1-> x_{i_2} -v_2-> ...``."""

    steps: tuple[tuple[int, int], ...]

    def __post_init__(self):
        steps = tuple((int(v), int(b)) for v, b in self.steps)
        if len({v for v, _ in steps}) != len(steps):
            raise ValueError("path repeats a variable")
        if any(b not in (0, 1) for _, b in steps):
            raise ValueError("path values must be 0/1")
        object.__setattr__(self, "steps", steps)

    def __len__(self):
        return len(self.steps)

    def prefix(self, j: int) -> Restriction:
        """Restriction induced by the first ``j`` steps."""
        return Restriction(self.steps[:j])


def weight(f: TruthTable) -> int:
    """Number of inputs on which ``f`` outputs 1."""
    return f.weight


def restrict(f: TruthTable, rho: Restriction | Mapping[int, int]) -> TruthTable:
    """Subfunction ``f|rho``; free variables keep their relative order."""
    if not isinstance(rho, Restriction):
        rho = Restriction.of(rho)
    index: list = [slice(None)] * f.n
    for v, b in rho.items:
        _check_var(v, f.n)
        index[v - 1] = b
    sub = f.cube()[tuple(index)]
    return TruthTable(f.n - len(rho), np.asarray(sub).reshape(-1, order="F"))


@dataclass(frozen=True)
class EcsPartition:
    """Maximal equivalent coordinate sets of a non-zero function.

    ``patterns[i-1]`` is the column pattern of ``x_i`` over the black points in
    lexicographic order (tuple order, ``x_1`` compared first). ``polarity[i-1]``
    is +1 when ``c_i`` equals the pattern of its class representative (the
    smallest member) and -1 when it is the complement.
    """

    n: int
    classes: tuple[tuple[int, ...], ...]
    pure: tuple[bool, ...]
    patterns: tuple[tuple[int, ...], ...] = field(repr=False)
    polarity: tuple[int, ...] = field(repr=False)

    def class_index(self, var: int) -> int:
        for k, members in enumerate(self.classes):
            if var in members:
                return k
        raise IndexError(f"x_{var} not in partition")

    def class_of(self, var: int) -> tuple[int, ...]:
        return self.classes[self.class_index(var)]

    def is_pure(self, var: int) -> bool:
        return self.pure[self.class_index(var)]

    def correlation(self, i: int, j: int) -> int:
        """+1 positively, -1 negatively correlated, 0 if in different classes."""
        if self.class_index(i) != self.class_index(j):
            return 0
        return self.polarity[i - 1] * self.polarity[j - 1]


def black_points_lex(f: TruthTable) -> np.ndarray:
    """Black points as an ``(m, n)`` 0/1 matrix in lexicographic order."""
    ones = f.ones()
    X = ((ones[:, None] >> np.arange(f.n)[None, :]) & 1).astype(np.uint8)
    if X.shape[0] > 1 and f.n:
        X = X[np.lexsort(X[:, ::-1].T)]
    return X


def ecs_partition(f: TruthTable) -> EcsPartition:
    if f.weight == 0:
        raise PreconditionError("wt(f) >= 1", "column patterns are undefined for the zero function")
    X = black_points_lex(f)
    groups: dict[bytes, list[int]] = {}
    normalized = X ^ X[0:1, :]
    for i in range(f.n):
        groups.setdefault(normalized[:, i].tobytes(), []).append(i + 1)
    classes = tuple(sorted(tuple(g) for g in groups.values()))
    polarity = [0] * f.n
    pure = []
    for members in classes:
        rep = X[:, members[0] - 1]
        for v in members:
            polarity[v - 1] = 1 if np.array_equal(X[:, v - 1], rep) else -1
        pure.append(bool(rep.min() == rep.max()))
    patterns = tuple(tuple(int(b) for b in X[:, i]) for i in range(f.n))
    return EcsPartition(f.n, classes, tuple(pure), patterns, tuple(polarity))


def certificate_complexity(f: TruthTable, x) -> int:
    """Size of the smallest certificate of ``f`` on input ``x``."""
    if f.n > CERTIFICATE_LIMIT:
        raise LimitExceeded(f"certificate search limited to n <= {CERTIFICATE_LIMIT}")
    idx = as_index(x, f.n)
    value = f.bits[idx]
    # A set S certifies x iff it hits every position where x differs from a y with f(y) != f(x).
    diffs = np.flatnonzero(f.bits != value).astype(np.int64) ^ idx
    if diffs.size == 0:
        return 0
    chunk = max(1, (1 << 22) // diffs.size)
    for k in range(1, f.n + 1):
        masks = np.array([sum(1 << i for i in c) for c in combinations(range(f.n), k)], dtype=np.int64)
        for start in range(0, masks.size, chunk):
            block = masks[start:start + chunk]
            if ((block[:, None] & diffs[None, :]) != 0).all(axis=1).any():
                return k
    return f.n


def min_certificate(f: TruthTable) -> int:
    """``min_x C_x(f)``: fewest fixed variables that make ``f`` constant.

    Searches monochromatic subcubes by growing free dimension; the first level
    with no monochromatic subcube ends the search, since every face of a
    monochromatic cube is monochromatic.
    """
    if f.n > CERTIFICATE_LIMIT:
        raise LimitExceeded(f"certificate search limited to n <= {CERTIFICATE_LIMIT}")
    if f.is_constant():
        return 0
    cube = f.cube().astype(bool)
    level = {(): (~cube, cube)}
    free_dim = 0
    while True:
        nxt = {}
        for axes, (zero, one) in level.items():
            for a in range((axes[-1] + 1) if axes else 0, f.n):
                z = zero.all(axis=a, keepdims=True)
                o = one.all(axis=a, keepdims=True)
                if z.any() or o.any():
                    nxt[axes + (a,)] = (z, o)
        if not nxt:
            return f.n - free_dim
        level = nxt
        free_dim += 1


# ---------------------------------------------------------------------------
# text format

def format_table(f: TruthTable, form: str | None = None) -> str:
    """Two-line text form: ``n`` then a 0/1 string or ``hex:`` digits.

    Hex packs the 0/1 string four characters per digit, first character as the
    digit's high bit, zero-padded at the end.
    """
    if form is None:
        form = "bits" if f.n <= 16 else "hex"
    s = "".join("1" if b else "0" for b in f.bits)
    if form == "bits":
        body = s
    elif form == "hex":
        padded = s + "0" * (-len(s) % 4)
        body = "hex:" + "".join(f"{int(padded[i:i + 4], 2):X}" for i in range(0, len(padded), 4))
    else:
        raise ValueError(f"unknown table form {form!r}")
    return f"{f.n}\n{body}\n"


def parse_table(text: str) -> TruthTable:
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if len(lines) != 2:
        raise ParseError(f"expected 2 lines, found {len(lines)}", line=min(len(lines) + 1, 3))
    try:
        n = int(lines[0])
    except ValueError:
        raise ParseError(f"variable count {lines[0]!r} is not an integer", line=1, column=1) from None
    if not 0 <= n <= MAX_VARS:
        raise ParseError(f"variable count {n} outside 0..{MAX_VARS}", line=1, column=1)
    size = 1 << n
    body = lines[1]
    if body.lower().startswith("hex:"):
        digits = body[4:]
        want = -(-size // 4)
        if len(digits) != want:
            raise ParseError(f"expected {want} hex digits, found {len(digits)}", line=2, column=5)
        bits = []
        for col, ch in enumerate(digits, start=5):
            try:
                val = int(ch, 16)
            except ValueError:
                raise ParseError(f"bad hex digit {ch!r}", line=2, column=col) from None
            bits.extend((val >> (3 - k)) & 1 for k in range(4))
        if any(bits[size:]):
            raise ParseError("nonzero padding bits after the table", line=2)
        arr = np.array(bits[:size], dtype=np.uint8)
    else:
        if len(body) != size:
            raise ParseError(f"expected {size} table bits, found {len(body)}", line=2, column=1)
        for col, ch in enumerate(body, start=1):
            if ch not in "01":
                raise ParseError(f"bad table character {ch!r}", line=2, column=col)
        arr = np.frombuffer(body.encode(), dtype=np.uint8) - ord("0")
    return TruthTable(n, arr)


def read_table(path) -> TruthTable:
    with open(path) as fh:
        return parse_table(fh.read())


def write_table(f: TruthTable, path, form: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_table(f, form))
