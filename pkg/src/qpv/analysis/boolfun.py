"""Boolean functions on paired n-bit inputs and their communication matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qcore.rng import as_generator


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table on {0,1}^n x {0,1}^n, stored row-major (x outer, y inner)."""

    n: int
    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.uint8)
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if table.shape != (1 << (2 * self.n),):
            raise ValueError(f"table must have length {1 << (2 * self.n)}")
        if not np.all((table == 0) | (table == 1)):
            raise ValueError("table entries must be bits")
        table.flags.writeable = False
        object.__setattr__(self, "table", table)

    def value(self, x: int, y: int) -> int:
        side = 1 << self.n
        if not (0 <= x < side and 0 <= y < side):
            raise ValueError(f"inputs must be {self.n}-bit strings")
        return int(self.table[x * side + y])

    def communication_matrix(self) -> np.ndarray:
        side = 1 << self.n
        return np.asarray(self.table).reshape(side, side)

    def negated(self) -> "BooleanFunction":
        return BooleanFunction(self.n, 1 - np.asarray(self.table))

    def pairs(self):
        side = 1 << self.n
        for x in range(side):
            for y in range(side):
                yield x, y

    def is_constant(self) -> bool:
        return bool(np.all(self.table == self.table[0]))


def ip_function(n: int) -> BooleanFunction:
    """Inner product mod 2 of the two n-bit inputs."""
    if n < 1:
        raise ValueError("n must be at least 1")
    side = 1 << n
    xs = np.arange(side)
    ands = xs[:, None] & xs[None, :]
    bits = np.zeros((side, side), dtype=np.uint8)
    for k in range(n):
        bits ^= ((ands >> k) & 1).astype(np.uint8)
    return BooleanFunction(n, bits.reshape(-1))


def constant_function(n: int, bit: int) -> BooleanFunction:
    return BooleanFunction(n, np.full(1 << (2 * n), bit, dtype=np.uint8))


def xor_function(n: int) -> BooleanFunction:
    """Parity of x XOR y (for n=1 this is the two-bit XOR)."""
    side = 1 << n
    xs = np.arange(side)
    xored = xs[:, None] ^ xs[None, :]
    bits = np.zeros((side, side), dtype=np.uint8)
    for k in range(n):
        bits ^= ((xored >> k) & 1).astype(np.uint8)
    return BooleanFunction(n, bits.reshape(-1))


def projection_function(n: int, bit_index: int = 0, side: str = "x") -> BooleanFunction:
    """f(x, y) = one input bit; bit_index counts from the most significant."""
    width = 1 << n
    shift = n - 1 - bit_index
    vals = np.zeros((width, width), dtype=np.uint8)
    for x in range(width):
        for y in range(width):
            src = x if side == "x" else y
            vals[x, y] = (src >> shift) & 1
    return BooleanFunction(n, vals.reshape(-1))


def random_function(n: int, rng) -> BooleanFunction:
    g = as_generator(rng)
    return BooleanFunction(n, g.integers(0, 2, size=1 << (2 * n), dtype=np.uint8))


def hamming(f: BooleanFunction, g: BooleanFunction) -> int:
    """Number of input pairs on which the two tables differ."""
    if f.n != g.n:
        raise ValueError("functions have different input lengths")
    return int(np.count_nonzero(np.asarray(f.table) != np.asarray(g.table)))


# file format: first line "n=<int>", second line the 2^(2n) table bits
# in row-major (x outer, y inner) order.

def save_function(f: BooleanFunction, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"n={f.n}\n")
        fh.write("".join(str(int(b)) for b in f.table) + "\n")


def load_function(path) -> BooleanFunction:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header.startswith("n="):
            raise ValueError("first line must be 'n=<int>'")
        n = int(header[2:])
        bits = fh.readline().strip()
    if len(bits) != 1 << (2 * n):
        raise ValueError(f"expected {1 << (2 * n)} table bits, got {len(bits)}")
    return BooleanFunction(n, np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0"))


def function_from_spec(spec: dict) -> BooleanFunction:
    """Build a function from a config object {kind, n, seed?/table?}."""
    kind = spec.get("kind")
    if kind == "ip":
        return ip_function(int(spec["n"]))
    if kind == "xor":
        return xor_function(int(spec["n"]))
    if kind == "constant":
        return constant_function(int(spec["n"]), int(spec.get("bit", 0)))
    if kind == "random":
        return random_function(int(spec["n"]), int(spec["seed"]))
    if kind == "table":
        n = int(spec["n"])
        bits = spec["table"]
        if isinstance(bits, str):
            table = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
        else:
            table = np.asarray(bits, dtype=np.uint8)
        return BooleanFunction(n, table)
    raise ValueError(f"unknown function kind {kind!r}")
