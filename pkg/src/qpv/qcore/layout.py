"""Named multi-qubit register layouts.

A layout is an ordered list of named registers, each a contiguous block of
qubits on a little-endian qubit line: qubit 0 is the first qubit of the
first register and carries the least significant bit of a basis-state
index.  Registers may be empty (width 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

MAX_QUBITS = 16


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[tuple[str, int], ...]
    _offsets: dict[str, int] = field(init=False, repr=False, compare=False)

    def __init__(self, registers):
        regs = tuple((str(name), int(width)) for name, width in registers)
        names = [name for name, _ in regs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate register names in {names}")
        for name, width in regs:
            if width < 0:
                raise ValueError(f"register {name!r} has negative width")
        total = sum(width for _, width in regs)
        if total > MAX_QUBITS:
            raise ValueError(f"{total} qubits exceeds the {MAX_QUBITS}-qubit cap")
        offsets = {}
        at = 0
        for name, width in regs:
            offsets[name] = at
            at += width
        object.__setattr__(self, "registers", regs)
        object.__setattr__(self, "_offsets", offsets)

    @property
    def total_qubits(self) -> int:
        return sum(width for _, width in self.registers)

    @property
    def dim(self) -> int:
        return 1 << self.total_qubits

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.registers)

    def width(self, name: str) -> int:
        for reg, w in self.registers:
            if reg == name:
                return w
        raise KeyError(f"unknown register {name!r}")

    def positions(self, *names: str) -> list[int]:
        """Global qubit indices of the named registers, in the given order."""
        out: list[int] = []
        for name in names:
            if name not in self._offsets:
                raise KeyError(f"unknown register {name!r}")
            off = self._offsets[name]
            out.extend(range(off, off + self.width(name)))
        return out

    def subdim(self, *names: str) -> int:
        return 1 << len(self.positions(*names))

    def restricted(self, *names: str) -> "RegisterLayout":
        """Layout containing only the named registers, in layout order."""
        keep = set(names)
        unknown = keep - set(self.names)
        if unknown:
            raise KeyError(f"unknown registers {sorted(unknown)}")
        return RegisterLayout([(n, w) for n, w in self.registers if n in keep])


def single_register(name: str = "Q", width: int = 1) -> RegisterLayout:
    return RegisterLayout([(name, width)])
