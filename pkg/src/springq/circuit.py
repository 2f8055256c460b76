"""Gate-level circuit IR: construction, composition, inversion, gate counting.

Conventions used throughout the package:

- Qubit 0 is the topmost wire and the most-significant bit of basis-state
  labels (big-endian), so ``|q0 q1 ... q_{w-1}>`` reads as a binary number.
- Multi-controlled gates are first-class IR nodes.  The statevector engine
  applies controls directly by index masking; Barenco-style decomposition
  exists only as a cost model (see :func:`elementary_count`).
- Angles are radians, double precision.
- Circuits are treated as immutable once shared; builder methods mutate the
  instance they are called on and are meant for single-owner construction.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable

OPEN, CLOSED = 0, 1

KINDS = ("X", "Z", "H", "V", "VDG", "RY", "RZ", "SWAP")
PARAMETRIC = frozenset({"RY", "RZ"})
SELF_INVERSE = frozenset({"X", "Z", "H", "SWAP"})


@dataclass(frozen=True)
class Gate:
    """One gate application: kind, target wires, (wire, polarity) controls.

    Polarity 1 (closed) fires on |1>, polarity 0 (open) fires on |0>.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_targets = 2 if self.kind == "SWAP" else 1
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.kind} takes {n_targets} target(s), got {self.targets}")
        wires = list(self.targets) + [q for q, _ in self.controls]
        if len(set(wires)) != len(wires):
            raise ValueError(f"targets and controls must be disjoint: {self}")
        if any(pol not in (OPEN, CLOSED) for _, pol in self.controls):
            raise ValueError(f"control polarity must be 0 (open) or 1 (closed): {self}")

    @property
    def wires(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    def inverse(self) -> "Gate":
        if self.kind in SELF_INVERSE:
            return self
        if self.kind in PARAMETRIC:
            return Gate(self.kind, self.targets, self.controls, -self.angle)
        if self.kind == "V":
            return Gate("VDG", self.targets, self.controls)
        return Gate("V", self.targets, self.controls)  # VDG

    def with_controls(self, extra: Iterable[tuple[int, int]]) -> "Gate":
        return Gate(self.kind, self.targets, self.controls + tuple(extra), self.angle)

    def remapped(self, wire_map: dict[int, int]) -> "Gate":
        return Gate(
            self.kind,
            tuple(wire_map[q] for q in self.targets),
            tuple((wire_map[q], pol) for q, pol in self.controls),
            self.angle,
        )


@dataclass
class Circuit:
    """Ordered gate list over ``width`` qubits."""

    width: int
    gates: list[Gate] = field(default_factory=list)
    label: str = ""

    def add(self, gate: Gate) -> "Circuit":
        if any(q >= self.width or q < 0 for q in gate.wires):
            raise ValueError(f"gate {gate} exceeds circuit width {self.width}")
        self.gates.append(gate)
        return self

    def extend(self, gates: "Circuit | Iterable[Gate]") -> "Circuit":
        if isinstance(gates, Circuit):
            if gates.width > self.width:
                raise ValueError("cannot extend with a wider circuit")
            gates = gates.gates
        for g in gates:
            self.add(g)
        return self

    # Builder shorthands.
    def x(self, q, controls=()):
        return self.add(Gate("X", (q,), tuple(controls)))

    def z(self, q, controls=()):
        return self.add(Gate("Z", (q,), tuple(controls)))

    def h(self, q, controls=()):
        return self.add(Gate("H", (q,), tuple(controls)))

    def v(self, q, controls=()):
        return self.add(Gate("V", (q,), tuple(controls)))

    def vdg(self, q, controls=()):
        return self.add(Gate("VDG", (q,), tuple(controls)))

    def ry(self, angle, q, controls=()):
        return self.add(Gate("RY", (q,), tuple(controls), float(angle)))

    def rz(self, angle, q, controls=()):
        return self.add(Gate("RZ", (q,), tuple(controls), float(angle)))

    def swap(self, q1, q2, controls=()):
        return self.add(Gate("SWAP", (q1, q2), tuple(controls)))

    def used_wires(self) -> set[int]:
        used: set[int] = set()
        for g in self.gates:
            used.update(g.wires)
        return used

    def __len__(self) -> int:
        return len(self.gates)


def dagger(c: Circuit) -> Circuit:
    """Reverse the gate list, inverting each gate; matrix = conjugate transpose."""
    return Circuit(c.width, [g.inverse() for g in reversed(c.gates)], label=f"{c.label}^dg")


def add_control(c: Circuit, ctrl: int, polarity: int = CLOSED) -> Circuit:
    """Attach an extra control wire to every gate of ``c``.

    ``ctrl`` must be an existing wire of the circuit that no gate touches.
    """
    if not 0 <= ctrl < c.width:
        raise ValueError(f"control wire {ctrl} outside width {c.width}")
    if ctrl in c.used_wires():
        raise ValueError(f"control wire {ctrl} already used by the circuit")
    gates = [g.with_controls([(ctrl, polarity)]) for g in c.gates]
    return Circuit(c.width, gates, label=c.label)


def controlled_gates(gates: Iterable[Gate], controls: Iterable[tuple[int, int]]) -> list[Gate]:
    """Controlled copy of a gate list; callers guarantee wire disjointness."""
    extra = tuple(controls)
    return [g.with_controls(extra) for g in gates]


def embed(c: Circuit, width: int, wires: list[int]) -> Circuit:
    """Remap circuit ``c`` onto the given wires of a ``width``-qubit circuit."""
    if len(wires) != c.width:
        raise ValueError(f"need {c.width} wires, got {len(wires)}")
    if len(set(wires)) != len(wires) or any(not 0 <= w < width for w in wires):
        raise ValueError(f"invalid wire map {wires} for width {width}")
    wire_map = dict(enumerate(wires))
    return Circuit(width, [g.remapped(wire_map) for g in c.gates], label=c.label)


def wire_permutation_gates(perm: list[int]) -> list[Gate]:
    """SWAP gates realizing the wire relabeling ``i -> perm[i]``.

    Decomposes the permutation into transposition cycles; at most
    ``len(perm) - 1`` SWAPs.
    """
    if sorted(perm) != list(range(len(perm))):
        raise ValueError(f"{perm} is not a permutation")
    gates: list[Gate] = []
    placed = list(range(len(perm)))  # placed[pos] = wire currently at pos
    pos_of = list(range(len(perm)))
    for wire, dest in enumerate(perm):
        cur = pos_of[wire]
        if cur == dest:
            continue
        other = placed[dest]
        gates.append(Gate("SWAP", (cur, dest)))
        placed[cur], placed[dest] = other, wire
        pos_of[wire], pos_of[other] = dest, cur
    return gates


def count_gates(c: Circuit) -> Counter:
    """Exact multiset count keyed by (kind, number of controls)."""
    return Counter((g.kind, len(g.controls)) for g in c.gates)


def default_control_cost(m: int) -> int:
    """Linear Barenco-style model: C^m-NOT-class gate cost in elementary gates.

    Anchored at cost(Toffoli) = 6 CNOTs; m <= 1 gates are elementary.
    """
    if m <= 1:
        return 1
    return 6 * (m - 1)


def elementary_count(c: Circuit, cost: Callable[[int], int] = default_control_cost) -> int:
    """Elementary-gate estimate charging multi-controlled gates via ``cost``.

    A controlled SWAP is charged as 3 CNOT-class gates with one extra control
    each (the usual 3-CNOT expansion).
    """
    total = 0
    for g in c.gates:
        m = len(g.controls)
        if g.kind == "SWAP":
            total += 3 * cost(m + 1)
        else:
            total += cost(m)
    return total


# Line-oriented serialization, one gate per line, for debugging and goldens.


def to_text(c: Circuit) -> str:
    lines = [f"# width={c.width} label={c.label}"]
    for g in c.gates:
        angle = repr(g.angle) if g.kind in PARAMETRIC else "-"
        targets = ",".join(str(q) for q in g.targets)
        controls = ",".join(f"{q}:{pol}" for q, pol in g.controls) or "-"
        lines.append(f"{g.kind} {angle} {targets} {controls}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0]
    if not head.startswith("# width="):
        raise ValueError("missing circuit header")
    fields = head[2:].split(" label=", 1)
    c = Circuit(int(fields[0].removeprefix("width=")), label=fields[1] if len(fields) > 1 else "")
    for ln in lines[1:]:
        kind, angle, targets, controls = ln.split(" ")
        c.add(
            Gate(
                kind,
                tuple(int(q) for q in targets.split(",")),
                tuple(
                    (int(q), int(pol))
                    for q, pol in (item.split(":") for item in controls.split(","))
                )
                if controls != "-"
                else (),
                0.0 if angle == "-" else float(angle),
            )
        )
    return c
