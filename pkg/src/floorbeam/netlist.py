"""Circuit data model: modules, nets, alignment constraints, and generators.

A circuit is a set of rectangular modules, a hypergraph of nets over module
ids, and optional center-alignment constraints between module pairs. Module
ids are dense 0..m-1; the file order of modules is preserved on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import CircuitError


class Axis(str, Enum):
    """Alignment axis: modules share center y (horizontal) or center x (vertical)."""

    HORIZONTAL = "h"
    VERTICAL = "v"


@dataclass(frozen=True)
class Module:
    id: int
    w: float
    h: float

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class Net:
    id: int
    members: tuple[int, ...]


@dataclass(frozen=True)
class AlignmentConstraint:
    a: int
    b: int
    axis: Axis


@dataclass(frozen=True)
class Circuit:
    modules: tuple[Module, ...]
    nets: tuple[Net, ...] = ()
    alignments: tuple[AlignmentConstraint, ...] = ()
    target_ar: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "modules", tuple(self.modules))
        object.__setattr__(self, "nets", tuple(self.nets))
        object.__setattr__(self, "alignments", tuple(self.alignments))

    @property
    def m(self) -> int:
        return len(self.modules)

    # Derived arrays are cached per instance; Circuit is immutable so these
    # are safe to share across threads and search workers.

    @cached_property
    def ws(self) -> np.ndarray:
        a = np.array([mod.w for mod in self.modules], dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def hs(self) -> np.ndarray:
        a = np.array([mod.h for mod in self.modules], dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def areas(self) -> np.ndarray:
        a = self.ws * self.hs
        a.flags.writeable = False
        return a

    @cached_property
    def net_ptr(self) -> np.ndarray:
        """CSR row pointer over net member lists (len = nets + 1)."""
        ptr = np.zeros(len(self.nets) + 1, dtype=np.int64)
        for i, net in enumerate(self.nets):
            ptr[i + 1] = ptr[i] + len(net.members)
        ptr.flags.writeable = False
        return ptr

    @cached_property
    def net_members(self) -> np.ndarray:
        """CSR member ids, aligned with net_ptr."""
        flat = [m for net in self.nets for m in net.members]
        a = np.array(flat, dtype=np.int64)
        a.flags.writeable = False
        return a

    @cached_property
    def module_nets(self) -> tuple[np.ndarray, ...]:
        """For each module, the indices of nets it belongs to."""
        per: list[list[int]] = [[] for _ in range(self.m)]
        for i, net in enumerate(self.nets):
            for mid in net.members:
                per[mid].append(i)
        out = []
        for lst in per:
            a = np.array(lst, dtype=np.int64)
            a.flags.writeable = False
            out.append(a)
        return tuple(out)

    @cached_property
    def align_partners(self) -> tuple[tuple[tuple[int, Axis], ...], ...]:
        """For each module, its (partner id, axis) alignment bindings."""
        per: list[list[tuple[int, Axis]]] = [[] for _ in range(self.m)]
        for c in self.alignments:
            per[c.a].append((c.b, c.axis))
            per[c.b].append((c.a, c.axis))
        return tuple(tuple(lst) for lst in per)

    @cached_property
    def hpwl_min(self) -> float:
        return hpwl_min_estimate(self)


def validate_circuit(c: Circuit) -> Circuit:
    """Check all Circuit invariants; error messages name the offending entity."""
    if not c.modules:
        raise CircuitError("circuit has no modules")
    ids = [mod.id for mod in c.modules]
    if ids != list(range(len(ids))):
        seen: set[int] = set()
        for mod in c.modules:
            if mod.id in seen:
                raise CircuitError(f"duplicate module id {mod.id}")
            seen.add(mod.id)
        raise CircuitError(f"module ids must be dense 0..{len(ids) - 1}, got {ids}")
    for mod in c.modules:
        if not (mod.w > 0 and mod.h > 0):
            raise CircuitError(
                f"module {mod.id} has non-positive dimensions {mod.w}x{mod.h}"
            )
    net_ids: set[int] = set()
    for net in c.nets:
        if net.id in net_ids:
            raise CircuitError(f"duplicate net id {net.id}")
        net_ids.add(net.id)
        if len(net.members) < 2:
            raise CircuitError(f"net {net.id} has fewer than 2 members")
        if len(set(net.members)) != len(net.members):
            raise CircuitError(f"net {net.id} has duplicate members {net.members}")
        for mid in net.members:
            if not 0 <= mid < c.m:
                raise CircuitError(f"net {net.id} references unknown module id {mid}")
    seen_pairs: set[tuple[int, int]] = set()
    for con in c.alignments:
        if con.a == con.b:
            raise CircuitError(f"alignment constraint pairs module {con.a} with itself")
        for mid in (con.a, con.b):
            if not 0 <= mid < c.m:
                raise CircuitError(f"alignment constraint references unknown module id {mid}")
        key = (min(con.a, con.b), max(con.a, con.b))
        if key in seen_pairs:
            raise CircuitError(f"alignment constraint for pair {key} appears twice")
        seen_pairs.add(key)
    if c.target_ar is not None and not c.target_ar > 0:
        raise CircuitError(f"target_ar must be positive, got {c.target_ar}")
    return c


def load_circuit(path) -> Circuit:
    """Load and validate a circuit JSON file.

    Schema: {"modules": [{"id", "w", "h"}], "nets": [{"id", "members"}],
    "alignments": [{"a", "b", "axis": "h"|"v"}], "target_ar": optional}.
    """
    with open(path) as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise CircuitError(f"{path}: malformed JSON: {exc}") from exc
    return circuit_from_dict(raw)


def circuit_from_dict(raw: dict) -> Circuit:
    try:
        modules = tuple(
            Module(id=int(m["id"]), w=float(m["w"]), h=float(m["h"]))
            for m in raw["modules"]
        )
        nets = tuple(
            Net(id=int(n["id"]), members=tuple(int(x) for x in n["members"]))
            for n in raw.get("nets", [])
        )
        alignments = tuple(
            AlignmentConstraint(a=int(c["a"]), b=int(c["b"]), axis=Axis(c["axis"]))
            for c in raw.get("alignments", [])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CircuitError(f"malformed circuit structure: {exc}") from exc
    target_ar = raw.get("target_ar")
    c = Circuit(
        modules=modules,
        nets=nets,
        alignments=alignments,
        target_ar=None if target_ar is None else float(target_ar),
    )
    return validate_circuit(c)


def circuit_to_dict(c: Circuit) -> dict:
    out: dict = {
        "modules": [{"id": mod.id, "w": mod.w, "h": mod.h} for mod in c.modules],
        "nets": [{"id": n.id, "members": list(n.members)} for n in c.nets],
        "alignments": [
            {"a": con.a, "b": con.b, "axis": con.axis.value} for con in c.alignments
        ],
    }
    if c.target_ar is not None:
        out["target_ar"] = c.target_ar
    return out


def save_circuit(c: Circuit, path) -> None:
    with open(path, "w") as f:
        json.dump(circuit_to_dict(c), f, indent=2)
        f.write("\n")


def gen_circuit(
    seed: int,
    m: int,
    net_density: float = 0.8,
    n_alignments: int = 0,
    target_ar: float | None = None,
) -> Circuit:
    """Deterministic synthetic instance generator.

    Module dimensions are log-uniform in [1, 20]; about net_density*m nets of
    size 2..4 are drawn. Alignment constraints (disjoint pairs, alternating
    axis) are added only when requested.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0 < net_density <= 1:
        raise ValueError(f"net_density must be in (0, 1], got {net_density}")
    if n_alignments < 0 or 2 * n_alignments > m:
        raise ValueError(f"cannot fit {n_alignments} disjoint alignment pairs in {m} modules")
    rng = np.random.default_rng(seed)
    dims = np.exp(rng.uniform(math.log(1.0), math.log(20.0), size=(m, 2)))
    modules = tuple(
        Module(id=i, w=round(float(dims[i, 0]), 3), h=round(float(dims[i, 1]), 3))
        for i in range(m)
    )
    nets = []
    if m >= 2:
        n_nets = int(round(net_density * m))
        for i in range(n_nets):
            size = int(rng.integers(2, min(4, m) + 1))
            members = tuple(sorted(int(x) for x in rng.choice(m, size=size, replace=False)))
            nets.append(Net(id=i, members=members))
    alignments = []
    if n_alignments:
        perm = [int(x) for x in rng.permutation(m)]
        for i in range(n_alignments):
            axis = Axis.VERTICAL if i % 2 == 0 else Axis.HORIZONTAL
            alignments.append(AlignmentConstraint(a=perm[2 * i], b=perm[2 * i + 1], axis=axis))
    return validate_circuit(
        Circuit(modules=modules, nets=tuple(nets), alignments=tuple(alignments), target_ar=target_ar)
    )


def placement_order(c: Circuit) -> list[int]:
    """Default placement sequence: descending area, ties broken by id."""
    return sorted(range(c.m), key=lambda i: (-c.modules[i].area, i))


def hpwl_min_estimate(c: Circuit) -> float:
    """Lower-bound proxy for total HPWL used to normalize wirelength terms.

    Per net: half perimeter of a square with the net's total module area.
    Floored at 1e-6 so normalization stays finite on netless circuits. This
    is a heuristic proxy, not a certified lower bound.
    """
    total = 0.0
    for net in c.nets:
        area = sum(c.modules[i].area for i in net.members)
        total += 2.0 * math.sqrt(area)
    return max(total, 1e-6)
