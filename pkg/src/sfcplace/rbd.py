"""Reliability-block-diagram engine.

Availability of a placed service chain is computed analytically from an
expression tree of blocks: leaves carry steady-state availabilities,
series blocks require every child to be up, parallel blocks require at
least one child up. Rewards and acceptance decisions therefore depend
only on the placement, never on sampled uptime.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from .core import Placement, ServerRuntime

LEAF = "leaf"
SERIES = "series"
PARALLEL = "parallel"


@dataclass(frozen=True)
class RbdBlock:
    """One node of an availability expression tree.

    A leaf stores a probability in ``value``; series/parallel nodes store
    at least one child block.
    """

    kind: str
    value: float = 0.0
    children: tuple["RbdBlock", ...] = field(default_factory=tuple)
    label: str = ""

    def __post_init__(self):
        if self.kind == LEAF:
            if not 0.0 <= self.value <= 1.0:
                raise ValueError(f"leaf availability {self.value} outside [0, 1]")
        elif self.kind in (SERIES, PARALLEL):
            if not self.children:
                raise ValueError(f"{self.kind} block needs at least one child")
        else:
            raise ValueError(f"unknown block kind {self.kind!r}")


def leaf(value: float, label: str = "") -> RbdBlock:
    return RbdBlock(LEAF, value=value, label=label)


def series(*children: RbdBlock, label: str = "") -> RbdBlock:
    return RbdBlock(SERIES, children=tuple(children), label=label)


def parallel(*children: RbdBlock, label: str = "") -> RbdBlock:
    return RbdBlock(PARALLEL, children=tuple(children), label=label)


def steady_state_availability(mttf: float, mttr: float) -> float:
    """Long-run fraction of time a repairable component is up.

    ``mttf`` must be positive and ``mttr`` non-negative; the result is
    mttf / (mttf + mttr), which lies in (0, 1].
    """
    if mttf <= 0.0:
        raise ValueError(f"mttf must be positive, got {mttf}")
    if mttr < 0.0:
        raise ValueError(f"mttr must be non-negative, got {mttr}")
    return mttf / (mttf + mttr)


def evaluate(block: RbdBlock) -> float:
    """Availability of the system described by ``block``."""
    if block.kind == LEAF:
        return block.value
    if block.kind == SERIES:
        prod = 1.0
        for child in block.children:
            prod *= evaluate(child)
        return prod
    # parallel: up unless every child is down
    down = 1.0
    for child in block.children:
        down *= 1.0 - evaluate(child)
    return 1.0 - down


def sfc_rbd(
    placement: "Placement",
    servers: Sequence["ServerRuntime"],
    vnf_availability: float,
) -> RbdBlock:
    """Availability tree for a fully placed service chain.

    The chain is a series of (a) one leaf per distinct server used, in
    first-use order, and (b) one parallel group per chain position holding
    that position's redundant instances. A server hosting several
    positions appears exactly once in the series.
    """
    if not placement.complete:
        raise ValueError("placement is not complete")
    blocks: list[RbdBlock] = []
    seen: set[int] = set()
    for server_id, _q in placement.assignments:
        if server_id in seen:
            continue
        seen.add(server_id)
        spec = servers[server_id].spec
        blocks.append(
            leaf(
                steady_state_availability(spec.mttf, spec.mttr),
                label=f"server:{server_id}",
            )
        )
    for pos, (server_id, q) in enumerate(placement.assignments):
        vnf = placement.request.vnf_sequence[pos]
        instances = tuple(
            leaf(vnf_availability, label=f"{vnf.name}[{i}]") for i in range(q)
        )
        blocks.append(RbdBlock(PARALLEL, children=instances, label=f"pos:{pos}"))
    return series(*blocks, label=f"sfc:{placement.request.id}")


def sfc_availability(
    placement: "Placement",
    servers: Sequence["ServerRuntime"],
    vnf_availability: float,
) -> float:
    """Availability of a fully placed chain (tree build + evaluation)."""
    return evaluate(sfc_rbd(placement, servers, vnf_availability))


def format_tree(block: RbdBlock, indent: int = 0) -> str:
    """ASCII rendering used by the debug CLI subcommand."""
    pad = "  " * indent
    name = f" {block.label}" if block.label else ""
    if block.kind == LEAF:
        return f"{pad}leaf{name}: {block.value:.9f}"
    lines = [f"{pad}{block.kind}{name}: {evaluate(block):.9f}"]
    for child in block.children:
        lines.append(format_tree(child, indent + 1))
    return "\n".join(lines)
