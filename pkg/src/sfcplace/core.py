"""Domain model: servers, customers, VNF catalog, chain requests, bookkeeping.

Resource accounting is integer resource-units. A server tracks exactly what
it hosts, so every allocation can be audited and rolled back precisely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .rng import RngStream


class ConfigurationError(ValueError):
    """Raised for invalid infrastructure or experiment parameters."""


@dataclass(frozen=True)
class VnfType:
    """A deployable network function and its per-instance resource demand."""

    id: int
    name: str
    resource_demand: int

    def __post_init__(self):
        if self.resource_demand < 1:
            raise ConfigurationError(
                f"VNF {self.name!r} demand must be >= 1, got {self.resource_demand}"
            )


def default_catalog() -> list[VnfType]:
    """IDS and firewall need one resource unit, the WAN optimiser four."""
    return [
        VnfType(0, "IDS", 1),
        VnfType(1, "Firewall", 1),
        VnfType(2, "WAN-opt", 4),
    ]


@dataclass(frozen=True)
class ServerSpec:
    """Static capacity, reliability and power parameters of one server."""

    id: int
    group: int
    capacity: int
    mttf: float
    mttr: float
    cpu_power: float
    mem_power: float
    name: str = ""

    def __post_init__(self):
        if self.capacity < 1:
            raise ConfigurationError(f"server {self.id}: capacity must be >= 1")
        if self.mttf <= 0 or self.mttr <= 0:
            raise ConfigurationError(f"server {self.id}: MTTF/MTTR must be positive")
        if self.cpu_power < 0 or self.mem_power < 0:
            raise ConfigurationError(f"server {self.id}: powers must be >= 0")

    @property
    def power(self) -> float:
        return self.cpu_power + self.mem_power


@dataclass
class HostedEntry:
    request_id: int
    vnf: VnfType
    count: int  # redundant instances of this VNF on this server


@dataclass
class ServerRuntime:
    """Live allocation and up/down state of one server."""

    spec: ServerSpec
    allocated: int = 0
    operational: bool = True
    hosted: list[HostedEntry] = field(default_factory=list)

    def free_resources(self) -> int:
        """Free capacity as seen by a placement policy; a down server
        exposes zero so the observation layout stays fixed-size."""
        if not self.operational:
            return 0
        return self.spec.capacity - self.allocated

    def allocate(self, vnf: VnfType, q: int, request_id: int) -> bool:
        """Reserve q instances of ``vnf``; False (and no mutation) when the
        server is down or the instances do not fit."""
        if not 1 <= q:
            raise ValueError(f"redundancy count must be >= 1, got {q}")
        demand = q * vnf.resource_demand
        if not self.operational or demand > self.free_resources():
            return False
        self.allocated += demand
        self.hosted.append(HostedEntry(request_id, vnf, q))
        return True


@dataclass(frozen=True)
class Customer:
    """A request source with its own arrival rate, mean chain lifetime and
    availability requirement."""

    id: int
    arrival_rate: float
    mean_lifetime: float
    availability_requirement: float


@dataclass(frozen=True)
class SfcRequest:
    """An ordered chain of VNFs a customer asks to have placed."""

    id: int
    customer: Customer
    vnf_sequence: tuple[VnfType, ...]
    arrival_time: float
    lifetime: float

    def __post_init__(self):
        if not 2 <= len(self.vnf_sequence) <= 3:
            raise ValueError("chain must contain two or three VNFs")
        if self.lifetime <= 0:
            raise ValueError("lifetime must be positive")


@dataclass
class Placement:
    """Mapping of each chain position to (server id, redundancy count).

    All redundant instances of one position sit on a single server.
    """

    request: SfcRequest
    assignments: list[tuple[int, int]] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return len(self.assignments) == len(self.request.vnf_sequence)

    def distinct_servers(self) -> list[int]:
        seen: list[int] = []
        for server_id, _q in self.assignments:
            if server_id not in seen:
                seen.append(server_id)
        return seen

    def energy_watts(self, servers: Sequence[ServerRuntime]) -> float:
        """Each distinct hosting server contributes its full cpu+mem power,
        independent of how many instances it hosts."""
        return sum(servers[s].spec.power for s in self.distinct_servers())


@dataclass(frozen=True)
class GroupParams:
    """Per-group server parameters used to build an infrastructure."""

    group: int
    count: int
    capacity: int
    mttf: float
    mttr: float
    cpu_power: float
    mem_power: float


def build_infrastructure(config) -> list[ServerRuntime]:
    """Instantiate all servers described by ``config.server_groups``.

    Server ids are assigned contiguously in group order; optional
    ``config.server_names`` provides one display name per server.
    """
    groups: Sequence[GroupParams] = config.server_groups
    if not groups or sum(g.count for g in groups) == 0:
        raise ConfigurationError("infrastructure must contain at least one server")
    names = list(getattr(config, "server_names", None) or [])
    servers: list[ServerRuntime] = []
    for g in groups:
        if g.count < 0:
            raise ConfigurationError(f"group {g.group}: negative server count")
        for _ in range(g.count):
            sid = len(servers)
            name = names[sid] if sid < len(names) else f"server-{sid}"
            spec = ServerSpec(
                id=sid,
                group=g.group,
                capacity=g.capacity,
                mttf=g.mttf,
                mttr=g.mttr,
                cpu_power=g.cpu_power,
                mem_power=g.mem_power,
                name=name,
            )
            servers.append(ServerRuntime(spec=spec))
    return servers


def deallocate(request_id: int, servers: Sequence[ServerRuntime]) -> None:
    """Release every allocation made for ``request_id``; idempotent."""
    for server in servers:
        kept: list[HostedEntry] = []
        for entry in server.hosted:
            if entry.request_id == request_id:
                server.allocated -= entry.count * entry.vnf.resource_demand
            else:
                kept.append(entry)
        server.hosted = kept


def audit(servers: Sequence[ServerRuntime]) -> None:
    """Consistency check of the allocation bookkeeping; raises on violation."""
    for server in servers:
        hosted_sum = sum(e.count * e.vnf.resource_demand for e in server.hosted)
        if server.allocated != hosted_sum:
            raise AssertionError(
                f"server {server.spec.id}: allocated={server.allocated} but "
                f"hosted entries sum to {hosted_sum}"
            )
        if not 0 <= server.allocated <= server.spec.capacity:
            raise AssertionError(
                f"server {server.spec.id}: allocated={server.allocated} outside "
                f"[0, {server.spec.capacity}]"
            )


def generate_customers(
    n: int,
    base_lambda: float,
    base_mu: float,
    theta: float,
    rng: RngStream,
) -> list[Customer]:
    """Draw ``n`` customers with rates within +/-10% of the base values.

    The availability requirement is shared by every customer of a scenario.
    """
    if n < 1:
        raise ConfigurationError(f"need at least one customer, got {n}")
    if base_lambda <= 0 or base_mu <= 0:
        raise ConfigurationError("arrival rate and mean lifetime must be positive")
    customers = []
    for i in range(n):
        lam = rng.uniform(0.9 * base_lambda, 1.1 * base_lambda)
        mu = rng.uniform(0.9 * base_mu, 1.1 * base_mu)
        customers.append(Customer(i, lam, mu, theta))
    return customers


def generate_request(
    customer: Customer,
    now: float,
    catalog: Sequence[VnfType],
    rng: RngStream,
    request_id: int = 0,
) -> SfcRequest:
    """Random chain of two or three VNFs with an exponential lifetime."""
    if not catalog:
        raise ValueError("VNF catalog is empty")
    length = 2 + rng.integer(2)
    sequence = tuple(catalog[rng.integer(len(catalog))] for _ in range(length))
    lifetime = rng.exponential_mean(customer.mean_lifetime)
    return SfcRequest(
        id=request_id,
        customer=customer,
        vnf_sequence=sequence,
        arrival_time=now,
        lifetime=lifetime,
    )


@dataclass
class Topology:
    """Parsed topology document: named servers, group labels and any
    per-group parameter blocks the file carries."""

    names: list[str]
    group_labels: list[int]
    group_params: dict[int, dict]


def load_topology(path: str | Path) -> Topology:
    """Read a topology file.

    The document holds a ``servers`` array of ``{name, group}`` objects
    and optional per-group parameter blocks under ``groups``. Link
    entries, if present, are ignored (any server can reach any other).
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if "servers" not in doc or not doc["servers"]:
        raise ConfigurationError(f"{path}: topology has no servers")
    names = [str(s["name"]) for s in doc["servers"]]
    labels = [int(s.get("group", 1)) for s in doc["servers"]]
    params = {int(k): dict(v) for k, v in doc.get("groups", {}).items()}
    return Topology(names=names, group_labels=labels, group_params=params)
