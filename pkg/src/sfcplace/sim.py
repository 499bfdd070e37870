"""Deterministic discrete-event kernel.

Drives chain arrivals and departures plus server and VNF failure/repair
processes on a priority queue of timestamped events. Placement decisions
are delegated to a callback, so the same kernel serves both the batch
baselines and the interactive MDP environment.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import core, rbd
from .rng import (  # re-exported: streams are part of the kernel's surface
    RngStream,
    STREAM_FAILURES,
    STREAM_WORKLOAD,
)

__all__ = [
    "Event",
    "RngStream",
    "SimState",
    "SimulationReport",
    "PlacementRecord",
    "sample_exponential",
    "schedule_initial_events",
    "begin_arrival",
    "handle_event",
    "register_placement",
    "run_until",
    "SFC_ARRIVAL",
    "SFC_DEPARTURE",
    "SERVER_FAILURE",
    "SERVER_REPAIR",
    "VNF_FAILURE",
    "VNF_REPAIR",
]

SFC_ARRIVAL = "sfc_arrival"
SFC_DEPARTURE = "sfc_departure"
SERVER_FAILURE = "server_failure"
SERVER_REPAIR = "server_repair"
VNF_FAILURE = "vnf_failure"
VNF_REPAIR = "vnf_repair"


@dataclass(frozen=True, order=True)
class Event:
    """A timestamped occurrence; equal times pop in scheduling order."""

    time: float
    seq: int
    kind: str = field(compare=False)
    entity: int = field(compare=False)  # customer/request/server/instance id


def sample_exponential(rate: float, rng: RngStream) -> float:
    """Exponential inter-event time with the given per-hour rate."""
    return rng.exponential(rate)


@dataclass
class PlacementRecord:
    """Outcome of one placed chain, kept for metrics aggregation."""

    request_id: int
    customer_id: int
    n_vnfs: int
    n_servers: int
    energy_watts: float
    availability: float
    accepted: bool


@dataclass
class SimulationReport:
    """Counters accumulated over one simulation horizon."""

    horizon: float
    requests: int
    placed: int
    accepted: int
    rejected: int
    energy_total: float
    placements: list[PlacementRecord]

    @property
    def acceptance_rate(self) -> Optional[float]:
        if self.requests == 0:
            return None
        return self.accepted / self.requests

    @property
    def mean_energy_per_placed(self) -> Optional[float]:
        if self.placed == 0:
            return None
        return self.energy_total / self.placed


class SimState:
    """Clock, event queue and infrastructure state of one simulation.

    Instances are fully independent: parallel runs just use distinct
    (seed, stream) pairs. Within one instance all mutation is
    single-threaded.
    """

    def __init__(
        self,
        servers: Sequence[core.ServerRuntime],
        customers: Sequence[core.Customer],
        catalog: Sequence[core.VnfType],
        vnf_mttf: float,
        vnf_mttr: float,
        seed: int,
        stream_offset: int = 0,
        audit_every_event: bool = False,
        trace: Optional[list] = None,
    ):
        self.clock = 0.0
        self.servers = list(servers)
        self.customers = list(customers)
        self.catalog = list(catalog)
        self.vnf_mttf = vnf_mttf
        self.vnf_mttr = vnf_mttr
        self.vnf_availability = rbd.steady_state_availability(vnf_mttf, vnf_mttr)
        self.rng_workload = RngStream(seed, stream_offset + STREAM_WORKLOAD)
        self.rng_failures = RngStream(seed, stream_offset + STREAM_FAILURES)
        self.audit_every_event = audit_every_event
        self.trace = trace

        self._heap: list[Event] = []
        self._seq = 0
        self._next_request_id = 0
        self._next_instance_id = 0
        self.active: dict[int, core.Placement] = {}
        self.vnf_instances: dict[int, bool] = {}  # instance id -> operational
        self._instances_of: dict[int, list[int]] = {}

        self.arrivals = 0
        self.placed = 0
        self.accepted = 0
        self.rejected = 0
        self.energy_total = 0.0
        self.placements: list[PlacementRecord] = []

    def schedule(self, time: float, kind: str, entity: int) -> None:
        if time < self.clock:
            raise ValueError(f"cannot schedule {kind} at {time} before clock {self.clock}")
        heapq.heappush(self._heap, Event(time, self._seq, kind, entity))
        self._seq += 1

    def peek_time(self) -> Optional[float]:
        return self._heap[0].time if self._heap else None

    def pop_due(self, t_limit: float) -> Optional[Event]:
        """Pop the next event if it is due at or before ``t_limit``."""
        if not self._heap or self._heap[0].time > t_limit:
            return None
        return heapq.heappop(self._heap)

    def new_request_id(self) -> int:
        rid = self._next_request_id
        self._next_request_id += 1
        return rid

    def report(self, horizon: float) -> SimulationReport:
        return SimulationReport(
            horizon=horizon,
            requests=self.arrivals,
            placed=self.placed,
            accepted=self.accepted,
            rejected=self.rejected,
            energy_total=self.energy_total,
            placements=list(self.placements),
        )


PlacerCallback = Callable[[SimState, core.SfcRequest], Optional[core.Placement]]


def schedule_initial_events(state: SimState) -> None:
    """Seed the queue: one first arrival per customer, one first failure per
    server. VNF failure events appear later, when instances are created."""
    if state.clock != 0.0:
        raise ValueError("initial events must be scheduled at clock 0")
    for customer in state.customers:
        gap = sample_exponential(customer.arrival_rate, state.rng_workload)
        state.schedule(gap, SFC_ARRIVAL, customer.id)
    for server in state.servers:
        gap = sample_exponential(1.0 / server.spec.mttf, state.rng_failures)
        state.schedule(gap, SERVER_FAILURE, server.spec.id)


def begin_arrival(state: SimState, event: Event) -> core.SfcRequest:
    """Advance the clock to an arrival, build its request and schedule the
    customer's next one. The caller decides how the request is placed."""
    state.clock = event.time
    customer = state.customers[event.entity]
    gap = sample_exponential(customer.arrival_rate, state.rng_workload)
    state.schedule(state.clock + gap, SFC_ARRIVAL, customer.id)
    request = core.generate_request(
        customer,
        now=state.clock,
        catalog=state.catalog,
        rng=state.rng_workload,
        request_id=state.new_request_id(),
    )
    state.arrivals += 1
    if state.trace is not None:
        state.trace.append((event.time, event.kind, event.entity))
    return request


def register_placement(state: SimState, request: core.SfcRequest, placement: core.Placement) -> PlacementRecord:
    """Account a completed placement: availability, energy, departure event
    and the failure processes of its freshly created VNF instances."""
    availability = rbd.sfc_availability(placement, state.servers, state.vnf_availability)
    energy = placement.energy_watts(state.servers)
    accepted = availability >= request.customer.availability_requirement
    record = PlacementRecord(
        request_id=request.id,
        customer_id=request.customer.id,
        n_vnfs=len(request.vnf_sequence),
        n_servers=len(placement.distinct_servers()),
        energy_watts=energy,
        availability=availability,
        accepted=accepted,
    )
    state.active[request.id] = placement
    state.placed += 1
    state.energy_total += energy
    if accepted:
        state.accepted += 1
    state.placements.append(record)
    state.schedule(request.arrival_time + request.lifetime, SFC_DEPARTURE, request.id)
    instance_ids = []
    for _server_id, q in placement.assignments:
        for _ in range(q):
            iid = state._next_instance_id
            state._next_instance_id += 1
            state.vnf_instances[iid] = True
            instance_ids.append(iid)
            gap = sample_exponential(1.0 / state.vnf_mttf, state.rng_failures)
            state.schedule(state.clock + gap, VNF_FAILURE, iid)
    state._instances_of[request.id] = instance_ids
    return record


def handle_event(state: SimState, event: Event, placer: Optional[PlacerCallback]) -> None:
    """Process one event. Arrivals invoke the placer; everything else is
    autonomous bookkeeping."""
    if event.time < state.clock:
        raise AssertionError(f"event {event} is in the past (clock={state.clock})")

    if event.kind == SFC_ARRIVAL:
        request = begin_arrival(state, event)
        placement = placer(state, request) if placer is not None else None
        if placement is not None:
            register_placement(state, request, placement)
        else:
            state.rejected += 1
        if state.audit_every_event:
            core.audit(state.servers)
        return

    state.clock = event.time
    if state.trace is not None:
        state.trace.append((event.time, event.kind, event.entity))

    if event.kind == SFC_DEPARTURE:
        if event.entity not in state.active:
            raise AssertionError(f"departure for unknown request {event.entity}")
        core.deallocate(event.entity, state.servers)
        del state.active[event.entity]
        for iid in state._instances_of.pop(event.entity, []):
            state.vnf_instances.pop(iid, None)
    elif event.kind == SERVER_FAILURE:
        server = state.servers[event.entity]
        server.operational = False
        gap = sample_exponential(1.0 / server.spec.mttr, state.rng_failures)
        state.schedule(state.clock + gap, SERVER_REPAIR, event.entity)
    elif event.kind == SERVER_REPAIR:
        server = state.servers[event.entity]
        server.operational = True
        gap = sample_exponential(1.0 / server.spec.mttf, state.rng_failures)
        state.schedule(state.clock + gap, SERVER_FAILURE, event.entity)
    elif event.kind == VNF_FAILURE:
        # Stale events for departed instances are dropped silently.
        if state.vnf_instances.get(event.entity, False):
            state.vnf_instances[event.entity] = False
            gap = sample_exponential(1.0 / state.vnf_mttr, state.rng_failures)
            state.schedule(state.clock + gap, VNF_REPAIR, event.entity)
    elif event.kind == VNF_REPAIR:
        if event.entity in state.vnf_instances and not state.vnf_instances[event.entity]:
            state.vnf_instances[event.entity] = True
            gap = sample_exponential(1.0 / state.vnf_mttf, state.rng_failures)
            state.schedule(state.clock + gap, VNF_FAILURE, event.entity)
    else:
        raise AssertionError(f"unknown event kind {event.kind!r}")

    if state.audit_every_event:
        core.audit(state.servers)


def run_until(state: SimState, t_end: float, placer: Optional[PlacerCallback]) -> SimulationReport:
    """Drain events in time order until the next one lies beyond ``t_end``."""
    while True:
        event = state.pop_due(t_end)
        if event is None:
            break
        handle_event(state, event, placer)
    state.clock = max(state.clock, t_end)
    return state.report(horizon=t_end)
