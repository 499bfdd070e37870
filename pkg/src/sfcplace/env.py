"""Episodic MDP wrapper around the simulator.

One agent step places the redundant instances of one VNF of the current
chain request. Placement of a whole request is atomic in simulated time:
the event queue only advances between requests, never between the VNF
steps of one request.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import core, rbd, sim
from .rng import EPISODE_STRIDE, STREAM_INFRA, RngStream

REWARD_RETRY = -1.0  # chosen server cannot host the instances
REWARD_PROGRESS = 0.0  # intermediate VNF placed
REWARD_REJECTED = -5.0  # retry budget exhausted, whole chain dropped
REWARD_COMPLETED_BASE = 2.0  # constant term of the terminal reward


def decode_action(action: int, n_servers: int, vm_max: int) -> tuple[int, int]:
    """Flat action index -> (server id, redundancy count)."""
    if not 0 <= action < n_servers * vm_max:
        raise ValueError(
            f"action {action} outside [0, {n_servers * vm_max})"
        )
    return action // vm_max, action % vm_max + 1


def encode_action(server: int, q: int, vm_max: int) -> int:
    """(server id, redundancy count) -> flat action index."""
    if not 1 <= q <= vm_max:
        raise ValueError(f"redundancy {q} outside [1, {vm_max}]")
    return server * vm_max + (q - 1)


def encode_state(
    state: sim.SimState,
    current_vnf: core.VnfType,
    customer: core.Customer,
) -> np.ndarray:
    """Observation layout: per-server free-capacity fractions, per-server
    steady-state availabilities, the current VNF's normalized demand, and
    the customer's availability requirement. Every entry lies in [0, 1];
    a down server contributes a zero free fraction."""
    n = len(state.servers)
    obs = np.empty(2 * n + 2, dtype=np.float64)
    for i, server in enumerate(state.servers):
        obs[i] = server.free_resources() / server.spec.capacity
        obs[n + i] = rbd.steady_state_availability(server.spec.mttf, server.spec.mttr)
    max_demand = max(v.resource_demand for v in state.catalog)
    obs[2 * n] = current_vnf.resource_demand / max_demand
    obs[2 * n + 1] = customer.availability_requirement
    return obs


@dataclass
class StepOutcome:
    observation: np.ndarray
    reward: float
    done: bool
    info: dict


@dataclass
class EpisodeStats:
    """Aggregates over the resolved requests of one finished episode."""

    requests: int
    placed: int
    accepted: int
    rejected: int
    acceptance_rate: Optional[float]
    mean_energy_per_placed: Optional[float]
    cumulative_reward: float
    steps: int
    sim_hours: float
    placements: list[sim.PlacementRecord] = field(default_factory=list)


@dataclass
class EnvConfig:
    """Everything the environment needs to rebuild a fresh scenario."""

    server_groups: list[core.GroupParams]
    n_customers: int
    base_lambda: float
    base_mu: float
    theta: float
    vnf_mttf: float
    vnf_mttr: float
    catalog: list[core.VnfType] = field(default_factory=core.default_catalog)
    server_names: Optional[list[str]] = None
    vm_max: int = 4
    max_retries: int = 3
    availability_weight: float = 1000.0
    energy_weight: float = 0.005
    episode_hours: float = 8760.0
    max_episode_steps: Optional[int] = None


class PlacementEnv:
    """Sequential VNF placement as an episodic decision process.

    ``reset`` rebuilds an empty infrastructure with freshly drawn
    customers and advances the simulation to the first request.
    ``step`` consumes one placement action for the current VNF.
    """

    def __init__(self, config: EnvConfig, seed: int = 0, trace: Optional[list] = None):
        self.config = config
        self._base_seed = seed
        self._trace = trace
        self._episode_index = -1
        self._done = True
        self._request: Optional[core.SfcRequest] = None
        self._sim: Optional[sim.SimState] = None
        n_servers = sum(g.count for g in config.server_groups)
        self.n_servers = n_servers
        self.n_actions = n_servers * config.vm_max
        self.observation_size = 2 * n_servers + 2
        self._max_demand = max(v.resource_demand for v in config.catalog)

    # -- episode control -------------------------------------------------

    def reset(self, seed: Optional[int] = None) -> np.ndarray:
        if seed is not None:
            self._base_seed = seed
            self._episode_index = 0
        else:
            self._episode_index += 1
        offset = EPISODE_STRIDE * self._episode_index
        infra_rng = RngStream(self._base_seed, offset + STREAM_INFRA)
        customers = core.generate_customers(
            self.config.n_customers,
            self.config.base_lambda,
            self.config.base_mu,
            self.config.theta,
            infra_rng,
        )
        servers = core.build_infrastructure(self.config)
        self._sim = sim.SimState(
            servers=servers,
            customers=customers,
            catalog=self.config.catalog,
            vnf_mttf=self.config.vnf_mttf,
            vnf_mttr=self.config.vnf_mttr,
            seed=self._base_seed,
            stream_offset=offset,
            trace=self._trace,
        )
        sim.schedule_initial_events(self._sim)
        self._avail = np.array(
            [
                rbd.steady_state_availability(s.spec.mttf, s.spec.mttr)
                for s in servers
            ]
        )
        self._caps = np.array([float(s.spec.capacity) for s in servers])
        self._steps = 0
        self._cumulative_reward = 0.0
        self._done = False
        self._retries = 0
        self._assignments: list[tuple[int, int]] = []
        self._position = 0
        self._advance_to_next_request()
        return self._observation()

    def _advance_to_next_request(self) -> None:
        """Pump autonomous events until the next arrival inside the episode
        horizon; ends the episode when none remains."""
        state = self._sim
        self._request = None
        self._position = 0
        self._retries = 0
        self._assignments = []
        while True:
            event = state.pop_due(self.config.episode_hours)
            if event is None:
                self._done = True
                return
            if event.kind == sim.SFC_ARRIVAL:
                self._request = sim.begin_arrival(state, event)
                return
            sim.handle_event(state, event, None)

    # -- observations ----------------------------------------------------

    def _observation(self) -> np.ndarray:
        state = self._sim
        n = self.n_servers
        obs = np.empty(self.observation_size, dtype=np.float64)
        for i, server in enumerate(state.servers):
            obs[i] = server.free_resources() / self._caps[i]
        obs[n : 2 * n] = self._avail
        if self._request is not None:
            vnf = self._request.vnf_sequence[self._position]
            obs[2 * n] = vnf.resource_demand / self._max_demand
            obs[2 * n + 1] = self._request.customer.availability_requirement
        else:
            obs[2 * n] = 0.0
            obs[2 * n + 1] = self.config.theta
        return obs

    # -- transitions -----------------------------------------------------

    def step(self, action: int) -> StepOutcome:
        if self._done:
            raise RuntimeError("step() called on a finished episode; call reset()")
        server_id, q = decode_action(action, self.n_servers, self.config.vm_max)
        state = self._sim
        request = self._request
        vnf = request.vnf_sequence[self._position]
        info = {
            "sfc_completed": False,
            "sfc_accepted": False,
            "sfc_availability": None,
            "sfc_energy": None,
        }

        if state.servers[server_id].allocate(vnf, q, request.id):
            self._assignments.append((server_id, q))
            self._position += 1
            self._retries = 0
            if self._position == len(request.vnf_sequence):
                placement = core.Placement(request, list(self._assignments))
                record = sim.register_placement(state, request, placement)
                theta = request.customer.availability_requirement
                reward = (
                    (record.availability - theta) * self.config.availability_weight
                    - record.energy_watts * self.config.energy_weight
                    + REWARD_COMPLETED_BASE
                )
                info["sfc_completed"] = True
                info["sfc_accepted"] = record.accepted
                info["sfc_availability"] = record.availability
                info["sfc_energy"] = record.energy_watts
                self._advance_to_next_request()
            else:
                reward = REWARD_PROGRESS
        else:
            self._retries += 1
            if self._retries >= self.config.max_retries:
                core.deallocate(request.id, state.servers)
                state.rejected += 1
                reward = REWARD_REJECTED
                self._advance_to_next_request()
            else:
                reward = REWARD_RETRY

        self._steps += 1
        self._cumulative_reward += reward
        if (
            self.config.max_episode_steps is not None
            and self._steps >= self.config.max_episode_steps
        ):
            self._done = True
        return StepOutcome(self._observation(), reward, self._done, info)

    # -- reporting ---------------------------------------------------------

    def episode_metrics(self) -> EpisodeStats:
        if not self._done:
            raise RuntimeError("episode_metrics() requires a finished episode")
        state = self._sim
        requests = state.placed + state.rejected
        acceptance = state.accepted / requests if requests else None
        mean_energy = state.energy_total / state.placed if state.placed else None
        return EpisodeStats(
            requests=requests,
            placed=state.placed,
            accepted=state.accepted,
            rejected=state.rejected,
            acceptance_rate=acceptance,
            mean_energy_per_placed=mean_energy,
            cumulative_reward=self._cumulative_reward,
            steps=self._steps,
            sim_hours=min(state.clock, self.config.episode_hours),
            placements=list(state.placements),
        )

    @property
    def done(self) -> bool:
        return self._done

    @property
    def current_request(self) -> Optional[core.SfcRequest]:
        return self._request

    @property
    def servers(self) -> Sequence[core.ServerRuntime]:
        return self._sim.servers
