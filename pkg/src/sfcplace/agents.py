"""Policy-gradient training loops and the non-learning baselines.

Both learners share one rollout collector and one advantage routine.
The actor-critic learner takes one gradient step per n-step rollout on
raw advantages; the proximal learner reuses each rollout for several
epochs of clipped-surrogate minibatch steps on normalized advantages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import core
from .env import EpisodeStats, PlacementEnv
from .nn import Adam, CategoricalDistribution, Mlp, RmsProp, batch_log_probs_entropy, softmax
from .rng import RngStream


@dataclass
class A2cConfig:
    lr: float = 0.00005
    gamma: float = 0.99
    n_steps: int = 5
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    workers: int = 1

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.lr <= 0.0:
            raise ValueError("learning rate must be positive")


@dataclass
class PpoConfig:
    lr: float = 0.00005
    gamma: float = 0.85
    n_steps: int = 128
    clip_epsilon: float = 0.2
    epochs: int = 4
    minibatches: int = 4
    gae_lambda: float = 0.95
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    workers: int = 1

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.clip_epsilon <= 0.0:
            raise ValueError("clip range must be positive")


AgentConfig = Union[A2cConfig, PpoConfig]


@dataclass
class Trajectory:
    """Parallel arrays over a fixed-length rollout of N workers."""

    obs: np.ndarray  # [T, N, obs_dim]
    actions: np.ndarray  # [T, N]
    rewards: np.ndarray  # [T, N]
    dones: np.ndarray  # [T, N] 1.0 where the episode ended at this step
    log_probs: np.ndarray  # [T, N] under the behavior policy
    values: np.ndarray  # [T, N]
    bootstrap_values: np.ndarray  # [N] V(final state), 0 if that state is terminal
    final_obs: np.ndarray  # [N, obs_dim]

    def __len__(self):
        return self.obs.shape[0]


def collect_rollout(
    envs: Union[PlacementEnv, Sequence[PlacementEnv]],
    net: Mlp,
    n_steps: int,
    rng: RngStream,
    start_obs: Optional[np.ndarray] = None,
) -> Trajectory:
    """Sample ``n_steps`` transitions per worker from the categorical policy.

    Workers that finish an episode are reset immediately and keep
    collecting. Pass the previous trajectory's ``final_obs`` to continue
    seamlessly; omit it to reset every worker first.
    """
    if isinstance(envs, PlacementEnv):
        envs = [envs]
    n = len(envs)
    if start_obs is None:
        obs = np.stack([e.reset() for e in envs])
    else:
        obs = np.array(start_obs, copy=True)
    dim = obs.shape[1]
    traj = Trajectory(
        obs=np.empty((n_steps, n, dim)),
        actions=np.empty((n_steps, n), dtype=np.int64),
        rewards=np.empty((n_steps, n)),
        dones=np.zeros((n_steps, n)),
        log_probs=np.empty((n_steps, n)),
        values=np.empty((n_steps, n)),
        bootstrap_values=np.zeros(n),
        final_obs=np.empty((n, dim)),
    )
    for t in range(n_steps):
        for w, env in enumerate(envs):
            logits, value = net.policy_value(obs[w])
            dist = CategoricalDistribution(logits)
            action = dist.sample(rng)
            outcome = env.step(action)
            traj.obs[t, w] = obs[w]
            traj.actions[t, w] = action
            traj.rewards[t, w] = outcome.reward
            traj.log_probs[t, w] = dist.log_prob(action)
            traj.values[t, w] = value
            if outcome.done:
                traj.dones[t, w] = 1.0
                obs[w] = env.reset()
            else:
                obs[w] = outcome.observation
    traj.final_obs[:] = obs
    for w, env in enumerate(envs):
        _, value = net.policy_value(obs[w])
        traj.bootstrap_values[w] = value
    return traj


def compute_advantages(
    traj: Trajectory,
    gamma: float,
    gae_lambda: Optional[float] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Discounted returns and advantages for a rollout.

    Without a smoothing factor: bootstrapped n-step returns, with
    advantage = return - value. With one: generalized advantage
    estimation, with returns = advantages + values. Done flags zero the
    bootstrap across episode boundaries either way.
    """
    t_len, n = traj.rewards.shape
    returns = np.zeros((t_len, n))
    advantages = np.zeros((t_len, n))
    if gae_lambda is None:
        running = traj.bootstrap_values.copy()
        for t in range(t_len - 1, -1, -1):
            running = traj.rewards[t] + gamma * (1.0 - traj.dones[t]) * running
            returns[t] = running
        advantages = returns - traj.values
    else:
        gae = np.zeros(n)
        next_values = traj.bootstrap_values
        for t in range(t_len - 1, -1, -1):
            not_done = 1.0 - traj.dones[t]
            delta = traj.rewards[t] + gamma * not_done * next_values - traj.values[t]
            gae = delta + gamma * gae_lambda * not_done * gae
            advantages[t] = gae
            next_values = traj.values[t]
        returns = advantages + traj.values
    return returns, advantages


def _entropy_grad(probs: np.ndarray, log_probs: np.ndarray) -> np.ndarray:
    """d(entropy)/d(logits) per sample: -p * (log p + H)."""
    entropy = -(probs * log_probs).sum(axis=1, keepdims=True)
    return -probs * (log_probs + entropy)


def a2c_update(net: Mlp, opt: RmsProp, traj: Trajectory, config: A2cConfig) -> dict:
    """One synchronous gradient step on the actor-critic loss.

    Advantages enter the policy term as constants; no gradient flows
    through them.
    """
    returns, advantages = compute_advantages(traj, config.gamma, None)
    batch = len(traj) * traj.rewards.shape[1]
    obs = traj.obs.reshape(batch, -1)
    actions = traj.actions.reshape(batch)
    returns = returns.reshape(batch)
    advantages = advantages.reshape(batch)

    logits, values, cache = net.forward(obs)
    log_taken, entropy = batch_log_probs_entropy(logits, actions)
    probs = softmax(logits)

    policy_loss = -(log_taken * advantages).mean()
    value_loss = ((values - returns) ** 2).mean()
    entropy_mean = entropy.mean()

    one_hot = np.zeros_like(probs)
    one_hot[np.arange(batch), actions] = 1.0
    dlogits = (advantages[:, None] * (probs - one_hot)) / batch
    dlogits -= config.entropy_coef * _entropy_grad(probs, np.log(probs + 1e-300)) / batch
    dvalues = 2.0 * config.value_coef * (values - returns) / batch

    grads = net.backward(cache, dlogits, dvalues)
    opt.step(net.params, grads, config.lr)
    return {
        "policy_loss": float(policy_loss),
        "value_loss": float(value_loss),
        "entropy": float(entropy_mean),
        "total_loss": float(
            policy_loss + config.value_coef * value_loss
            - config.entropy_coef * entropy_mean
        ),
    }


def ppo_ratio(new_log_prob, old_log_prob):
    """Probability ratio between the current and the behavior policy."""
    return np.exp(np.asarray(new_log_prob) - np.asarray(old_log_prob))


def ppo_clip_loss(ratio, advantage, epsilon: float):
    """Pessimistic per-sample surrogate objective.

    The training loss is the negative mean of this value.
    """
    if epsilon <= 0.0:
        raise ValueError("clip range must be positive")
    ratio = np.asarray(ratio, dtype=np.float64)
    advantage = np.asarray(advantage, dtype=np.float64)
    clipped = np.clip(ratio, 1.0 - epsilon, 1.0 + epsilon)
    return np.minimum(ratio * advantage, clipped * advantage)


def ppo_update(
    net: Mlp,
    opt: Adam,
    traj: Trajectory,
    config: PpoConfig,
    rng: RngStream,
) -> dict:
    """Several epochs of clipped-surrogate minibatch steps on one rollout."""
    returns, advantages = compute_advantages(traj, config.gamma, config.gae_lambda)
    batch = len(traj) * traj.rewards.shape[1]
    obs = traj.obs.reshape(batch, -1)
    actions = traj.actions.reshape(batch)
    old_log_probs = traj.log_probs.reshape(batch)
    returns = returns.reshape(batch)
    advantages = advantages.reshape(batch)
    advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)

    mb_size = max(1, batch // config.minibatches)
    reports = []
    for _ in range(config.epochs):
        perm = rng.permutation(batch)
        for start in range(0, batch, mb_size):
            idx = perm[start : start + mb_size]
            m = len(idx)
            logits, values, cache = net.forward(obs[idx])
            log_taken, entropy = batch_log_probs_entropy(logits, actions[idx])
            probs = softmax(logits)
            ratio = ppo_ratio(log_taken, old_log_probs[idx])
            adv = advantages[idx]

            unclipped = ratio * adv
            clipped = np.clip(ratio, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon) * adv
            objective = np.minimum(unclipped, clipped)
            policy_loss = -objective.mean()
            value_loss = ((values - returns[idx]) ** 2).mean()
            entropy_mean = entropy.mean()

            # Gradient flows through the unclipped branch only where it is
            # the active minimum; a saturated clip contributes nothing.
            active = (unclipped <= clipped).astype(np.float64)
            dlog_taken = -(active * ratio * adv) / m
            one_hot = np.zeros_like(probs)
            one_hot[np.arange(m), actions[idx]] = 1.0
            dlogits = dlog_taken[:, None] * (one_hot - probs)
            log_probs_full = np.log(probs + 1e-300)
            dlogits -= config.entropy_coef * _entropy_grad(probs, log_probs_full) / m
            dvalues = 2.0 * config.value_coef * (values - returns[idx]) / m

            grads = net.backward(cache, dlogits, dvalues)
            opt.step(net.params, grads, config.lr)
            reports.append((policy_loss, value_loss, entropy_mean))
    policy_losses, value_losses, entropies = zip(*reports)
    return {
        "policy_loss": float(np.mean(policy_losses)),
        "value_loss": float(np.mean(value_losses)),
        "entropy": float(np.mean(entropies)),
        "total_loss": float(
            np.mean(policy_losses)
            + config.value_coef * np.mean(value_losses)
            - config.entropy_coef * np.mean(entropies)
        ),
    }


# -- training driver ---------------------------------------------------------


@dataclass
class TrainingResult:
    net: Mlp
    curve: list[dict] = field(default_factory=list)
    episode_log: list[tuple[int, float]] = field(default_factory=list)
    total_steps: int = 0


def make_optimizer(net: Mlp, config: AgentConfig):
    if isinstance(config, A2cConfig):
        return RmsProp(net.n_params)
    return Adam(net.n_params)


def train_agent(
    envs: Union[PlacementEnv, Sequence[PlacementEnv]],
    net: Mlp,
    config: AgentConfig,
    total_steps: int,
    rng: RngStream,
    log_interval: int = 1000,
) -> TrainingResult:
    """Alternate rollout collection and updates until the step budget is
    spent; logs a training-curve row roughly every ``log_interval`` steps."""
    if isinstance(envs, PlacementEnv):
        envs = [envs]
    n = len(envs)
    opt = make_optimizer(net, config)
    result = TrainingResult(net=net)
    steps_done = 0
    cumulative_reward = 0.0
    episode_acc = np.zeros(n)
    recent_episodes: list[float] = []
    next_log = 0
    obs = None
    losses = {"policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0, "total_loss": 0.0}

    while steps_done < total_steps:
        traj = collect_rollout(envs, net, config.n_steps, rng, start_obs=obs)
        obs = traj.final_obs
        for t in range(len(traj)):
            for w in range(n):
                episode_acc[w] += traj.rewards[t, w]
                if traj.dones[t, w]:
                    reward = float(episode_acc[w])
                    recent_episodes.append(reward)
                    result.episode_log.append((steps_done + t * n + w + 1, reward))
                    episode_acc[w] = 0.0
        steps_done += len(traj) * n
        cumulative_reward += float(traj.rewards.sum())
        if isinstance(config, A2cConfig):
            losses = a2c_update(net, opt, traj, config)
        else:
            losses = ppo_update(net, opt, traj, config, rng)
        if steps_done >= next_log or steps_done >= total_steps:
            window = recent_episodes[-20:]
            result.curve.append(
                {
                    "step": steps_done,
                    "cumulative_reward": cumulative_reward,
                    "episode_reward_mean": float(np.mean(window)) if window else 0.0,
                    "entropy": losses["entropy"],
                    "policy_loss": losses["policy_loss"],
                    "value_loss": losses["value_loss"],
                }
            )
            next_log += log_interval
    result.total_steps = steps_done
    return result


def run_policy_episode(
    env: PlacementEnv,
    net: Mlp,
    seed: int,
    deterministic: bool = True,
    rng: Optional[RngStream] = None,
) -> EpisodeStats:
    """Play one full episode; the deployment mode picks argmax actions."""
    obs = env.reset(seed)
    while not env.done:
        logits, _ = net.policy_value(obs)
        if deterministic:
            action = int(np.argmax(logits))
        else:
            action = CategoricalDistribution(logits).sample(rng)
        obs = env.step(action).observation
    return env.episode_metrics()


# -- non-learning baselines ---------------------------------------------------


def greedy_place(
    request: core.SfcRequest,
    servers: Sequence[core.ServerRuntime],
    rng: RngStream,
    vm_max: int = 4,
) -> Optional[core.Placement]:
    """Most-free-server heuristic with uniformly drawn redundancy.

    Each VNF goes to the operational server with the most free capacity
    (ties to the lowest id). If the drawn redundancy does not fit there,
    it is redrawn once capped to what fits; if nothing fits, the whole
    request is rolled back and rejected.
    """
    assignments: list[tuple[int, int]] = []
    for vnf in request.vnf_sequence:
        best = None
        for server in servers:
            if not server.operational:
                continue
            if best is None or server.free_resources() > best.free_resources():
                best = server
        if best is None:
            core.deallocate(request.id, servers)
            return None
        q = 1 + rng.integer(vm_max)
        if q * vnf.resource_demand > best.free_resources():
            cap = min(vm_max, best.free_resources() // vnf.resource_demand)
            if cap < 1:
                core.deallocate(request.id, servers)
                return None
            q = 1 + rng.integer(cap)
        if not best.allocate(vnf, q, request.id):
            raise AssertionError("greedy chose an allocation that does not fit")
        assignments.append((best.spec.id, q))
    return core.Placement(request, assignments)


def random_place(
    request: core.SfcRequest,
    servers: Sequence[core.ServerRuntime],
    rng: RngStream,
    vm_max: int = 4,
    max_retries: int = 3,
) -> Optional[core.Placement]:
    """Uniform random server and redundancy with the same retry/rollback
    rules as the environment; a sanity baseline for training-signal tests."""
    if not servers:
        return None
    assignments: list[tuple[int, int]] = []
    for vnf in request.vnf_sequence:
        placed = False
        for _ in range(max_retries):
            server = servers[rng.integer(len(servers))]
            q = 1 + rng.integer(vm_max)
            if server.allocate(vnf, q, request.id):
                assignments.append((server.spec.id, q))
                placed = True
                break
        if not placed:
            core.deallocate(request.id, servers)
            return None
    return core.Placement(request, assignments)
