"""Slot-by-slot simulation engine.

Each slot runs a fixed phase order over the whole population:

1. delegate this slot's tasks (new cohorts enter at age 0)
2. record the observed backlog q_i(t) and the system total
3. sample per-worker mood
4. policy decision per worker -> (effort, completed)
5. conceptual-queue update from this slot's backlog and completions
6. consume completed tasks oldest-first, age cohorts, expire late ones
7. Lyapunov / drift-bound diagnostics
8. emit the slot report

State is held in flat arrays (one row per worker, one backlog column per
cohort age) so a slot is a handful of vector operations; the scalar
operations in ``workers``/``policies``/``delegation`` define the same
semantics one worker at a time and serve as the test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .delegation import (
    DelegationConfig,
    apportion,
    collective_capacity,
    delegation_weights,
    slot_workload,
)
from .numerics import snap_floor_array
from .policies import PolicyParams
from .rng import mood_sample, uniform01_array
from .workers import TaskCohort, WorkerProfile, WorkerState

__all__ = [
    "SimulationError", "SimConfig", "SlotReport", "RunMetrics", "SimState",
    "CounterMoods", "ConstantMoods", "MatrixMoods", "mood_sample",
    "compute_lyapunov", "drift_bound_sides", "step", "run", "RunResult",
]


class SimulationError(RuntimeError):
    """A phase contract was violated mid-run (indicates a policy bug)."""


@dataclass(frozen=True)
class SimConfig:
    """Identity of one run. ``deadline=None`` disables task expiry.

    ``lambda_max`` / ``mu_max_global`` are the uniform bounds used by the
    drift diagnostics; left as None they default to the per-slot workload
    (one worker could receive everything) and the largest capacity.
    """

    slots: int
    load_factor: float
    policy: PolicyParams
    seed: int = 0
    deadline: int | None = 3
    lambda_max: int | None = None
    mu_max_global: int | None = None

    def __post_init__(self) -> None:
        if self.slots < 1:
            raise ValueError(f"slots must be >= 1, got {self.slots}")
        if not 0.0 < self.load_factor <= 1.0:
            raise ValueError(f"load_factor must be in (0, 1], got {self.load_factor}")
        if self.deadline is not None and self.deadline < 1:
            raise ValueError(f"deadline must be >= 1, got {self.deadline}")


@dataclass(frozen=True)
class SlotReport:
    """Population-level observables of one slot."""

    slot: int
    arrivals: int
    completions: int
    expired: int
    pending_total: int
    effort_sum: float
    expiry_ratio_sum: float
    workers_with_pending: int
    lyapunov: float
    drift_lhs: float
    drift_rhs: float


@dataclass(frozen=True)
class RunMetrics:
    """Time-averaged effort, expiry and completion rates of a run."""

    effort_avg: float
    expiry_avg: float
    completion_avg: float
    slots_counted_for_completion: int


@dataclass
class SimState:
    """Per-worker queue state plus run-length accumulators.

    ``buckets[:, a]`` holds each worker's tasks of age ``a``; ``q`` is the
    carried backlog (before the current slot's arrivals) and always equals
    the bucket row sums.
    """

    ids: np.ndarray
    reputation: np.ndarray
    mu_max: np.ndarray
    buckets: np.ndarray
    q: np.ndarray
    Q: np.ndarray
    x_sum: np.ndarray
    mu_sum: np.ndarray
    w_req: int
    lambda_max: int
    mu_max_global: int
    deadline: int | None
    t: int = 0

    @classmethod
    def from_population(
        cls, population: Sequence[WorkerProfile], config: SimConfig
    ) -> "SimState":
        n = len(population)
        if n == 0:
            raise ValueError("population must be non-empty")
        ids = np.array([p.id for p in population], dtype=np.int64)
        if len(set(ids.tolist())) != n:
            raise ValueError("worker ids must be unique")
        omega = collective_capacity(population)
        if omega <= 0.0:
            raise ValueError("population has zero collective capacity")
        delegation = DelegationConfig(
            load_factor=config.load_factor, deadline=config.deadline, omega=omega
        )
        w_req = slot_workload(delegation.load_factor, delegation.omega)
        mu_max = np.array([p.mu_max for p in population], dtype=np.int64)
        width = config.deadline if config.deadline is not None else 16
        return cls(
            ids=ids,
            reputation=np.array([p.reputation for p in population]),
            mu_max=mu_max,
            buckets=np.zeros((n, width), dtype=np.int64),
            q=np.zeros(n, dtype=np.int64),
            Q=np.zeros(n, dtype=np.int64),
            x_sum=np.zeros(n, dtype=np.int64),
            mu_sum=np.zeros(n, dtype=np.int64),
            w_req=w_req,
            lambda_max=config.lambda_max if config.lambda_max is not None else max(1, w_req),
            mu_max_global=(
                config.mu_max_global if config.mu_max_global is not None else int(mu_max.max())
            ),
            deadline=config.deadline,
        )

    @property
    def n_workers(self) -> int:
        return len(self.ids)

    def to_worker_states(self) -> list[WorkerState]:
        """Export per-worker states with oldest-first cohort FIFOs."""
        out = []
        for i in range(self.n_workers):
            backlog = [
                TaskCohort(count=int(self.buckets[i, a]), age=a)
                for a in range(self.buckets.shape[1] - 1, -1, -1)
                if self.buckets[i, a] > 0
            ]
            out.append(
                WorkerState(backlog=backlog, q=int(self.q[i]), conceptual_q=int(self.Q[i]))
            )
        return out


class CounterMoods:
    """Default mood source: uniform [0, 1) keyed by (seed, worker id, slot)."""

    def __init__(self, seed: int):
        self.seed = seed

    def __call__(self, slot: int, ids: np.ndarray) -> np.ndarray:
        return uniform01_array(self.seed, ids.astype(np.uint64), slot)


class ConstantMoods:
    """Every worker has the same fixed mood every slot (for hand traces)."""

    def __init__(self, value: float):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"mood must be in [0, 1], got {value}")
        self.value = value

    def __call__(self, slot: int, ids: np.ndarray) -> np.ndarray:
        return np.full(len(ids), self.value)


class MatrixMoods:
    """Scripted moods: row per slot, column per worker (for tests)."""

    def __init__(self, values: np.ndarray):
        self.values = np.asarray(values, dtype=float)

    def __call__(self, slot: int, ids: np.ndarray) -> np.ndarray:
        return self.values[slot]


def compute_lyapunov(states: "SimState | Sequence[WorkerState]") -> float:
    """Work-concentration measure: half the sum of squared queue lengths."""
    if isinstance(states, SimState):
        q, Q = states.q, states.Q
    else:
        q = np.array([s.q for s in states], dtype=np.int64)
        Q = np.array([s.conceptual_q for s in states], dtype=np.int64)
    return int((q * q).sum() + (Q * Q).sum()) / 2.0


def drift_bound_sides(
    q: np.ndarray,
    Q: np.ndarray,
    lam: np.ndarray,
    mu: np.ndarray,
    x: np.ndarray,
    lambda_max: int,
    mu_max_global: int,
    expired: np.ndarray | None = None,
) -> tuple[float, float]:
    """Exact one-slot Lyapunov change vs. its constant-padded upper bound.

    ``q``/``Q`` are the carried queues entering the slot, ``lam``/``mu`` the
    slot's arrivals and completions, ``x`` the conceptual-queue increments
    as fired (mu_max if the worker rested with pending tasks, else 0) and
    ``expired`` the tasks dropped at the deadline. Both sides are computed
    in integer arithmetic (doubled internally) so the comparison is exact.
    """
    q = np.asarray(q, dtype=np.int64)
    Q = np.asarray(Q, dtype=np.int64)
    lam = np.asarray(lam, dtype=np.int64)
    mu = np.asarray(mu, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    e = np.zeros_like(q) if expired is None else np.asarray(expired, dtype=np.int64)

    q_next = np.maximum(0, np.maximum(0, q + lam - mu) - e)
    Q_next = np.maximum(0, Q + x - mu)
    lhs2 = int((q_next * q_next - q * q).sum() + (Q_next * Q_next - Q * Q).sum())

    ind = (x > 0).astype(np.int64)
    const2 = lambda_max * lambda_max + mu_max_global * mu_max_global
    real2 = 2 * q * (lam - mu) - 2 * mu * lam + const2
    virt2 = 2 * Q * (mu_max_global * ind - mu) + mu_max_global * mu_max_global * (ind + 1)
    rhs2 = int(real2.sum() + virt2.sum())
    return lhs2 / 2.0, rhs2 / 2.0


def _decide_vectorized(
    params: PolicyParams, q: np.ndarray, Q: np.ndarray, m: np.ndarray, mu_max: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Population-wide policy decision; mirrors ``policies.decide`` exactly."""
    d = m * mu_max
    if params.kind == "me":
        work = q > 0
    elif params.kind == "mt":
        work = (m >= params.theta1) & (q > 0)
    elif params.kind == "mw":
        potential = q * snap_floor_array(1.0 * d)
        threshold = mu_max * snap_floor_array(1.0 * (params.theta2 * mu_max))
        work = (potential >= threshold) & (q > 0)
    elif params.kind == "ac":
        work = params.sigma - q * m * mu_max < 0.0
    else:  # cpl
        work = params.phi - (q + Q) * m * mu_max < 0.0

    safe = np.where(d > 0.0, d, 1.0)
    effort_if_work = np.where(d > 0.0, np.minimum(1.0, q / safe), 1.0)
    xi = np.where(work, effort_if_work, 0.0)
    mu = np.where(work, snap_floor_array(xi * d), 0)
    return xi, mu


def _consume_oldest_first(buckets: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Remove ``mu`` tasks per worker, draining the oldest ages first."""
    rev = buckets[:, ::-1]
    csum = np.cumsum(rev, axis=1)
    rem = np.maximum(csum - mu[:, None], 0)
    new_rev = np.diff(rem, axis=1, prepend=0)
    return new_rev[:, ::-1].copy()


def _step_arrays(
    state: SimState, config: SimConfig, t: int, mood_source
) -> tuple[SlotReport, dict[str, np.ndarray]]:
    """One slot over the state arrays; returns the report and per-worker data."""
    # Phase 1: delegation. Weights use the carried backlog, new cohorts
    # enter at age 0.
    weights = delegation_weights(state.reputation, state.mu_max, state.q)
    lam = apportion(state.w_req, weights, state.ids)
    state.buckets[:, 0] += lam

    # Phase 2: observed backlog and system total.
    q_hat = state.q + lam
    n_total = int(q_hat.sum())

    # Phase 3: moods.
    m = np.asarray(mood_source(t, state.ids), dtype=float)

    # Phase 4: policy decisions.
    xi, mu = _decide_vectorized(config.policy, q_hat, state.Q, m, state.mu_max)
    if (mu > q_hat).any():
        bad = int(np.argmax(mu > q_hat))
        raise SimulationError(
            f"slot {t}: worker {int(state.ids[bad])} completed {int(mu[bad])} "
            f"of {int(q_hat[bad])} pending tasks"
        )

    # Phase 5: conceptual queues, from this slot's backlog and completions.
    x = state.mu_max * ((q_hat > 0) & (mu == 0))
    Q_next = np.maximum(0, state.Q + x - mu)

    # Phase 6: consume oldest-first, then age and expire.
    buckets = _consume_oldest_first(state.buckets, mu)
    if state.deadline is None:
        if buckets[:, -1].any():  # widen before anything reaches the edge
            buckets = np.hstack([buckets, np.zeros_like(buckets)])
        expired = np.zeros(state.n_workers, dtype=np.int64)
    else:
        expired = buckets[:, -1].copy()
    buckets[:, 1:] = buckets[:, :-1]
    buckets[:, 0] = 0
    q_next = q_hat - mu - expired
    if int(buckets.sum()) != int(q_next.sum()):
        raise SimulationError(f"slot {t}: backlog bookkeeping out of sync")

    # Phase 7: diagnostics against the pre-slot queues.
    lhs, rhs = drift_bound_sides(
        state.q, state.Q, lam, mu, x, state.lambda_max, state.mu_max_global, expired
    )
    lyapunov = int((q_next * q_next).sum() + (Q_next * Q_next).sum()) / 2.0

    # Phase 8: report and state handoff.
    pending = q_hat > 0
    expiry_ratio_sum = float((expired[pending] / q_hat[pending]).sum())
    report = SlotReport(
        slot=t,
        arrivals=int(lam.sum()),
        completions=int(mu.sum()),
        expired=int(expired.sum()),
        pending_total=n_total,
        effort_sum=float(xi.sum()),
        expiry_ratio_sum=expiry_ratio_sum,
        workers_with_pending=int(pending.sum()),
        lyapunov=lyapunov,
        drift_lhs=lhs,
        drift_rhs=rhs,
    )
    per_worker = {
        "lam": lam, "mu": mu, "expired": expired, "mood": m, "effort": xi,
        "x": x, "q_hat": q_hat, "q_end": q_next, "Q_end": Q_next,
    }
    state.buckets = buckets
    state.q = q_next
    state.Q = Q_next
    state.x_sum += x
    state.mu_sum += mu
    state.t = t + 1
    return report, per_worker


def step(
    state: SimState,
    population: Sequence[WorkerProfile],
    config: SimConfig,
    t: int,
    mood_source=None,
) -> SlotReport:
    """Advance one slot through the eight phases, mutating ``state``."""
    if t >= config.slots:
        raise ValueError(f"slot {t} out of range for a {config.slots}-slot run")
    if len(population) != state.n_workers:
        raise ValueError("population does not match simulation state")
    if mood_source is None:
        mood_source = CounterMoods(config.seed)
    report, _ = _step_arrays(state, config, t, mood_source)
    return report


@dataclass
class RunResult:
    """Everything a finished run exposes: metrics, reports, diagnostics."""

    metrics: RunMetrics
    reports: list[SlotReport]
    final_state: SimState
    arrivals_total: int
    completions_total: int
    expired_total: int
    drift_violations: int
    trace: dict[str, np.ndarray] | None = None

    @property
    def pending_final(self) -> int:
        return int(self.final_state.q.sum())

    def conserves_tasks(self) -> bool:
        return self.arrivals_total == (
            self.completions_total + self.expired_total + self.pending_final
        )

    def stability_margins(self) -> np.ndarray:
        """Per-worker Q(T) - (sum x - sum mu); non-negative on every run."""
        s = self.final_state
        return s.Q - (s.x_sum - s.mu_sum)


def run(
    config: SimConfig,
    population: Sequence[WorkerProfile],
    mood_source=None,
    keep_reports: bool = True,
    record_worker_trace: bool = False,
) -> RunResult:
    """Simulate ``config.slots`` slots from empty queues.

    Metrics: effort and expiry rates average over all (slot, worker)
    pairs, with empty-backlog workers contributing zero expiry; the
    completion rate averages completions/pending over slots that had
    pending work.
    """
    state = SimState.from_population(population, config)
    if mood_source is None:
        mood_source = CounterMoods(config.seed)
    n = state.n_workers

    effort_total = 0.0
    expiry_ratio_total = 0.0
    completion_ratio_total = 0.0
    slots_with_pending = 0
    arrivals_total = 0
    completions_total = 0
    expired_total = 0
    drift_violations = 0
    reports: list[SlotReport] = []
    trace: dict[str, list[np.ndarray]] | None = None
    if record_worker_trace:
        trace = {}

    for t in range(config.slots):
        report, per_worker = _step_arrays(state, config, t, mood_source)
        effort_total += report.effort_sum
        expiry_ratio_total += report.expiry_ratio_sum
        if report.pending_total > 0:
            completion_ratio_total += report.completions / report.pending_total
            slots_with_pending += 1
        arrivals_total += report.arrivals
        completions_total += report.completions
        expired_total += report.expired
        if report.drift_lhs > report.drift_rhs:
            drift_violations += 1
        if keep_reports:
            reports.append(report)
        if trace is not None:
            for key, value in per_worker.items():
                trace.setdefault(key, []).append(np.array(value, copy=True))

    metrics = RunMetrics(
        effort_avg=effort_total / (config.slots * n),
        expiry_avg=expiry_ratio_total / (config.slots * n),
        completion_avg=(
            completion_ratio_total / slots_with_pending if slots_with_pending else 0.0
        ),
        slots_counted_for_completion=slots_with_pending,
    )
    return RunResult(
        metrics=metrics,
        reports=reports,
        final_state=state,
        arrivals_total=arrivals_total,
        completions_total=completions_total,
        expired_total=expired_total,
        drift_violations=drift_violations,
        trace=None if trace is None else {k: np.array(v) for k, v in trace.items()},
    )
