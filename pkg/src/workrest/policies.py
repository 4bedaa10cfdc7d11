"""Work-rest decision policies.

Five policies share one interface: given the observed backlog q, the
conceptual queue Q, the current mood and the worker's capacity, return
how much effort to spend this slot and how many tasks that completes.

* ``me``  - max effort: work whenever tasks are pending.
* ``mt``  - mood threshold: work when mood >= theta1 and tasks pend.
* ``mw``  - mood-and-workload threshold on q * mu(1, mood).
* ``ac``  - index rule on backlog pressure only: rest while
            sigma - q*mood*mu_max >= 0.
* ``cpl`` - index rule that adds deferred-work pressure: rest while
            phi - (q+Q)*mood*mu_max >= 0.

All work branches use the same effort formula: just enough effort to
clear the backlog at the current mood, capped at 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .workers import compute_mu

POLICY_KINDS = ("me", "mt", "mw", "ac", "cpl")


@dataclass(frozen=True)
class PolicyParams:
    """Policy identity plus the one control knob the kind consults."""

    kind: str
    phi: float | None = None
    sigma: float | None = None
    theta1: float | None = None
    theta2: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ValueError(
                f"unknown policy kind {self.kind!r}; expected one of {POLICY_KINDS}"
            )
        if self.kind == "cpl":
            if self.phi is None or self.phi <= 0:
                raise ValueError("cpl requires phi > 0")
        elif self.kind == "ac":
            if self.sigma is None or self.sigma <= 0:
                raise ValueError("ac requires sigma > 0")
        elif self.kind == "mt":
            if self.theta1 is None or not 0.0 <= self.theta1 <= 1.0:
                raise ValueError("mt requires theta1 in [0, 1]")
        elif self.kind == "mw":
            if self.theta2 is None or not 0.0 <= self.theta2 <= 1.0:
                raise ValueError("mw requires theta2 in [0, 1]")

    @property
    def knob_name(self) -> str:
        return {"me": "none", "mt": "theta1", "mw": "theta2",
                "ac": "sigma", "cpl": "phi"}[self.kind]

    @property
    def knob_value(self) -> float:
        return {"me": 0.0, "mt": self.theta1, "mw": self.theta2,
                "ac": self.sigma, "cpl": self.phi}[self.kind]


@dataclass(frozen=True)
class PolicyDecision:
    """Chosen effort in [0, 1] and the tasks it completes."""

    effort: float
    completed: int


REST = PolicyDecision(effort=0.0, completed=0)


def compute_wri(phi: float, q: int, Q: int, mood: float, mu_max: int) -> float:
    """Work-rest index: phi - (q + Q) * mood * mu_max.

    Negative values mean queue pressure outweighs the rest emphasis phi,
    so the worker should work this slot.
    """
    return phi - (q + Q) * mood * mu_max


def work_effort(q: int, mood: float, mu_max: int) -> float:
    """Effort that clears the backlog at current mood, capped at 1.

    When mood * mu_max is zero no effort level is productive; returns 1 so
    that always-work policies still register full effort spent.
    """
    d = mood * mu_max
    if d == 0.0:
        return 1.0
    return min(1.0, q / d)


def _work(q: int, mood: float, mu_max: int) -> PolicyDecision:
    effort = work_effort(q, mood, mu_max)
    return PolicyDecision(effort=effort, completed=compute_mu(effort, mood, mu_max))


def decide_cpl(params: PolicyParams, q: int, Q: int, mood: float, mu_max: int) -> PolicyDecision:
    """Work iff the work-rest index is strictly negative."""
    if compute_wri(params.phi, q, Q, mood, mu_max) < 0.0:
        return _work(q, mood, mu_max)
    return REST


def decide_me(q: int, mood: float, mu_max: int) -> PolicyDecision:
    if q > 0:
        return _work(q, mood, mu_max)
    return REST


def decide_mt(theta1: float, q: int, mood: float, mu_max: int) -> PolicyDecision:
    if mood >= theta1 and q > 0:
        return _work(q, mood, mu_max)
    return REST


def decide_mw(theta2: float, q: int, mood: float, mu_max: int) -> PolicyDecision:
    # Threshold on potential output: q * mu(1, mood) vs mu_max * mu(1, theta2).
    if q > 0 and q * compute_mu(1.0, mood, mu_max) >= mu_max * compute_mu(1.0, theta2, mu_max):
        return _work(q, mood, mu_max)
    return REST


def decide_ac(sigma: float, q: int, mood: float, mu_max: int) -> PolicyDecision:
    """Like the index rule but blind to pending time (no conceptual queue)."""
    if sigma - q * mood * mu_max < 0.0:
        return _work(q, mood, mu_max)
    return REST


def decide(params: PolicyParams, q: int, Q: int, mood: float, mu_max: int) -> PolicyDecision:
    """Dispatch to the policy named by ``params.kind``."""
    if params.kind == "cpl":
        return decide_cpl(params, q, Q, mood, mu_max)
    if params.kind == "me":
        return decide_me(q, mood, mu_max)
    if params.kind == "mt":
        return decide_mt(params.theta1, q, mood, mu_max)
    if params.kind == "mw":
        return decide_mw(params.theta2, q, mood, mu_max)
    return decide_ac(params.sigma, q, mood, mu_max)
