"""Weighted-product search objective with hard and soft constraint modes.

reward = accuracy * (latency / t_latency)^w0 * (area / t_area)^w1

where each exponent is p while its constraint holds and q once violated.
Hard mode (p=0, q=-1) leaves the reward equal to accuracy inside the
feasible region and divides it by the violation ratio outside. Soft mode
(p=q=-0.07) trades the metrics smoothly everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .oracle import EvalResult

SOFT_EXPONENT = -0.07


@dataclass(frozen=True)
class RewardSpec:
    t_latency_ms: float
    t_area: float
    mode: str = "hard"
    p: float = 0.0
    q: float = -1.0
    invalid_penalty: float = 0.0
    t_energy_mj: float | None = None  # enables a third (energy) factor

    def __post_init__(self):
        if self.t_latency_ms <= 0 or self.t_area <= 0:
            raise ValueError("constraint targets must be > 0")
        if self.mode == "hard":
            if (self.p, self.q) != (0.0, -1.0):
                raise ValueError("hard mode requires (p, q) = (0, -1)")
        elif self.mode == "soft":
            if self.p != self.q:
                raise ValueError("soft mode requires p == q")
        else:
            raise ValueError(f"mode must be 'hard' or 'soft', got {self.mode!r}")

    @classmethod
    def hard(cls, t_latency_ms: float, t_area: float, **kwargs) -> "RewardSpec":
        return cls(t_latency_ms, t_area, mode="hard", p=0.0, q=-1.0, **kwargs)

    @classmethod
    def soft(cls, t_latency_ms: float, t_area: float,
             exponent: float = SOFT_EXPONENT, **kwargs) -> "RewardSpec":
        return cls(t_latency_ms, t_area, mode="soft", p=exponent, q=exponent, **kwargs)

    def to_json_dict(self) -> dict:
        d = {
            "t_latency_ms": self.t_latency_ms,
            "t_area": self.t_area,
            "mode": self.mode,
            "p": self.p,
            "q": self.q,
            "invalid_penalty": self.invalid_penalty,
        }
        if self.t_energy_mj is not None:
            d["t_energy_mj"] = self.t_energy_mj
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "RewardSpec":
        d = dict(d)
        mode = d.get("mode", "hard")
        if "p" not in d:
            d["p"] = 0.0 if mode == "hard" else SOFT_EXPONENT
        if "q" not in d:
            d["q"] = -1.0 if mode == "hard" else SOFT_EXPONENT
        return cls(**d)


def _factor(value: float, target: float, p: float, q: float) -> float:
    ratio = value / target
    w = p if value <= target else q
    return ratio ** w


def compute_reward(result: EvalResult, spec: RewardSpec) -> float:
    """Score one evaluation; invalid points earn the fixed penalty."""
    if not result.valid:
        return spec.invalid_penalty
    reward = result.accuracy
    reward *= _factor(result.latency_ms, spec.t_latency_ms, spec.p, spec.q)
    reward *= _factor(result.area, spec.t_area, spec.p, spec.q)
    if spec.t_energy_mj is not None:
        reward *= _factor(result.energy_mj, spec.t_energy_mj, spec.p, spec.q)
    return reward
