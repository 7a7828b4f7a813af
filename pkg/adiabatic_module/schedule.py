"""Time discretization and per-run options for the adiabatic evolution."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any

from utils.settings_store import get_setting

DIVISIBILITY_TOLERANCE = 1e-9


def _integer_ratio(numerator: float, denominator: float, what: str) -> int:
    ratio = numerator / denominator
    count = int(round(ratio))
    if count < 1 or abs(ratio - count) > DIVISIBILITY_TOLERANCE * max(1.0, ratio):
        raise ValueError(f"{what}: {numerator} / {denominator} = {ratio} is not a positive integer")
    return count


@dataclass(frozen=True)
class Schedule:
    """T split into M = T/Δ steps at s = l/M; each step split into Δ/δ Trotter substeps."""

    T: float
    delta_cap: float = 0.125
    inner_delta: float | None = None

    def __post_init__(self) -> None:
        if self.T <= 0:
            raise ValueError(f"T must be positive (got {self.T})")
        if self.delta_cap <= 0:
            raise ValueError(f"delta must be positive (got {self.delta_cap})")
        if self.inner_delta is None:
            object.__setattr__(self, "inner_delta", self.delta_cap)
        elif self.inner_delta <= 0:
            raise ValueError(f"inner delta must be positive (got {self.inner_delta})")
        _integer_ratio(self.T, self.delta_cap, "T must be a multiple of delta")
        _integer_ratio(self.delta_cap, self.inner_delta, "delta must be a multiple of the inner delta")

    @classmethod
    def from_settings(cls, T: float, delta: float | None = None, inner_delta: float | None = None) -> Schedule:
        return cls(T, float(delta if delta is not None else get_setting("default_delta")), inner_delta)

    @property
    def M(self) -> int:
        return _integer_ratio(self.T, self.delta_cap, "T must be a multiple of delta")

    @property
    def substeps(self) -> int:
        return _integer_ratio(self.delta_cap, self.inner_delta, "delta must be a multiple of the inner delta")

    def s_at(self, step: int) -> float:
        if not 0 <= step <= self.M:
            raise ValueError(f"step must be in [0, {self.M}] (got {step})")
        return step / self.M

    def to_dict(self) -> dict[str, Any]:
        return {"T": self.T, "delta": self.delta_cap, "inner_delta": self.inner_delta, "M": self.M}


@dataclass(frozen=True)
class RunConfig:
    chi_cap: int
    renormalize_after_truncation: bool = False
    observable_stride: int = 1
    evolution_sign: int = -1
    seed: int = 0
    defer_returns: bool = True
    decomposition: str = "svd"
    literal_clause_phases: bool = False
    entropy_cut: int | None = None
    record_spectra: bool = False

    def __post_init__(self) -> None:
        if self.chi_cap < 1:
            raise ValueError(f"chi_cap must be >= 1 (got {self.chi_cap})")
        if self.observable_stride < 1:
            raise ValueError(f"observable_stride must be >= 1 (got {self.observable_stride})")
        if self.evolution_sign not in (-1, 1):
            raise ValueError(f"evolution_sign must be +1 or -1 (got {self.evolution_sign})")
        if self.decomposition not in ("svd", "density"):
            raise ValueError(f"decomposition must be 'svd' or 'density' (got {self.decomposition!r})")

    @classmethod
    def from_settings(cls, **overrides: Any) -> RunConfig:
        values: dict[str, Any] = {
            "chi_cap": int(get_setting("default_chi")),
            "observable_stride": int(get_setting("default_observable_stride")),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def parse_sign(text: str | int) -> int:
    """'+', '-', '+1', '-1' or an int -> +1 / -1."""
    if isinstance(text, int):
        value = text
    else:
        cleaned = text.strip()
        value = {"+": 1, "-": -1, "+1": 1, "-1": -1, "1": 1}.get(cleaned, 0)
    if value not in (-1, 1):
        raise ValueError(f"sign must be '+' or '-' (got {text!r})")
    return value
