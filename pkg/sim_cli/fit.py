"""Least-squares fit of the Schmidt-coefficient decay log₂λ_α = b + c/√α + d√α."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np
from sklearn.linear_model import LinearRegression
from sklearn.metrics import mean_squared_error

from utils.file_utils import load_json

MIN_FIT_POINTS = 4


class FitError(RuntimeError):
    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.code = "fit_degenerate"


@dataclass(frozen=True)
class FitResult:
    b: float
    c: float
    d: float
    residual: float
    points: int

    def predict(self, alpha: Sequence[float] | np.ndarray) -> np.ndarray:
        a = np.asarray(alpha, dtype=np.float64)
        return self.b + self.c / np.sqrt(a) + self.d * np.sqrt(a)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def fit_schmidt_decay(values: Sequence[float]) -> FitResult:
    """Fit against α = 1, 2, ... over the positive coefficients (sorted non-increasing)."""
    spectrum = np.sort(np.asarray(values, dtype=np.float64))[::-1]
    spectrum = spectrum[spectrum > 0.0]
    if spectrum.shape[0] < MIN_FIT_POINTS:
        raise FitError(f"need at least {MIN_FIT_POINTS} positive Schmidt values, got {spectrum.shape[0]}")
    alpha = np.arange(1, spectrum.shape[0] + 1, dtype=np.float64)
    design = np.column_stack([1.0 / np.sqrt(alpha), np.sqrt(alpha)])
    target = np.log2(spectrum)
    if np.linalg.matrix_rank(np.column_stack([np.ones_like(alpha), design])) < 3:
        raise FitError("design matrix is rank deficient")
    model = LinearRegression().fit(design, target)
    residual = float(np.sqrt(mean_squared_error(target, model.predict(design))))
    return FitResult(
        b=float(model.intercept_),
        c=float(model.coef_[0]),
        d=float(model.coef_[1]),
        residual=residual,
        points=int(spectrum.shape[0]),
    )


def load_spectrum_file(path: str | Path) -> list[float]:
    """One coefficient per line; blank lines and '#' comments are skipped."""
    values: list[float] = []
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError as exc:
            raise ValueError(f"{path}:{number}: not a number: {line!r}") from exc
    return values


def spectrum_near(path: str | Path, s_point: float, cut: int | None = None) -> tuple[float, list[float]]:
    """Recorded spectrum whose s is closest to s_point, from a run's spectra JSON."""
    data = load_json(path)
    samples = data.get("samples", []) if isinstance(data, dict) else []
    if cut is not None:
        samples = [sample for sample in samples if sample.get("cut") == cut]
    if not samples:
        raise ValueError(f"{path}: no recorded spectra" + (f" at cut {cut}" if cut is not None else ""))
    best = min(samples, key=lambda sample: abs(float(sample["s"]) - s_point))
    return float(best["s"]), [float(v) for v in best["values"]]
