"""Gate counts and the reconstructed circuit-depth metric."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class EpisodeOutcome:
    lam: int
    L: int
    n_g: int
    success: bool
    final_fidelity: float

    @property
    def reconstructed_depth(self) -> float:
        return reconstructed_depth(self.n_g, self.lam)


def gates_used(L: int, steps_taken: int, success: bool) -> int:
    """Gates counted for an episode: the steps taken, or ``L`` when truncated."""
    if not 0 <= steps_taken <= L:
        raise ValueError(f"steps_taken={steps_taken} outside [0, {L}]")
    return steps_taken if success else L


def reconstructed_depth(n_g: int, lam: int) -> float:
    """Gate count relative to the generator depth, in percent."""
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    return n_g / lam * 100.0


def trailing_mean(outcomes: Sequence[EpisodeOutcome | float], window: int = 100) -> tuple[float, float]:
    """Mean and population std of the reconstructed depth over the last ``window`` episodes.

    Entries may be outcomes or precomputed percentages.
    """
    if window < 1:
        raise ValueError(f"window must be positive, got {window}")
    if len(outcomes) < window:
        raise ValueError(f"need at least {window} episodes, have {len(outcomes)}")
    vals = np.array(
        [o.reconstructed_depth if isinstance(o, EpisodeOutcome) else float(o) for o in outcomes[-window:]]
    )
    return float(vals.mean()), float(vals.std())


def metric_summary(outcomes: Sequence[EpisodeOutcome], window: int = 100) -> dict:
    mean, std = trailing_mean(outcomes, window)
    return {"trailing_lambda_mean": mean, "trailing_lambda_std": std, "window": window}
