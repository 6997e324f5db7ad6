"""Constructed delta series for the detector, plus a brute-force reference."""

from __future__ import annotations

import math
import statistics

import numpy as np

NOISE_STD = 1 / math.sqrt(3)  # std of uniform[-1, 1]
SPIKE_POSITIONS = (200, 350, 500, 650, 800)


def spike_series(seed: int = 7, n: int = 1000) -> list[float]:
    """Bounded noise with spikes of eight noise standard deviations.

    Noise never exceeds 1 in magnitude, so without spikes no |z| can reach
    3; each spike stays above z = 6 even with the earlier spikes inflating
    the window.
    """
    rng = np.random.default_rng(seed)
    deltas = rng.uniform(-1, 1, n)
    for p in SPIKE_POSITIONS:
        deltas[p] = 8 * NOISE_STD
    return deltas.tolist()


MEMORY_GIANT = 50
MEMORY_LATE = 900


def memory_series(seed: int = 11, n: int = 1000) -> list[float]:
    """A giant early spike that masks a moderate late one unless it has been forgotten."""
    rng = np.random.default_rng(seed)
    deltas = rng.uniform(-1, 1, n)
    deltas[MEMORY_GIANT] = 100.0
    deltas[MEMORY_LATE] = 4 * NOISE_STD
    return deltas.tolist()


def reference_detect(deltas, capacity: int, z_threshold: float = 3.0, min_samples: int = 30) -> list[int]:
    """Positions flagged when each window is taken as an explicit slice."""
    flagged = []
    for i, d in enumerate(deltas):
        window = deltas[max(0, i - capacity):i] if capacity > 0 else []
        if len(window) < min_samples:
            continue
        mu = statistics.fmean(window)
        sigma = statistics.pstdev(window)
        if len(set(window)) == 1:
            if d != window[0]:
                flagged.append(i)
        elif abs(d - mu) / sigma >= z_threshold:
            flagged.append(i)
    return flagged


def alternating(n_events: int) -> list[float]:
    """With a one-value window, every change of value is an event."""
    return [float(i % 2) for i in range(n_events + 1)]
