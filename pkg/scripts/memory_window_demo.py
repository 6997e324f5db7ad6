"""Show how the detector's memory changes what counts as surprising.

A giant early change inflates the window's standard deviation for as long
as it stays in memory; a moderate late change is only flagged once the
giant one has been forgotten. Also sweeps the z threshold on the spike
fixture and prints audit sample sizes for each run.

    python3 scripts/memory_window_demo.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from codentropy.anomaly import DEFAULT_MEMORY_FRACTIONS, DetectorConfig, detect, summarize_runs  # noqa: E402
from detector_fixtures import memory_series, spike_series  # noqa: E402


def main() -> None:
    deltas = memory_series()
    print("memory fixture (giant change at 50, moderate change at 900)")
    for frac in (*DEFAULT_MEMORY_FRACTIONS, 0.25):
        cfg = DetectorConfig(memory_fraction=frac)
        events = detect(deltas, cfg)
        shown = ", ".join(f"{e.position} (z={e.z_score:.1f})" for e in events)
        print(f"  {cfg.label:<12} capacity={cfg.capacity(len(deltas)):<5} events: {shown}")

    print("\nspike fixture, z threshold sweep")
    spikes = spike_series()
    configs = [DetectorConfig(z_threshold=z) for z in (1.5, 2.0, 3.0, 5.0, 7.5)]
    for s in summarize_runs(configs, spikes):
        print(f"  |z| >= {s.config.z_threshold:<4g} events={s.events_detected:<4} audit sample={s.sample_size}")


if __name__ == "__main__":
    main()
