#!/usr/bin/env python3
"""Run all four sweep families against one dataset config and tabulate peaks.

    python3 scripts/make_synthetic.py --out data/demo --frames 120
    python3 scripts/run_sweeps.py --config data/demo/pipeline.cfg --out data/demo/sweeps
"""

import argparse
from pathlib import Path

from seqslam.config import parse_config
from seqslam.matrixio import write_text_atomic
from seqslam.pipeline import load_inputs
from seqslam.sweep import SweepSpec, run_sweep, sweep_to_csv


def sweep_values(axis: str, n: int):
    if axis == "norm_width":
        step = max(1, n // 12)
        return tuple(range(2, n + 1, step))
    if axis == "seq_length":
        return tuple(range(2, min(40, n // 2) + 1, 2))
    return tuple(i / 20 for i in range(21))  # threshold fraction of range


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default="sweeps")
    parser.add_argument("--workers", type=int, default=4)
    args = parser.parse_args()

    cfg = parse_config(args.config)
    ref, query, gt = load_inputs(cfg)
    if gt is None:
        parser.error("config must set dataset.ground_truth")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for axis in (
        "norm_width",
        "seq_length",
        "search_method_threshold",
        "selection_method_threshold",
    ):
        spec = SweepSpec(base=cfg, axis=axis, values=sweep_values(axis, len(ref)))
        result = run_sweep(spec, ref, query, gt, workers=args.workers)
        path = out / f"sweep_{axis}.csv"
        write_text_atomic(path, sweep_to_csv(result))
        by_method = {}
        for row in result.rows:
            peak = by_method.get(row.method)
            if peak is None or row.metrics.f1 > peak.metrics.f1:
                by_method[row.method] = row
        print(f"{axis}: wrote {path}")
        for method, row in sorted(by_method.items()):
            print(f"  peak f1 for {method}: {row.metrics.f1:.3f} at value {row.value}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
