#!/usr/bin/env python3
"""Generate a synthetic traverse pair on disk, with ground truth and a ready
config, so the pipeline/explorer can be tried without a real dataset.

    python3 scripts/make_synthetic.py --out data/demo --frames 120
    seqslam run --config data/demo/pipeline.cfg
    seqslam serve --config data/demo/pipeline.cfg --port 8000
"""

import argparse
from pathlib import Path

import numpy as np

from seqslam.dataset import write_ground_truth
from seqslam.synthetic import (
    as_traverse,
    perturb_images,
    smooth_random_images,
    write_traverse_pgm,
)

CONFIG_TEMPLATE = """\
# synthetic demo pipeline
dataset.reference_dir = {root}/reference
dataset.query_dir = {root}/query
dataset.reference_pattern = *.pgm
dataset.query_pattern = *.pgm
dataset.ground_truth = {root}/ground_truth.csv

preprocess.target_width = {width}
preprocess.target_height = {height}
preprocess.patch_size = 8

enhance.r_norm = 10

search.method = trajectory
search.d_s = 10
search.v_min = 0.8
search.v_max = 1.2
search.v_step = 0.1

selection.method = score_threshold
selection.lambda = 0.0
selection.r_window = 10

output.dir = {root}/out
"""


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="dataset directory to create")
    parser.add_argument("--frames", type=int, default=120)
    parser.add_argument("--width", type=int, default=32)
    parser.add_argument("--height", type=int, default=16)
    parser.add_argument("--noise", type=float, default=30.0, help="query pixel noise sigma")
    parser.add_argument("--ramp", type=float, default=30.0, help="query brightness ramp amplitude")
    parser.add_argument("--tolerance", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    ref_imgs = smooth_random_images(
        args.frames, args.width, args.height, rng, components=48,
        max_time_cycles=6.0, max_space_cycles=6.0,
    )
    query_imgs = perturb_images(ref_imgs, rng, noise_sigma=args.noise, ramp_amplitude=args.ramp)

    root = Path(args.out)
    write_traverse_pgm(root / "reference", as_traverse(ref_imgs, "ref"))
    write_traverse_pgm(root / "query", as_traverse(query_imgs, "query"))
    write_ground_truth(
        root / "ground_truth.csv", args.tolerance, {q: q for q in range(args.frames)}
    )
    (root / "pipeline.cfg").write_text(
        CONFIG_TEMPLATE.format(root=root, width=args.width, height=args.height)
    )
    print(f"wrote {args.frames} frame pair + ground truth + config under {root}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
