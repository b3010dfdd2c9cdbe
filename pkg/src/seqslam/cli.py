"""Command-line entry point: run, sweep, optimize, serve, export-matrix."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from .config import PipelineConfig, config_to_dict, parse_config, with_output_dir
from .evaluation import optimize_threshold, pr_curve, pr_curve_to_csv, write_pr_curve_svg
from .matching import matchset_to_csv
from .matrixio import write_matrix, write_score_matrix, write_text_atomic
from .pipeline import run_pipeline
from .sweep import SweepSpec, run_sweep, sweep_to_csv

log = logging.getLogger("seqslam")


def _metrics_csv(metrics) -> str:
    header = "true_positives,false_positives,selected_count,eligible_count,precision,recall,f1"
    row = (
        f"{metrics.true_positives},{metrics.false_positives},{metrics.selected_count},"
        f"{metrics.eligible_count},{metrics.precision!r},{metrics.recall!r},{metrics.f1!r}"
    )
    return header + "\n" + row + "\n"


def _provenance(cfg: PipelineConfig, result) -> dict:
    prov = {
        "created": datetime.now(timezone.utc).isoformat(),
        "config": config_to_dict(cfg),
        "inputs": {
            "reference": result.ref_raw.fingerprint(),
            "query": result.query_raw.fingerprint(),
        },
    }
    if result.gt is not None:
        prov["inputs"]["ground_truth"] = result.gt.fingerprint()
    return prov


def _out_dir(cfg: PipelineConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    cfg = with_output_dir(parse_config(args.config), args.out)
    result = run_pipeline(cfg, workers=args.workers)
    out = _out_dir(cfg)
    write_text_atomic(out / "matches.csv", matchset_to_csv(result.matches))
    if result.metrics is not None:
        write_text_atomic(out / "metrics.csv", _metrics_csv(result.metrics))
        print(
            f"precision={result.metrics.precision!r} recall={result.metrics.recall!r} "
            f"f1={result.metrics.f1!r}"
        )
    write_text_atomic(
        out / "provenance.json", json.dumps(_provenance(cfg, result), indent=2) + "\n"
    )
    print(f"wrote {out / 'matches.csv'}")
    return 0


def cmd_optimize(args) -> int:
    cfg = with_output_dir(parse_config(args.config), args.out)
    result = run_pipeline(cfg, workers=args.workers)
    if result.gt is None:
        raise ValueError("optimize needs dataset.ground_truth in the config")
    threshold, metrics = optimize_threshold(
        result.proposals,
        result.scores,
        result.gt,
        cfg.selection,
        target=args.target,
        recall_denominator=cfg.evaluation.recall_denominator,
    )
    out = _out_dir(cfg)
    curve = pr_curve(
        result.proposals, result.scores, result.gt, cfg.selection,
        cfg.evaluation.recall_denominator,
    )
    write_text_atomic(out / "pr_curve.csv", pr_curve_to_csv(curve))
    write_pr_curve_svg(curve, out / "pr_curve.svg")
    print(
        f"threshold={threshold!r} precision={metrics.precision!r} "
        f"recall={metrics.recall!r} f1={metrics.f1!r}"
    )
    return 0


def cmd_sweep(args) -> int:
    cfg = with_output_dir(parse_config(args.config), args.out)
    if cfg.sweep is None:
        raise ValueError("config has no sweep section (sweep.axis is missing)")
    from .pipeline import load_inputs

    ref, query, gt = load_inputs(cfg)
    if gt is None:
        raise ValueError("sweep needs dataset.ground_truth in the config")
    spec = SweepSpec(
        base=cfg, axis=cfg.sweep.axis, values=cfg.sweep.values, optimize_target=cfg.sweep.target
    )
    result = run_sweep(spec, ref, query, gt, workers=args.workers)
    out = _out_dir(cfg)
    write_text_atomic(out / "sweep.csv", sweep_to_csv(result))
    write_text_atomic(
        out / "sweep_provenance.json", json.dumps(result.provenance, indent=2) + "\n"
    )
    print(f"wrote {out / 'sweep.csv'} ({len(result.rows)} rows)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_session, create_app

    cfg = with_output_dir(parse_config(args.config), args.out)
    session = build_session(cfg, workers=args.workers)
    app = create_app(session)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_export_matrix(args) -> int:
    cfg = with_output_dir(parse_config(args.config), args.out)
    result = run_pipeline(cfg, workers=args.workers)
    out = _out_dir(cfg)
    write_matrix(out / "difference.ssm1", result.diff.values)
    write_matrix(out / "enhanced.ssm1", result.enhanced.values)
    write_score_matrix(out / f"scores_{cfg.search.method}.ssm1", result.scores)
    print(f"wrote SSM1 matrices to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqslam",
        description="Sequence-based visual place recognition pipeline and explorer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="pipeline config file")
        p.add_argument("--workers", type=int, default=1, help="parallel worker count")
        p.add_argument("--out", default=None, help="output directory (overrides output.dir)")

    p_run = sub.add_parser("run", help="run the full pipeline, write matches + metrics")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the configured parameter sweep")
    common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_opt = sub.add_parser("optimize", help="auto-optimize the selection threshold")
    common(p_opt)
    p_opt.add_argument(
        "--target", choices=("precision", "recall", "f1"), default="f1",
        help="metric to maximize",
    )
    p_opt.set_defaults(func=cmd_optimize)

    p_serve = sub.add_parser("serve", help="start the explorer HTTP service")
    common(p_serve)
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.set_defaults(func=cmd_serve)

    p_export = sub.add_parser("export-matrix", help="write SSM1 matrix files")
    common(p_export)
    p_export.set_defaults(func=cmd_export_matrix)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("SEQSLAM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except Exception as err:  # single machine-parsable line on stderr
        detail = " ".join(str(err).split())
        print(f"error: {detail}", file=sys.stderr)
        log.debug("command failed", exc_info=err)
        return 1


if __name__ == "__main__":
    sys.exit(main())
