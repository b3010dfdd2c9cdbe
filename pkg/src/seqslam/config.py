"""Pipeline configuration: flat `section.key = value` files.

The format is deliberately diff-friendly: one key per line, `#` comments,
UTF-8. Unknown keys are hard errors, and all violations in a file are
reported together with their line numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .matching import SELECTION_METHODS, SelectionConfig
from .preprocess import CropRect, PreprocessConfig
from .search import SEARCH_METHODS, SearchConfig

SWEEP_AXES = (
    "norm_width",
    "seq_length",
    "search_method_threshold",
    "selection_method_threshold",
)


@dataclass(frozen=True)
class DatasetConfig:
    reference_dir: str
    query_dir: str
    reference_pattern: str = "*"
    query_pattern: str = "*"
    reference_step: int = 1
    query_step: int = 1
    ground_truth: str | None = None


@dataclass(frozen=True)
class EvaluationConfig:
    recall_denominator: str = "eligible"  # or "all": count truthless queries against recall


@dataclass(frozen=True)
class SweepConfig:
    axis: str
    values: tuple[float, ...]
    target: str = "f1"


@dataclass(frozen=True)
class PipelineConfig:
    dataset: DatasetConfig
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    r_norm: int = 10
    search: SearchConfig = field(default_factory=SearchConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    evaluation: EvaluationConfig = field(default_factory=EvaluationConfig)
    sweep: SweepConfig | None = None
    output_dir: str = "out"


class ConfigError(ValueError):
    """One or more config violations; str() lists them all."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_float(text: str) -> float:
    return float(text)


def _parse_float_list(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


def _parse_str(text: str) -> str:
    return text


_SCHEMA: dict[str, tuple] = {
    # key: (parser, validator or None, message)
    "dataset.reference_dir": (_parse_str, None, ""),
    "dataset.query_dir": (_parse_str, None, ""),
    "dataset.reference_pattern": (_parse_str, None, ""),
    "dataset.query_pattern": (_parse_str, None, ""),
    "dataset.reference_step": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "dataset.query_step": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "dataset.ground_truth": (_parse_str, None, ""),
    "preprocess.crop_left": (_parse_int, lambda v: v >= 0, "must be >= 0"),
    "preprocess.crop_top": (_parse_int, lambda v: v >= 0, "must be >= 0"),
    "preprocess.crop_right": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "preprocess.crop_bottom": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "preprocess.target_width": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "preprocess.target_height": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "preprocess.patch_size": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "enhance.r_norm": (_parse_int, lambda v: v >= 2, "minimum 2"),
    "search.method": (_parse_str, lambda v: v in SEARCH_METHODS, f"must be one of {SEARCH_METHODS}"),
    "search.d_s": (_parse_int, lambda v: v >= 2, "must be >= 2"),
    "search.v_min": (_parse_float, lambda v: v > 0, "must be > 0"),
    "search.v_max": (_parse_float, lambda v: v > 0, "must be > 0"),
    "search.v_step": (_parse_float, lambda v: v > 0, "must be > 0"),
    "selection.method": (
        _parse_str,
        lambda v: v in SELECTION_METHODS,
        f"must be one of {SELECTION_METHODS}",
    ),
    "selection.lambda": (_parse_float, None, ""),
    "selection.mu": (_parse_float, lambda v: v >= 1, "must be >= 1"),
    "selection.r_window": (_parse_int, lambda v: v >= 1, "must be >= 1"),
    "evaluation.recall_denominator": (
        _parse_str,
        lambda v: v in ("eligible", "all"),
        "must be 'eligible' or 'all'",
    ),
    "sweep.axis": (_parse_str, lambda v: v in SWEEP_AXES, f"must be one of {SWEEP_AXES}"),
    "sweep.values": (_parse_float_list, None, ""),
    "sweep.start": (_parse_float, None, ""),
    "sweep.stop": (_parse_float, None, ""),
    "sweep.step": (_parse_float, lambda v: v > 0, "must be > 0"),
    "sweep.target": (
        _parse_str,
        lambda v: v in ("precision", "recall", "f1"),
        "must be precision, recall, or f1",
    ),
    "output.dir": (_parse_str, None, ""),
}

_CROP_KEYS = (
    "preprocess.crop_left",
    "preprocess.crop_top",
    "preprocess.crop_right",
    "preprocess.crop_bottom",
)


def _read_entries(path: str | Path, errors: list[str]) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'section.key = value'")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in entries:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        entries[key] = (value, lineno)
    return entries


def parse_config(path: str | Path) -> PipelineConfig:
    """Parse and validate a pipeline config file; raises ConfigError listing
    every violation with its key and line number."""
    errors: list[str] = []
    entries = _read_entries(path, errors)

    parsed: dict[str, object] = {}
    for key, (text, lineno) in entries.items():
        parser, validator, message = _SCHEMA[key]
        try:
            value = parser(text)
        except ValueError:
            errors.append(f"line {lineno}: {key}: cannot parse {text!r}")
            continue
        if validator is not None and not validator(value):
            errors.append(f"line {lineno}: {key}: {message}")
            continue
        parsed[key] = value

    def get(key: str, default=None):
        return parsed.get(key, default)

    for required in ("dataset.reference_dir", "dataset.query_dir"):
        if required not in entries:
            errors.append(f"{required} is required")

    crop_present = [k for k in _CROP_KEYS if k in parsed]
    crop = None
    if crop_present and len(crop_present) != len(_CROP_KEYS):
        missing = sorted(set(_CROP_KEYS) - set(crop_present))
        errors.append(f"crop needs all four bounds; missing {', '.join(missing)}")
    elif crop_present:
        crop = CropRect(
            left=parsed["preprocess.crop_left"],
            top=parsed["preprocess.crop_top"],
            right=parsed["preprocess.crop_right"],
            bottom=parsed["preprocess.crop_bottom"],
        )
        if crop.left >= crop.right or crop.top >= crop.bottom:
            errors.append("crop rectangle is empty (left >= right or top >= bottom)")
            crop = None

    v_min = get("search.v_min", 0.8)
    v_max = get("search.v_max", 1.2)
    if v_min is not None and v_max is not None and v_min > v_max:
        errors.append("search: v_min > v_max")

    sweep = None
    sweep_keys = [k for k in parsed if k.startswith("sweep.")]
    if sweep_keys:
        if "sweep.axis" not in parsed:
            errors.append("sweep.axis is required when sweep.* keys are present")
        has_values = "sweep.values" in parsed
        has_range = all(f"sweep.{k}" in parsed for k in ("start", "stop", "step"))
        some_range = any(f"sweep.{k}" in parsed for k in ("start", "stop", "step"))
        if has_values and some_range:
            errors.append("give either sweep.values or sweep.start/stop/step, not both")
        elif has_values:
            values = parsed["sweep.values"]
        elif has_range:
            start, stop, step = (parsed[f"sweep.{k}"] for k in ("start", "stop", "step"))
            if stop < start:
                errors.append("sweep.stop < sweep.start")
                values = ()
            else:
                count = int((stop - start) / step + 1e-9) + 1
                values = tuple(start + i * step for i in range(count))
        elif some_range:
            errors.append("sweep range needs all of sweep.start, sweep.stop, sweep.step")
            values = ()
        else:
            errors.append("sweep needs sweep.values or sweep.start/stop/step")
            values = ()
        if not errors and "sweep.axis" in parsed:
            sweep = SweepConfig(
                axis=parsed["sweep.axis"], values=values, target=get("sweep.target", "f1")
            )

    if errors:
        raise ConfigError(errors)

    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # pixel-budget warning surfaces at run time
        preprocess = PreprocessConfig(
            target_width=get("preprocess.target_width", 64),
            target_height=get("preprocess.target_height", 32),
            patch_size=get("preprocess.patch_size", 8),
            crop=crop,
        )

    try:
        search = SearchConfig(
            method=get("search.method", "trajectory"),
            d_s=get("search.d_s", 10),
            v_min=v_min,
            v_max=v_max,
            v_step=get("search.v_step", 0.1),
        )
        selection = SelectionConfig(
            method=get("selection.method", "score_threshold"),
            lam=get("selection.lambda", 0.0),
            mu=get("selection.mu", 1.0),
            r_window=get("selection.r_window", 10),
        )
    except ValueError as err:
        raise ConfigError([str(err)]) from err

    return PipelineConfig(
        dataset=DatasetConfig(
            reference_dir=parsed["dataset.reference_dir"],
            query_dir=parsed["dataset.query_dir"],
            reference_pattern=get("dataset.reference_pattern", "*"),
            query_pattern=get("dataset.query_pattern", "*"),
            reference_step=get("dataset.reference_step", 1),
            query_step=get("dataset.query_step", 1),
            ground_truth=get("dataset.ground_truth"),
        ),
        preprocess=preprocess,
        r_norm=get("enhance.r_norm", 10),
        search=search,
        selection=selection,
        evaluation=EvaluationConfig(
            recall_denominator=get("evaluation.recall_denominator", "eligible")
        ),
        sweep=sweep,
        output_dir=get("output.dir", "out"),
    )


def config_to_dict(cfg: PipelineConfig) -> dict:
    """Plain-dict snapshot for provenance sidecars."""
    from dataclasses import asdict

    return asdict(cfg)


def with_output_dir(cfg: PipelineConfig, out: str | None) -> PipelineConfig:
    return cfg if out is None else replace(cfg, output_dir=out)
