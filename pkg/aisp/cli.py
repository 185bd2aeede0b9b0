"""
Command-line interface using Typer.

Commands:
- pick: Mask -> picking point (maximum clearance pixel)
- locate: Picking point + depth map + calibration -> base-frame point
- plan: Base-frame point -> grasp waypoints + quintic schedule
- eval: Annotations + predictions -> mAP report (optionally per occlusion level)
- harvest-report: Harvest counts -> success table
- correlate: Paired samples -> R^2
- augment: Annotated images -> original + augmented variants
- synth: Synthetic occluded scenes with exact ground truth
- nn-check: Gradient, shape and loss-law checks for a model variant
- version: Print the package version
"""

import functools
import inspect
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence, Tuple

import click
import numpy as np
import typer
from loguru import logger
from rich.console import Console
from rich.table import Table

from . import __version__
from .errors import AispError, ParameterError
from .geometry.camera import Point3, back_project, sample_depth
from .geometry.planning import cartesian_schedule, grasp_plan
from .geometry.transforms import to_base
from .io.calibration import load_calibration
from .io.pgm import load_depth, load_mask, read_pgm, save_mask, write_pgm
from .io.reader import read_harvest_log, read_pairs
from .io.writer import dumps_json, write_json
from .masks.picking import mask_centroid, picking_point
from .metrics.correlation import fit_line
from .metrics.harvest import HarvestCount, HarvestLog, compare_harvest, harvest_success
from .metrics.occlusion import OcclusionLevel
from .metrics.report import evaluate, evaluate_by_occlusion
from .utils.config import AispConfig, load_config
from .utils.logging import setup_logging

app = typer.Typer(
    name="aisp",
    help="AISP - amodal segmentation picking toolkit",
    add_completion=False,
)
console = Console()

EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2


@dataclass
class CommandOutcome:
    """Exit code, machine-readable result and a one-line human summary."""

    exit_code: int
    result: Any = field(default_factory=dict)
    summary: str = ""

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK


def _setup(config_file: Optional[Path], log_level: Optional[str]) -> AispConfig:
    cfg = load_config(config_file)
    setup_logging(cfg.paths.log_file, log_level, cfg.logging)
    return cfg


def _emit(outcome: CommandOutcome, as_json: bool, output: Optional[Path]) -> CommandOutcome:
    if output is not None:
        write_json(output, outcome.result)
    if as_json:
        typer.echo(dumps_json(outcome.result).decode("utf-8"))
    elif outcome.summary:
        console.print(outcome.summary)
    return outcome


def domain_command(func: Callable[..., CommandOutcome]) -> Callable[..., CommandOutcome]:
    """
    Run a command body and turn domain failures into exit code 1.

    The wrapped function receives the common options and returns a
    CommandOutcome; output is written here so a failing command never leaves
    a partial result file. A command that declares a ``cfg`` parameter gets
    the config loaded once by the wrapper; Typer never sees that parameter.
    """
    signature = inspect.signature(func)
    wants_cfg = "cfg" in signature.parameters

    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> CommandOutcome:
        as_json = kwargs.get("as_json", False)
        output = kwargs.get("output")
        try:
            cfg = _setup(kwargs.get("config_file"), kwargs.get("log_level"))
            if wants_cfg:
                kwargs["cfg"] = cfg
            outcome = func(*args, **kwargs)
        except (AispError, ValueError, FileNotFoundError) as e:
            logger.error(f"{type(e).__name__}: {e}")
            outcome = CommandOutcome(
                EXIT_DOMAIN_ERROR, {"error": type(e).__name__, "message": str(e)}, f"[red]✗ {e}[/red]"
            )
            if as_json:
                typer.echo(dumps_json(outcome.result).decode("utf-8"))
            else:
                console.print(outcome.summary)
            return outcome
        return _emit(outcome, as_json, output)

    wrapper.__signature__ = signature.replace(  # type: ignore[attr-defined]
        parameters=[p for name, p in signature.parameters.items() if name != "cfg"]
    )
    return wrapper


def _floats(text: str, name: str) -> List[float]:
    try:
        return [float(tok) for tok in text.replace(",", " ").split()]
    except ValueError as e:
        raise ParameterError(f"--{name} must be a comma-separated list of numbers: {e}") from e


def _ints(text: str, name: str) -> List[int]:
    values = _floats(text, name)
    if any(v != int(v) for v in values):
        raise ParameterError(f"--{name} must hold integers")
    return [int(v) for v in values]


# Common options
JSON_OPT = typer.Option(False, "--json", help="Print the result as one JSON document")
CONFIG_OPT = typer.Option(None, "--config", "-c", help="Config file path")
LOG_LEVEL_OPT = typer.Option(None, "--log-level", help="Log level (DEBUG, INFO, WARNING, ...)")
OUTPUT_OPT = typer.Option(None, "--output", "-o", help="Also write the JSON result to this file")
SEED_OPT = typer.Option(0, "--seed", help="Random seed")


@app.command()
@domain_command
def pick(
    mask_path: Path = typer.Option(..., "--mask", "-m", help="Binary mask (PGM)"),
    border_policy: Optional[str] = typer.Option(None, "--border-policy", help="border-is-background | border-is-neutral"),
    centroid: bool = typer.Option(False, "--centroid", help="Also report the moment centroid"),
    as_json: bool = JSON_OPT,
    config_file: Optional[Path] = CONFIG_OPT,
    log_level: Optional[str] = LOG_LEVEL_OPT,
    output: Optional[Path] = OUTPUT_OPT,
    cfg: AispConfig = AispConfig(),
) -> CommandOutcome:
    """
    Compute the picking point of a mask.
    """
    policy = border_policy or cfg.masks.border_policy
    mask = load_mask(mask_path)
    point = picking_point(mask, policy)
    result = point.as_dict()
    summary = f"[green]✓[/green] Picking point ({point.x}, {point.y}), clearance {point.clearance:.3f} px"
    if centroid:
        cx, cy = mask_centroid(mask)
        result["centroid"] = {"x": cx, "y": cy}
        summary += f"\n  centroid ({cx:.2f}, {cy:.2f})"
    return CommandOutcome(EXIT_OK, result, summary)


@app.command()
@domain_command
def locate(
    calibration_path: Path = typer.Option(..., "--calibration", help="Calibration file"),
    depth_path: Path = typer.Option(..., "--depth", help="16-bit depth map (PGM)"),
    mask_path: Optional[Path] = typer.Option(None, "--mask", "-m", help="Mask to pick from"),
    x: Optional[int] = typer.Option(None, "--x", help="Pixel column (instead of --mask)"),
    y: Optional[int] = typer.Option(None, "--y", help="Pixel row (instead of --mask)"),
    as_json: bool = JSON_OPT,
    config_file: Optional[Path] = CONFIG_OPT,
    log_level: Optional[str] = LOG_LEVEL_OPT,
    output: Optional[Path] = OUTPUT_OPT,
    cfg: AispConfig = AispConfig(),
) -> CommandOutcome:
    """
    Lift a picking point to the robot base frame.
    """
    if mask_path is not None:
        point = picking_point(load_mask(mask_path), cfg.masks.border_policy)
        x, y = point.x, point.y
    elif x is None or y is None:
        raise ParameterError("Give either --mask or both --x and --y")

    calibration = load_calibration(calibration_path)
    depth = sample_depth(load_depth(depth_path, cfg.geometry.depth_scale), x, y, cfg.geometry.depth_window)
    p_cam = back_project(x, y, depth.depth, calibration.intrinsics)
    p_base = to_base(p_cam, calibration.hand_eye, calibration.ee_to_base)
    result = {
        "pixel": {"x": x, "y": y},
        "depth": depth.depth,
        "depth_fallback": depth.fallback,
        "camera": p_cam.as_dict(),
        "base": p_base.as_dict(),
    }
    summary = (
        f"[green]✓[/green] Pixel ({x}, {y}) at {depth.depth:.4f} m"
        f"{' (window median)' if depth.fallback else ''} -> base "
        f"({p_base.x:.4f}, {p_base.y:.4f}, {p_base.z:.4f})"
    )
    return CommandOutcome(EXIT_OK, result, summary)


@app.command()
@domain_command
def plan(
    target: Tuple[float, float, float] = typer.Option(..., "--target", help="Base-frame target X Y Z (metres)"),
    home: Optional[Tuple[float, float, float]] = typer.Option(None, "--home", help="Start position X Y Z"),
    safety_margin: Optional[float] = typer.Option(None, "--safety-margin", help="Pre-grasp offset (metres)"),
    duration: Optional[float] = typer.Option(None, "--duration", help="Seconds per segment"),
    samples: Optional[int] = typer.Option(None, "--samples", help="Samples per segment"),
    as_json: bool = JSON_OPT,
    config_file: Optional[Path] = CONFIG_OPT,
    log_level: Optional[str] = LOG_LEVEL_OPT,
    output: Optional[Path] = OUTPUT_OPT,
    cfg: AispConfig = AispConfig(),
) -> CommandOutcome:
    """
    Plan pre-grasp and grasp waypoints with quintic timing.
    """
    geo = cfg.geometry
    duration = duration if duration is not None else geo.segment_duration
    samples = samples if samples is not None else geo.segment_samples
    grasp = grasp_plan(
        Point3(*target, frame="base"),
        geo.orientation,
        safety_margin if safety_margin is not None else geo.safety_margin,
        geo.enclose_offset,
    )
    segments = {}
    if home is not None:
        segments["home_to_pre_grasp"] = cartesian_schedule(
            Point3(*home, frame="base"), grasp.pre_grasp.position, duration, samples
        )
    segments["pre_grasp_to_grasp"] = cartesian_schedule(
        grasp.pre_grasp.position, grasp.grasp.position, duration, samples
    )
    result = {
        "plan": grasp.as_dict(),
        "schedule": {name: [w.as_dict() for w in wps] for name, wps in segments.items()},
    }
    pre, g = grasp.pre_grasp.position, grasp.grasp.position
    summary = (
        f"[green]✓[/green] pre-grasp ({pre.x:.4f}, {pre.y:.4f}, {pre.z:.4f})  "
        f"grasp ({g.x:.4f}, {g.y:.4f}, {g.z:.4f})  {len(segments)} segment(s) of {samples} samples"
    )
    return CommandOutcome(EXIT_OK, result, summary)


@app.command("eval")
@domain_command
def eval_(
    annotations_path: Path = typer.Option(..., "--annotations", "-a", help="Ground-truth annotation JSON"),
    predictions_path: Path = typer.Option(..., "--predictions", "-p", help="Prediction JSON"),
    thresholds: Optional[str] = typer.Option(None, "--thresholds", help="IoU thresholds, comma-separated"),
    workers: int = typer.Option(1, "--workers", "-w", help="Processes for per-image matching"),
    by_occlusion: bool = typer.Option(False, "--by-occlusion", help="Add a per-occlusion-level breakdown"),
    curve: bool = typer.Option(False, "--curve", help="Include the PR curve in the JSON result"),
    as_json: bool = JSON_OPT,
    config_file: Optional[Path] = CONFIG_OPT,
    log_level: Optional[str] = LOG_LEVEL_OPT,
    output: Optional[Path] = OUTPUT_OPT,
    cfg: AispConfig = AispConfig(),
) -> CommandOutcome:
    """
    Score predicted masks against amodal ground truth.
    """
    from .dataset.annotations import parse_annotations, parse_predictions, to_ground_truth

    ev = cfg.evaluation
    thr = _floats(thresholds, "thresholds") if thresholds else ev.iou_thresholds
    if workers < 1:
        raise ParameterError(f"--workers must be >= 1, got {workers}")

    annotations = parse_annotations(annotations_path)
    gts = to_ground_truth(annotations)
    dets = parse_predictions(predictions_path, annotations)
    if by_occlusion:
        report = evaluate_by_occlusion(dets, gts, thr, workers, ev.recall_points)
    else:
        report = evaluate(dets, gts, thr, workers, ev.recall_points, progress=not as_json)
    return CommandOutcome(EXIT_OK, report.as_dict(include_curve=curve), report.render_text())


def _harvest_table(reports) -> Table:
    table = Table(title="Harvest success")
    table.add_column("Model")
    for level in OcclusionLevel:
        table.add_column(f"{level.short} (%)", justify="right")
    table.add_column("Overall (%)", justify="right")
    for r in reports:
        cells = [r.per_level[lv].percent if lv in r.per_level else "-" for lv in OcclusionLevel]
        table.add_row(r.model, *cells, r.overall.percent)
    return table


@app.command("harvest-report")
@domain_command
def harvest_report(
    log_path: Optional[Path] = typer.Option(None, "--log", "-l", help="Harvest log CSV"),
    picked: Optional[str] = typer.Option(None, "--picked", help="Picked counts zero,low,medium,high"),
    total: Optional[str] = typer.Option(None, "--total", help="Presented count(s), one or four values"),
    model: str = typer.Option("model", "--model", help="Model name for --picked/--total"),
    compare: bool = typer.Option(False, "--compare", help="Percentage-point deltas of every model vs the first"),
    as_json: bool = JSON_OPT,
    config_file: Optional[Path] = CONFIG_OPT,
    log_level: Optional[str] = LOG_LEVEL_OPT,
    output: Optional[Path] = OUTPUT_OPT,
) -> CommandOutcome:
    """
    Harvest success per occlusion level.
    """
    if log_path is not None:
        logs = read_harvest_log(log_path)
    elif picked is not None and total is not None:
        counts = _ints(picked, "picked")
        totals = _ints(total, "total")
        if len(totals) == 1:
            totals = totals * len(counts)
        if len(counts) != len(OcclusionLevel) or len(totals) != len(counts):
            raise ParameterError("--picked and --total need one value per level (zero, low, medium, high)")
        logs = [HarvestLog(model, {lv: HarvestCount(p, n) for lv, p, n in zip(OcclusionLevel, counts, totals)})]
    else:
        raise ParameterError("Give --log or both --picked and --total")

    reports = [harvest_success(log) for log in logs]
    result = {"models": [r.as_dict() for r in reports]}
    if compare and len(reports) > 1:
        base = reports[0]
        result["compare"] = {
            r.model: {lv.label: float(d) for lv, d in compare_harvest(base, r).items()} for r in reports[1:]
        }
    if not as_json:
        console.print(_harvest_table(reports))
    return CommandOutcome(EXIT_OK, result, "")


@app.command()
@domain_command
def correlate(
    pairs_path: Path = typer.Option(..., "--pairs", help="JSON with paired samples"),
    as_json: bool = JSON_OPT,
    config_file: Optional[Path] = CONFIG_OPT,
    log_level: Optional[str] = LOG_LEVEL_OPT,
    output: Optional[Path] = OUTPUT_OPT,
) -> CommandOutcome:
    """
    Coefficient of determination between two series.
    """
    x, y = read_pairs(pairs_path)
    fit = fit_line(x, y)
    summary = f"[green]✓[/green] R² = {fit.r2:.4f}  (y = {fit.slope:.4f} x + {fit.intercept:.4f}, n = {fit.n})"
    return CommandOutcome(EXIT_OK, fit.as_dict(), summary)


@app.command()
@domain_command
def augment(
    annotations_path: Path = typer.Option(..., "--annotations", "-a", help="Annotation JSON"),
    output_dir: Path = typer.Option(..., "--output-dir", help="Directory for augmented set"),
    variants: Optional[int] = typer.Option(None, "--variants", help="Variants per image"),
    seed: int = SEED_OPT,
    as_json: bool = JSON_OPT,
    config_file: Optional[Path] = CONFIG_OPT,
    log_level: Optional[str] = LOG_LEVEL_OPT,
    output: Optional[Path] = OUTPUT_OPT,
    cfg: AispConfig = AispConfig(),
) -> CommandOutcome:
    """
    Write the original images plus augmented variants.
    """
    from .dataset.annotations import AnnotationSet, parse_annotations, write_annotations
    from .dataset.augment import AugmentEntry, AugmentPolicy, augment_all

    aug_cfg = cfg.dataset.augment
    settings = {**aug_cfg.model_dump(), "seed": seed}
    if variants is not None:
        settings["variants_per_image"] = variants
    policy = AugmentPolicy(**settings)

    annotations = parse_annotations(annotations_path)
    base_dir = annotations_path.parent
    entries = []
    for img in annotations.images:
        pixels = read_pgm(base_dir / img.file) if img.file else None
        if pixels is not None and pixels.dtype != np.uint8:
            raise ParameterError(f"{img.file}: augmentation expects 8-bit images")
        entries.append(AugmentEntry(img, annotations.instances_of(img.id), pixels))

    out_entries = augment_all(entries, policy, progress=not as_json)
    for entry in out_entries:
        if entry.image is not None:
            write_pgm(output_dir / entry.record.file, entry.image, maxval=255)
    out_set = AnnotationSet(
        images=[e.record for e in out_entries],
        instances=[inst for e in out_entries for inst in e.instances],
    )
    out_path = output_dir / "annotations.json"
    write_annotations(out_set, out_path)
    result = {
        "images": len(out_set.images),
        "instances": len(out_set.instances),
        "annotations": str(out_path),
    }
    summary = f"[green]✓[/green] {len(entries)} image(s) -> {len(out_entries)} entries in {output_dir}"
    return CommandOutcome(EXIT_OK, result, summary)


@app.command()
@domain_command
def synth(
    output_dir: Path = typer.Option(..., "--output-dir", help="Directory for scenes"),
    targets: str = typer.Option("0,0.10,0.35,0.60", "--targets", help="Target occlusion ratios"),
    scenes: int = typer.Option(1, "--scenes", help="Number of scenes"),
    seed: int = SEED_OPT,
    as_json: bool = JSON_OPT,
    config_file: Optional[Path] = CONFIG_OPT,
    log_level: Optional[str] = LOG_LEVEL_OPT,
    output: Optional[Path] = OUTPUT_OPT,
    cfg: AispConfig = AispConfig(),
) -> CommandOutcome:
    """
    Generate synthetic occluded scenes with exact ground truth.
    """
    from .dataset.annotations import write_annotations
    from .dataset.synth import SynthParams, render_scene_image, synth_scene, to_annotations

    if scenes < 1:
        raise ParameterError(f"--scenes must be >= 1, got {scenes}")
    synth_cfg = cfg.dataset.synth
    params = SynthParams(**synth_cfg.model_dump(), targets=tuple(_floats(targets, "targets")))

    generated = [synth_scene(params, seed + i) for i in range(scenes)]
    annotations = to_annotations(generated)
    for scene, image in zip(generated, annotations.images):
        write_pgm(output_dir / image.file, render_scene_image(scene), maxval=255)
        for k, fruit in enumerate(scene.fruits):
            save_mask(output_dir / "masks" / f"{image.id}_{k}_amodal.pgm", fruit.amodal)
            save_mask(output_dir / "masks" / f"{image.id}_{k}_visible.pgm", fruit.visible)
    write_annotations(annotations, output_dir / "annotations.json")

    result = {"scenes": [s.as_dict() for s in generated], "annotations": str(output_dir / "annotations.json")}
    levels = ", ".join(f.level.label for f in generated[0].fruits)
    summary = f"[green]✓[/green] {scenes} scene(s) in {output_dir}; levels of the first: {levels}"
    return CommandOutcome(EXIT_OK, result, summary)


@app.command("nn-check")
@domain_command
def nn_check(
    variant: str = typer.Option("G-D-A", "--variant", help="Model variant (B, G-v1, ..., G-D-A)"),
    category: Optional[str] = typer.Option(None, "--category", help="Only run gradient, shape or law checks"),
    seed: int = SEED_OPT,
    as_json: bool = JSON_OPT,
    config_file: Optional[Path] = CONFIG_OPT,
    log_level: Optional[str] = LOG_LEVEL_OPT,
    output: Optional[Path] = OUTPUT_OPT,
    cfg: AispConfig = AispConfig(),
) -> CommandOutcome:
    """
    Run the gradient, shape and loss-law checks; exit 1 if any fails.
    """
    from .nn.checks import build_registry
    from .nn.variants import get_variant

    nn_cfg = cfg.nn
    registry = build_registry(get_variant(variant), nn_cfg, seed)
    results = registry.run_all(category)
    failed = [r.name for r in results if not r.passed]

    if not as_json:
        table = Table(title=f"Checks for {variant}")
        table.add_column("Check")
        table.add_column("Result")
        table.add_column("Seconds", justify="right")
        for r in results:
            table.add_row(r.name, "[green]pass[/green]" if r.passed else "[red]FAIL[/red]", f"{r.seconds:.2f}")
        console.print(table)

    result = {"variant": variant, "passed": not failed, "checks": [r.as_dict() for r in results]}
    summary = f"[red]✗ {len(failed)} check(s) failed[/red]" if failed else f"[green]✓[/green] {len(results)} checks passed"
    return CommandOutcome(EXIT_DOMAIN_ERROR if failed else EXIT_OK, result, summary)


@app.command()
def version() -> CommandOutcome:
    """Show version information."""
    console.print(f"AISP v{__version__}")
    return CommandOutcome(EXIT_OK, {"version": __version__}, "")


def dispatch(argv: Sequence[str]) -> CommandOutcome:
    """
    Run exactly one subcommand and return its outcome instead of exiting.

    Usage errors (unknown command or flag, bad value) map to exit code 2.
    """
    command = typer.main.get_command(app)
    try:
        rv = command.main(args=list(argv), prog_name="aisp", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return CommandOutcome(EXIT_USAGE_ERROR, {"error": "UsageError", "message": e.format_message()})
    except click.ClickException as e:
        e.show()
        return CommandOutcome(EXIT_USAGE_ERROR, {"error": type(e).__name__, "message": e.format_message()})
    except click.Abort:
        return CommandOutcome(EXIT_DOMAIN_ERROR, {"error": "Aborted"})
    if isinstance(rv, CommandOutcome):
        return rv
    # --help and bare groups return an int exit code (or None)
    return CommandOutcome(int(rv or 0))


def main() -> None:
    outcome = dispatch(sys.argv[1:])
    raise SystemExit(outcome.exit_code)


if __name__ == "__main__":
    main()
