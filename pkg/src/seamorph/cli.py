"""Command-line surface: one thin subcommand per pipeline stage.

Exit codes: 0 success, 1 usage error, 2 runtime failure. All business logic
lives in the library modules; this layer only parses arguments, wires
configuration and prints results.
"""
from __future__ import annotations

import dataclasses
import json
import logging
import sys
from pathlib import Path

import click

from . import coco, manifest as manifest_mod, masks, pipeline as pipeline_mod
from .config import load_config
from .errors import SeamorphError
from .types import SeaState

logger = logging.getLogger(__name__)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def cli(verbose: bool):
    """Sea-state background editing and dataset curation pipeline."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_sources(annotations: Path, images: Path):
    sources = coco.load_source_dataset(annotations, images)
    if not sources:
        raise SeamorphError(f"no usable source images in {annotations}")
    return sources


@cli.command()
@click.option("--annotations", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--images", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--output", type=click.Path(path_type=Path), required=True)
@click.option("--dilation", type=int, default=0, show_default=True, help="Box dilation in pixels.")
def mask(annotations: Path, images: Path, output: Path, dilation: int):
    """Build object/editable masks for every annotated source image."""
    output.mkdir(parents=True, exist_ok=True)
    for src in _load_sources(annotations, images):
        m = masks.build_mask(src, dilation)
        masks.save_mask(m, masks.mask_path_for(src.id, output))
    click.echo(f"wrote masks to {output}")


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@click.option("--annotations", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--images", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--output", type=click.Path(path_type=Path), help="Overrides [pipeline] output_root.")
@click.option("--seed", type=int, help="Overrides [pipeline] seed.")
@click.option("--count", type=int, default=1, show_default=True, help="Images per source.")
def generate(config_path, annotations, images, output, seed, count):
    """Generate edited images only (no filtering), with full provenance."""
    from .backends import GenerationRequest, default_prompt_bank, select_prompt
    from .imaging import load_image, save_image

    cfg = load_config(config_path, {"output_root": output, "seed": seed, "images_per_source": count})
    backend = pipeline_mod.make_backend(cfg.backend)
    bank = default_prompt_bank()
    out_dir = Path(cfg.output_root) / "generated"
    out_dir.mkdir(parents=True, exist_ok=True)
    ledger = out_dir / "generations.jsonl"
    n = 0
    with open(ledger, "a", encoding="utf-8") as fh:
        for i, src in enumerate(_load_sources(annotations, images)):
            pixels = load_image(src.path)
            m = masks.build_mask(src, cfg.mask_dilation)
            for j in range(cfg.images_per_source):
                prompt = select_prompt(bank, cfg.backend.profile, j)
                request = GenerationRequest(
                    source=src,
                    source_pixels=pixels,
                    mask=m,
                    prompt=prompt,
                    seed=cfg.seed + i * cfg.images_per_source + j,
                    batch_size=1,
                )
                for edited in backend.generate(request):
                    save_image(edited.pixels, out_dir / f"{edited.id}.png")
                    fh.write(
                        json.dumps(
                            {
                                "edited_id": edited.id,
                                "source_id": edited.source_id,
                                "backend_name": edited.backend_name,
                                "prompt": edited.prompt,
                                "seed": edited.seed,
                            }
                        )
                        + "\n"
                    )
                    n += 1
    click.echo(f"generated {n} images under {out_dir}")


@cli.command()
@click.argument("image_files", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def classify(image_files, config_path, as_json):
    """Assign a sea-state level to each image file."""
    from .imaging import load_image
    from .seastate import ClassifierConfig, classify_sea_state

    if config_path:
        classifier_cfg = load_config(config_path, {"output_root": "."}).classifier
    else:
        classifier_cfg = ClassifierConfig()
    results = []
    for path in image_files:
        level, scores = classify_sea_state(load_image(path), classifier_cfg)
        results.append({"image": str(path), "sea_state": level.value, "scores": list(scores.scores)})
    if as_json:
        click.echo(json.dumps(results, indent=2))
    else:
        for r in results:
            click.echo(f"{r['image']}: SS{r['sea_state']}")


@cli.command()
@click.option("--annotations", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--images", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--edited", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--source-id", required=True, help="Id of the source the edited image derives from.")
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@click.option("--json", "as_json", is_flag=True)
def check(annotations, images, edited, source_id, config_path, as_json):
    """Run the preservation checker on one edited image."""
    from .imaging import load_image
    from .preservation import check_crop, extract_positive_crops
    from .types import EditedImage

    cfg = load_config(config_path, {"output_root": "."})
    sources = {s.id: s for s in _load_sources(annotations, images)}
    if source_id not in sources:
        raise SeamorphError(f"source id {source_id!r} not found in {annotations}")
    source = sources[source_id]
    source_pixels = load_image(source.path)
    image = EditedImage(
        id=Path(edited).stem,
        source_id=source_id,
        pixels=load_image(edited),
        backend_name="external",
        prompt="",
        seed=0,
    )
    crops = extract_positive_crops(image, source, source_pixels=source_pixels)
    verdicts = [check_crop(c, cfg.checker) for c in crops]
    kept = pipeline_mod.filter_decision(verdicts)
    if as_json:
        click.echo(
            json.dumps(
                {
                    "edited": str(edited),
                    "kept": kept,
                    "verdicts": [dataclasses.asdict(v) for v in verdicts],
                },
                indent=2,
            )
        )
    else:
        for v in verdicts:
            click.echo(f"box {v.box_index}: {v.verdict} (confidence {v.confidence:.3f})")
        click.echo(f"decision: {'keep' if kept else 'discard'}")


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path))
@click.option("--annotations", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--images", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--output", type=click.Path(path_type=Path), help="Overrides [pipeline] output_root.")
@click.option("--seed", type=int, help="Overrides [pipeline] seed.")
@click.option("--workers", type=int, help="Overrides [pipeline] workers.")
def run(config_path, annotations, images, output, seed, workers):
    """Run the full generate-classify-check pipeline."""
    cfg = load_config(
        config_path, {"output_root": output, "seed": seed, "workers": workers}
    )
    sources = _load_sources(annotations, images)
    manifest_path = pipeline_mod.run_pipeline(sources, cfg)
    stats = manifest_mod.compute_stats(manifest_path)
    click.echo(f"manifest: {manifest_path}")
    click.echo(
        f"records: {stats.total_generated}  kept: {stats.total_filtered}"
    )


@cli.command()
@click.option("--manifest", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def stats(manifest: Path, as_json: bool):
    """Per-sea-state generated/filtered counts plus the passing rate."""
    s = manifest_mod.compute_stats(manifest)
    rate = pipeline_mod.passing_rate(s) if s.total_generated else None
    if as_json:
        click.echo(json.dumps({**s.as_dict(), "passing_rate": rate}, indent=2))
        return
    header = f"{'':10}" + "".join(f"{f'SS{k}':>9}" for k in range(1, 5)) + f"{'total':>9}"
    click.echo(header)
    gen = s.generated_per_state
    filt = s.filtered_per_state
    click.echo(
        f"{'generated':10}"
        + "".join(f"{gen[st]:>9}" for st in SeaState)
        + f"{s.total_generated:>9}"
    )
    click.echo(
        f"{'filtered':10}"
        + "".join(f"{filt[st]:>9}" for st in SeaState)
        + f"{s.total_filtered:>9}"
    )
    if rate is not None:
        click.echo(f"passing rate: {rate:.2f}%")


@cli.command("train-seastate")
@click.option("--corpus", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--output", type=click.Path(path_type=Path), required=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--lr", type=float, default=1e-3, show_default=True)
@click.option("--batch-size", type=int, default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def train_seastate(corpus, output, epochs, lr, batch_size, seed):
    """Train the sea-state classifier on a labeled ss1/..ss4 corpus."""
    from .seastate import train_sea_state_classifier

    report = train_sea_state_classifier(
        corpus, output, epochs=epochs, lr=lr, batch_size=batch_size, seed=seed
    )
    click.echo(f"holdout accuracy: {report.holdout_accuracy:.4f}")
    click.echo(f"artifact: {report.artifact}")


@cli.command("train-checker")
@click.option("--positives", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--negatives", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--output", type=click.Path(path_type=Path), required=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--lr", type=float, default=1e-5, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--blur-positives", is_flag=True,
              help="Extend the corpus with blurred copies of every boat crop.")
def train_checker_cmd(positives, negatives, output, epochs, lr, batch_size, seed, blur_positives):
    """Train the boat/not_boat preservation checker."""
    from .preservation import train_checker

    report = train_checker(
        positives, negatives, output, epochs=epochs, lr=lr, batch_size=batch_size, seed=seed,
        blur_positives=blur_positives,
    )
    click.echo(f"holdout accuracy: {report.holdout_accuracy:.4f}")
    click.echo(f"artifact: {report.artifact}")


@cli.command("build-negatives")
@click.option("--annotations", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--images", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--manifest", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--images-root", type=click.Path(exists=True, path_type=Path), required=True,
              help="Pipeline output root holding SS*/ image files.")
@click.option("--output", type=click.Path(path_type=Path), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--backgrounds-per-image", type=int, default=2, show_default=True)
@click.option("--quarters-per-image", type=int, default=1, show_default=True)
def build_negatives(annotations, images, manifest, images_root, output, seed,
                    backgrounds_per_image, quarters_per_image):
    """Emit quarter- and background-negative crops for checker training."""
    from .imaging import load_image
    from .preservation import build_negative_set
    from .types import EditedImage

    sources = _load_sources(annotations, images)
    records = manifest_mod.load_manifest(manifest)
    edited = []
    for r in records:
        sub = f"SS{r.sea_state}" if r.kept else "discarded"
        path = Path(images_root) / sub / f"{r.edited_id}.png"
        if not path.exists():
            logger.warning("no image file for record %s (looked at %s)", r.edited_id, path)
            continue
        edited.append(
            EditedImage(
                id=r.edited_id,
                source_id=r.source_id,
                pixels=load_image(path),
                backend_name=r.backend_name,
                prompt=r.prompt,
                seed=r.seed,
            )
        )
    counts = build_negative_set(
        sources,
        edited,
        output,
        seed,
        backgrounds_per_image=backgrounds_per_image,
        quarters_per_image=quarters_per_image,
    )
    click.echo(json.dumps(counts))


@cli.command("eval")
@click.option("--manifest", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--detections", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--annotations", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--images", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def eval_cmd(manifest, detections, annotations, images, as_json):
    """Per-sea-state mAP report for an external detector's outputs."""
    from .evaluation import evaluate

    sources = _load_sources(annotations, images)
    report = evaluate(manifest, detections, sources)
    if as_json:
        click.echo(json.dumps(report.as_dict(), indent=2))
        return
    click.echo(f"{'state':>6} {'map50':>8} {'map50_95':>9} {'n_images':>9} {'n_gt':>6}")
    for state, m in sorted(report.per_state.items()):
        map50 = "n/a" if m.map50 is None else f"{m.map50:.4f}"
        map5095 = "n/a" if m.map50_95 is None else f"{m.map50_95:.4f}"
        click.echo(f"{f'SS{state.value}':>6} {map50:>8} {map5095:>9} {m.n_images:>9} {m.n_gt:>6}")


@cli.group()
def review():
    """Human quality-review service."""


@review.command()
@click.option("--manifest", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--images-root", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--store", type=click.Path(path_type=Path), required=True)
@click.option("--annotations", type=click.Path(exists=True, path_type=Path))
@click.option("--images", type=click.Path(exists=True, path_type=Path))
@click.option("--ui-dir", type=click.Path(exists=True, path_type=Path))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8040, show_default=True)
def serve(manifest, images_root, store, annotations, images, ui_dir, host, port):
    """Start the review HTTP service (and UI, when --ui-dir is given)."""
    import uvicorn

    from .review import ReviewStore
    from .review_app import create_app

    sources = None
    if annotations and images:
        sources = _load_sources(annotations, images)
    review_store = ReviewStore(store, manifest_path=manifest)
    app = create_app(review_store, images_root, sources=sources, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    """Dispatch with spec'd exit codes: 0 ok, 1 usage error, 2 runtime failure."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.exceptions.Exit as exc:
        return 0 if exc.exit_code == 0 else 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except SeamorphError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 2
        click.echo(f"unexpected error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
