"""Command-line surface.

Subcommands: cluster, merge, run, baseline, synth, bench. Machine-readable
results go to files or stdout; diagnostics go to stderr. Exit codes: 0 ok,
2 input-format error, 3 constraint/validation error, 1 unexpected failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

import numpy as np

from .bench import BenchConfig, run_bench
from .clustering import build_hierarchy, clusters_document, select_keyframes
from .errors import DytoError, FormatError
from .merging import compress_frame, merge_trace, plan_budget
from .pipeline import (
    PipelineConfig,
    build_sidecar,
    run_baseline_uniform_pool,
    run_dyto,
)
from .store import extract_cls_sequence, load_tokens, save_array, save_tokens
from .synth import SyntheticSpec, generate_synthetic_video

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_FORMAT = 2
EXIT_CONSTRAINT = 3


def _write_json(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _pipeline_config(args, **overrides) -> PipelineConfig:
    fields = dict(
        budget=args.budget,
        heads=args.heads,
        r1_cap=args.r1,
        keyframe_policy=args.policy,
        seed=args.seed,
        partition_level=getattr(args, "level", None),
    )
    fields.update(overrides)
    return PipelineConfig(**fields)


def cmd_cluster(args) -> int:
    tokens = load_tokens(args.input)
    cls = extract_cls_sequence(tokens)
    hierarchy = build_hierarchy(cls)
    level = args.level if args.level is not None else hierarchy.auto_level
    if not 0 <= level < len(hierarchy.levels):
        raise DytoError(f"level {level} out of range (hierarchy has {len(hierarchy.levels)})")
    partition = hierarchy.levels[level]
    keyframes = select_keyframes(partition, args.policy, cls=cls, seed=args.seed)
    _write_json(clusters_document(hierarchy, level, keyframes, args.policy), args.output)
    print(partition.k)
    return EXIT_OK


def cmd_run(args) -> int:
    tokens = load_tokens(args.input)
    cv = run_dyto(tokens, _pipeline_config(args))
    save_array(cv.stacked(), args.output)
    _write_json(build_sidecar(cv, include_trace=args.trace), str(args.output) + ".json")
    print(cv.total_tokens)
    return EXIT_OK


def cmd_merge(args) -> int:
    # merge-only path: keep every frame and compress it, no clustering
    tokens = load_tokens(args.input)
    schedule = plan_budget(
        tokens.tokens_per_frame, args.budget, tokens.n_frames, args.r1, heads=args.heads
    )
    frames = [
        compress_frame(tokens.data[f, 1:, :], schedule, frame_index=f, keep_steps=args.trace)
        for f in range(tokens.n_frames)
    ]
    save_array(np.stack([fr.tokens.values for fr in frames]), args.output)
    sidecar = {
        "method": "merge-only",
        "config": {"budget": args.budget, "heads": args.heads, "r1_cap": args.r1},
        "keyframes": list(range(tokens.n_frames)),
        "total_tokens": tokens.n_frames * schedule.target,
        "tokens_per_frame": [schedule.target],
    }
    if args.trace:
        sidecar["frames"] = [merge_trace(fr, schedule) for fr in frames]
    _write_json(sidecar, str(args.output) + ".json")
    print(tokens.n_frames * schedule.target)
    return EXIT_OK


def cmd_baseline(args) -> int:
    tokens = load_tokens(args.input)
    cfg = _pipeline_config(args, frames_to_sample=args.frames, pool_grid=args.grid)
    cv = run_baseline_uniform_pool(tokens, cfg)
    save_array(cv.stacked(), args.output)
    _write_json(build_sidecar(cv, include_trace=args.trace), str(args.output) + ".json")
    print(cv.total_tokens)
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SyntheticSpec(
        n_frames=args.frames,
        n_events=args.events,
        tokens_per_frame=args.tokens,
        dim=args.dim,
        sigma=args.sigma,
        seed=args.seed,
        boundaries=[int(x) for x in args.boundaries.split(",")] if args.boundaries else None,
    )
    tokens, truth = generate_synthetic_video(spec)
    base = Path(args.output)
    tensor_path = base if base.suffix == ".dyt" else base.with_name(base.name + ".dyt")
    truth_path = tensor_path.with_suffix(".gt.json")
    save_tokens(tokens, tensor_path)
    _write_json(truth.to_document(), str(truth_path))
    print(tensor_path)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = BenchConfig(
        events_min=args.events_min,
        events_max=args.events_max,
        seeds=args.seeds,
        n_frames=args.frames,
        tokens_per_frame=args.tokens,
        dim=args.dim,
        sigma=args.sigma,
        budget=args.budget,
        heads=args.heads,
        r1_cap=args.r1,
        keyframe_policy=args.policy,
        pool_grid=args.grid,
        seed_base=args.seed,
        timing=not args.no_timing,
    )
    report = run_bench(cfg, outdir=args.outdir)
    if args.output or not args.outdir:
        _write_json(report, args.output)
    return EXIT_OK


def _add_shared(parser: argparse.ArgumentParser, needs_input: bool, output) -> None:
    """Flags common to every subcommand; names and defaults are contractual."""
    if needs_input:
        parser.add_argument("--input", required=True, help="input DYT1 file")
    if output == "required":
        parser.add_argument("--output", required=True, help="output path")
    elif output == "optional":
        parser.add_argument("--output", help="output path (stdout if omitted)")
    parser.add_argument("--budget", type=int, default=3680, help="total output token budget")
    parser.add_argument("--heads", type=int, default=16, help="similarity head count")
    parser.add_argument("--r1", type=int, default=288, help="first-step merge cap")
    parser.add_argument(
        "--policy",
        default="temporal-middle",
        help="keyframe policy: temporal-middle, centroid-nearest, random-uniform",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for seeded policies/fixtures")
    parser.add_argument("--trace", action="store_true", help="include per-frame merge traces")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyto",
        description="Budget-bounded video token compression over per-frame embeddings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster frames into events, write clusters JSON")
    _add_shared(p, needs_input=True, output="required")
    p.add_argument("--level", type=int, default=None, help="partition level override")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("run", help="full pipeline: cluster, keyframes, merge, write DYT1+sidecar")
    _add_shared(p, needs_input=True, output="required")
    p.add_argument("--level", type=int, default=None, help="partition level override")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("merge", help="merge-only: compress every frame, no clustering")
    _add_shared(p, needs_input=True, output="required")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("baseline", help="uniform sampling + average pooling baseline")
    _add_shared(p, needs_input=True, output="required")
    p.add_argument("--frames", type=int, default=10, help="frames to sample")
    p.add_argument("--grid", type=int, default=12, help="pooled grid side")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("synth", help="write a seeded synthetic video and its ground truth")
    _add_shared(p, needs_input=False, output="required")
    p.add_argument("--frames", type=int, default=100, help="frame count")
    p.add_argument("--events", type=int, default=5, help="event count")
    p.add_argument("--tokens", type=int, default=577, help="tokens per frame incl. CLS")
    p.add_argument("--dim", type=int, default=32, help="channel count")
    p.add_argument("--sigma", type=float, default=0.05, help="intra-event noise level")
    p.add_argument("--boundaries", default=None, help="explicit cut points, comma separated")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="seeded suite comparing dyto vs uniform-pool")
    _add_shared(p, needs_input=False, output="optional")
    p.add_argument("--events-min", type=int, default=3)
    p.add_argument("--events-max", type=int, default=8)
    p.add_argument("--seeds", type=int, default=5, help="repeats per event count")
    p.add_argument("--frames", type=int, default=100, help="frame count per video")
    p.add_argument("--tokens", type=int, default=577, help="tokens per frame incl. CLS")
    p.add_argument("--dim", type=int, default=32, help="channel count")
    p.add_argument("--sigma", type=float, default=0.05, help="intra-event noise level")
    p.add_argument("--grid", type=int, default=12, help="baseline pooled grid side")
    p.add_argument("--outdir", default=None, help="directory for fixtures and tensors")
    p.add_argument("--no-timing", action="store_true", help="null wall times for byte-stable runs")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DytoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except Exception:  # pragma: no cover - unexpected
        traceback.print_exc()
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
