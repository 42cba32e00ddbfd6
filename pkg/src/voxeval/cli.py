"""Command-line front end for the evaluation engine.

Every subcommand is a thin wrapper over library calls: it parses
arguments, loads files, runs one operation, writes outputs, and records a
resolved-config sidecar so a run can be repeated exactly.  Sidecars carry
no timestamps; with a fixed --seed the outputs are byte-for-byte
reproducible.  Exit codes: 0 success, 2 validation failure, 3 I/O or file
format failure, 4 numeric failure.

Presets (also listed in --help):
  intensity windows   ct-200 = clip [-200, 200] HU; ct-1000 = clip
                      [-1000, 1000] HU; mri = quantile clip 0.001/0.999
  gan lambda vectors  ct = (1, 1000, 100, 1, 10); mri = (1, 100, 100, 1, 10)
  samplers            linear, dpmpp-2m, dpmpp-2m-karras, dpmpp-2m-sde,
                      dpmpp-2m-sde-karras
  report alpha        default = 0.05, paper-strict = 0.04
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .diffusion import (
    SAMPLER_NAMES,
    GaussianPosteriorDenoiser,
    PointMassDenoiser,
    build_blur_mask,
    linear_schedule,
    sample,
)
from .errors import IOFormatError, NumericError, ValidationError
from .fidelity import (
    ccc_report,
    ccc_summary,
    dsc,
    mae,
    ms_ssim,
    pca_distance,
    write_pca_scatter,
)
from .ganmath import (
    GAN_PRESETS,
    GanLambdas,
    ada_update,  # noqa: F401  (re-exported for programmatic use of this module)
    diffusion_losses,
    discriminator_loss,
    generator_loss,
)
from .nifti import load_mask, load_volume, write_nifti, write_raw
from .radiomics import (
    ExtractionConfig,
    build_manifest,
    extract_all,
    features_to_csv,
    features_to_json,
    read_feature_csv,
    write_manifest,
)
from .volume import (
    IntensityRange,
    Volume,
    clip_and_scale,
    nearest_rank_quantile,
    quantile_normalize,
)
from .vtt import ALPHA_PRESETS, RatingJournal, load_session, ratings_csv, session_report

ENV_CONFIG_DIR = "VOXEVAL_CONFIG_DIR"

CLIP_PRESETS = {"ct-200": (-200.0, 200.0), "ct-1000": (-1000.0, 1000.0)}
MRI_QUANTILES = (0.001, 0.999)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def _save_volume(vol: Volume, path: str) -> None:
    if path.endswith(".raw"):
        write_raw(vol, path)
    else:
        write_nifti(vol, path)


def _sidecar_path(out_path: str) -> Path:
    cfg_dir = os.environ.get(ENV_CONFIG_DIR)
    if cfg_dir:
        d = Path(cfg_dir)
        d.mkdir(parents=True, exist_ok=True)
        return d / (Path(out_path).name + ".config.json")
    return Path(str(out_path) + ".config.json")


def _write_sidecar(out_path: str, command: str, resolved: dict) -> None:
    payload = {"command": command, "config": resolved}
    with open(_sidecar_path(out_path), "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _emit(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_ints(text: str) -> tuple[int, ...]:
    vals = _parse_floats(text)
    if any(v != int(v) for v in vals):
        raise ValidationError(f"expected integers, got {text!r}")
    return tuple(int(v) for v in vals)


# ---------------------------------------------------------------------------
# normalize
# ---------------------------------------------------------------------------

def _cmd_normalize(args: argparse.Namespace) -> int:
    vol = load_volume(args.input, args.kind)
    if args.invert:
        if args.lo is None or args.hi is None:
            raise ValidationError("--invert requires --lo and --hi")
        lo, hi = float(args.lo), float(args.hi)
        if not lo < hi:
            raise ValidationError(f"--lo must be < --hi, got {lo}, {hi}")
        values = lo + (vol.values.astype(np.float64) + 1.0) * 0.5 * (hi - lo)
        out_vol = Volume(values.astype(np.float32), vol.spacing, args.kind)
        resolved = {"invert": True, "lo": lo, "hi": hi, "kind": args.kind}
    elif args.preset in CLIP_PRESETS:
        lo, hi = CLIP_PRESETS[args.preset]
        out_vol = clip_and_scale(vol, IntensityRange(lo, hi))
        resolved = {"preset": args.preset, "lo": lo, "hi": hi}
    elif args.preset == "mri":
        q_lo, q_hi = MRI_QUANTILES
        out_vol = quantile_normalize(vol, q_lo, q_hi)
        flat = np.sort(vol.values.astype(np.float64), axis=None)
        resolved = {
            "preset": "mri",
            "q_lo": q_lo,
            "q_hi": q_hi,
            "lo": nearest_rank_quantile(flat, q_lo),
            "hi": nearest_rank_quantile(flat, q_hi),
        }
    else:
        raise ValidationError("choose a --preset or --invert")
    _save_volume(out_vol, args.output)
    _write_sidecar(args.output, "normalize", resolved)
    return EXIT_OK


# ---------------------------------------------------------------------------
# radiomics
# ---------------------------------------------------------------------------

def _parse_case_spec(spec: str) -> tuple[str, str, str]:
    head, sep, rest = spec.partition("=")
    if not sep:
        raise ValidationError(f"--case must look like ID=IMAGE:MASK, got {spec!r}")
    image, sep2, mask = rest.partition(":")
    if not sep2 or not image or not mask:
        raise ValidationError(f"--case must look like ID=IMAGE:MASK, got {spec!r}")
    return head, image, mask


def _cmd_radiomics(args: argparse.Namespace) -> int:
    if args.case:
        cases = [_parse_case_spec(s) for s in args.case]
    elif args.image and args.mask:
        cid = args.case_id or Path(args.image).name.split(".")[0]
        cases = [(cid, args.image, args.mask)]
    else:
        raise ValidationError("give --image/--mask or one or more --case specs")
    if len({c[0] for c in cases}) != len(cases):
        raise ValidationError("case ids must be unique")

    cfg = ExtractionConfig(
        bin_width=args.bin_width,
        label=args.label,
        correct_mask=not args.no_mask_correction,
        log_sigmas_mm=tuple(args.log_sigmas),
        enable_wavelet=not args.no_wavelet,
    )

    def _one(case: tuple[str, str, str]):
        cid, image_path, mask_path = case
        vol = load_volume(image_path, args.kind)
        msk = load_mask(mask_path)
        return extract_all(vol, msk, cfg, case_id=cid)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_one, cases))
    else:
        rows = [_one(c) for c in cases]
    rows.sort(key=lambda r: r.case_id)

    if args.out.endswith(".json"):
        features_to_json(rows, args.out)
    else:
        features_to_csv(rows, args.out)
    if args.manifest_out:
        write_manifest(build_manifest(cfg), args.manifest_out)
    _write_sidecar(
        args.out,
        "radiomics",
        {
            "cases": [list(c) for c in cases],
            "kind": args.kind,
            "bin_width": cfg.bin_width,
            "label": cfg.label,
            "correct_mask": cfg.correct_mask,
            "log_sigmas_mm": list(cfg.log_sigmas_mm),
            "enable_wavelet": cfg.enable_wavelet,
            "jobs": args.jobs,
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def _aligned_cohorts(real_csv: str, synth_csv: str):
    ids_r, keys_r, mat_r = read_feature_csv(real_csv)
    ids_s, keys_s, mat_s = read_feature_csv(synth_csv)
    if keys_r != keys_s:
        raise ValidationError("feature tables disagree on feature keys")
    if len(ids_r) != len(ids_s):
        raise ValidationError(
            f"cohort sizes differ: {len(ids_r)} vs {len(ids_s)} cases"
        )
    if sorted(ids_r) == sorted(ids_s):
        order_r = np.argsort(ids_r)
        order_s = np.argsort(ids_s)
        mat_r, mat_s = mat_r[order_r], mat_s[order_s]
    return keys_r, mat_r, mat_s


def _cmd_compare(args: argparse.Namespace) -> int:
    keys, real, synth = _aligned_cohorts(args.real, args.synth)
    report = ccc_report(keys, real, synth)
    fractions = ccc_summary(report)
    counts = {k: 0 for k in ("excellent", "good", "moderate", "poor")}
    for entry in report.values():
        counts[entry["category"]] += 1
    obj: dict = {
        "n_cases": int(real.shape[0]),
        "n_features": len(keys),
        "category_counts": counts,
        "category_fractions": fractions,
        "features": report,
    }
    if real.shape[0] >= 2:
        pca = pca_distance(real, synth)
        obj["pca"] = {
            "distance": pca.distance,
            "dropped_features": pca.dropped_features,
            "explained_variance_ratio": list(pca.explained_variance_ratio),
        }
        if args.pca_out:
            write_pca_scatter(pca, args.pca_out, "real", "synthetic")
    _emit(obj, args.out)
    if args.out:
        _write_sidecar(args.out, "compare", {"real": args.real, "synth": args.synth})
    return EXIT_OK


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def _cmd_metrics(args: argparse.Namespace) -> int:
    if not (args.mae or args.ms_ssim or args.dsc):
        raise ValidationError("select at least one of --mae, --ms-ssim, --dsc")
    out: dict = {}
    if args.mae or args.ms_ssim:
        a = load_volume(args.a, args.kind)
        b = load_volume(args.b, args.kind)
        if args.mae:
            out["mae"] = mae(a, b)
        if args.ms_ssim:
            out["ms_ssim"] = ms_ssim(a, b, scales=args.scales)
    if args.dsc:
        groups = None
        if args.groups:
            with open(args.groups, "r", encoding="utf-8") as f:
                raw = json.load(f)
            groups = {str(k): [int(x) for x in v] for k, v in raw.items()}
        rep = dsc(load_mask(args.a), load_mask(args.b), mode=args.dsc_mode, groups=groups)
        out["dsc"] = {"per_structure": rep.per_structure, "mean": rep.mean}
    _emit(out, args.out)
    if args.out:
        _write_sidecar(
            args.out,
            "metrics",
            {
                "a": args.a,
                "b": args.b,
                "kind": args.kind,
                "scales": args.scales,
                "dsc_mode": args.dsc_mode,
            },
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------

def _parse_denoiser(spec: str, kind: str):
    """Denoiser spec: point-mass:PATH or gaussian:MU,STD."""
    name, sep, rest = spec.partition(":")
    if name == "point-mass" and sep and rest:
        x0 = load_volume(rest, kind)
        return PointMassDenoiser(x0.values.astype(np.float64)), x0
    if name == "gaussian" and sep and rest:
        vals = _parse_floats(rest)
        if len(vals) != 2:
            raise ValidationError(f"gaussian denoiser needs MU,STD, got {rest!r}")
        return GaussianPosteriorDenoiser(vals[0], vals[1]), None
    raise ValidationError(
        f"--denoiser must be point-mass:PATH or gaussian:MU,STD, got {spec!r}"
    )


def _cmd_sample(args: argparse.Namespace) -> int:
    denoiser, x0 = _parse_denoiser(args.denoiser, args.kind)
    if x0 is not None:
        shape = x0.dims
        spacing = x0.spacing
    else:
        if not args.shape:
            raise ValidationError("gaussian denoiser needs --shape X,Y,Z")
        shape = _parse_ints(args.shape)
        spacing = tuple(_parse_floats(args.spacing)) if args.spacing else (1.0, 1.0, 1.0)
        if len(shape) != 3 or len(spacing) != 3:
            raise ValidationError("--shape and --spacing need three values")
    schedule = linear_schedule(args.schedule_steps)
    values = sample(
        args.sampler,
        denoiser,
        schedule,
        tuple(shape),
        seed=args.seed,
        steps=args.steps,
        rho=args.rho,
    )
    out_vol = Volume(values.astype(np.float32), spacing, "arbitrary")
    _save_volume(out_vol, args.out)
    _write_sidecar(
        args.out,
        "sample",
        {
            "sampler": args.sampler,
            "steps": args.steps,
            "schedule_steps": args.schedule_steps,
            "seed": args.seed,
            "denoiser": args.denoiser,
            "rho": args.rho,
            "kind": args.kind,
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# inpaint-mask
# ---------------------------------------------------------------------------

def _cmd_inpaint_mask(args: argparse.Namespace) -> int:
    label = load_mask(args.label)
    mask = build_blur_mask(
        label, mode=args.mode, dilate_iters=args.dilate, blur_sigma=args.blur
    )
    _save_volume(mask.as_volume(), args.out)
    _write_sidecar(
        args.out,
        "inpaint-mask",
        {"mode": args.mode, "dilate": args.dilate, "blur": args.blur},
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# ganloss
# ---------------------------------------------------------------------------

def _lambdas_from_args(args: argparse.Namespace) -> GanLambdas:
    if args.lambdas:
        vals = _parse_floats(args.lambdas)
        if len(vals) != 5:
            raise ValidationError("--lambdas needs five comma-separated values")
        return GanLambdas(*vals)
    return GAN_PRESETS[args.preset]


def _cmd_ganloss(args: argparse.Namespace) -> int:
    if args.objective == "generator":
        lam = _lambdas_from_args(args)
        x = load_volume(args.x, args.kind)
        g = load_volume(args.g, args.kind)
        tumor = load_mask(args.tumor).binary() if args.tumor else np.zeros(x.dims, bool)
        res = generator_loss(
            np.asarray(_parse_floats(args.d_fake)),
            x.values[None],
            g.values[None],
            tumor[None],
            lam,
        )
        obj = {
            "objective": "generator",
            "lambdas": [lam.l1, lam.l2, lam.l3, lam.l4, lam.l5],
            "total": res.total,
            "adversarial": res.adversarial,
            "reconstruction": res.reconstruction,
            "tumor": res.tumor,
        }
    elif args.objective == "discriminator":
        lam = _lambdas_from_args(args)
        res = discriminator_loss(
            np.asarray(_parse_floats(args.d_real)),
            np.asarray(_parse_floats(args.d_fake)),
            np.asarray(_parse_floats(args.grad_norms)),
            lam,
        )
        obj = {
            "objective": "discriminator",
            "lambdas": [lam.l1, lam.l2, lam.l3, lam.l4, lam.l5],
            "total": res.total,
            "wasserstein": res.wasserstein,
            "gradient_penalty": res.gradient_penalty,
            "drift": res.drift,
        }
    else:
        x0 = load_volume(args.x0, args.kind)
        x0_hat = load_volume(args.x0_hat, args.kind)
        mask = load_mask(args.mask).binary() if args.mask else np.zeros(x0.dims, bool)
        l_wdm, l_inpaint = diffusion_losses(x0.values, x0_hat.values, mask, l1=args.l1)
        obj = {
            "objective": "diffusion",
            "l1": args.l1,
            "l_wdm": l_wdm,
            "l_inpaint": l_inpaint,
        }
    _emit(obj, args.out)
    if args.out:
        _write_sidecar(args.out, "ganloss", {"objective": args.objective})
    return EXIT_OK


# ---------------------------------------------------------------------------
# vtt
# ---------------------------------------------------------------------------

def _resolve_alpha(text: str) -> float:
    if text in ALPHA_PRESETS:
        return ALPHA_PRESETS[text]
    try:
        return float(text)
    except ValueError:
        raise ValidationError(
            f"--alpha must be a number or one of {sorted(ALPHA_PRESETS)}, got {text!r}"
        ) from None


def _cmd_vtt(args: argparse.Namespace) -> int:
    session = load_session(args.session)
    journal = RatingJournal(args.journal)
    if args.vtt_action == "serve":
        import uvicorn

        from .vtt.server import create_app

        app = create_app(session, journal, ui_dir=args.ui)
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
        return EXIT_OK
    records = journal.snapshot()
    if args.vtt_action == "report":
        report = session_report(session, records, _resolve_alpha(args.alpha))
        _emit(report, args.out)
        return EXIT_OK
    text = ratings_csv(records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voxeval",
        description="Volumetric evaluation engine: normalization, radiomics, "
        "fidelity metrics, diffusion sampling math, and the rating study service.",
        epilog=(
            "presets: intensity ct-200 (clip [-200,200] HU), ct-1000 (clip "
            "[-1000,1000] HU), mri (quantile clip 0.001/0.999); gan lambdas "
            "ct (1,1000,100,1,10), mri (1,100,100,1,10); samplers "
            + ", ".join(SAMPLER_NAMES)
            + "; report alpha default (0.05), paper-strict (0.04)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "normalize",
        help="window or quantile-normalize a volume to [-1, 1]",
        description="Intensity normalization. Presets: ct-200 clips to "
        "[-200, 200] HU, ct-1000 to [-1000, 1000] HU, mri clips between the "
        "0.001 and 0.999 quantiles; all rescale to [-1, 1]. --invert maps "
        "[-1, 1] back through an explicit --lo/--hi window.",
    )
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--preset", choices=sorted(CLIP_PRESETS) + ["mri"])
    p.add_argument("--kind", default="HU", choices=["HU", "normalized", "arbitrary"])
    p.add_argument("--invert", action="store_true")
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser(
        "radiomics",
        help="extract the feature manifest from image/mask cases",
        description="Feature extraction (default manifest: 1,065 features). "
        "Cases run in parallel with --jobs; rows are ordered by case id.",
    )
    p.add_argument("--out", required=True, help="output table (.csv or .json)")
    p.add_argument("--case", action="append", default=[], metavar="ID=IMAGE:MASK")
    p.add_argument("--image")
    p.add_argument("--mask")
    p.add_argument("--case-id")
    p.add_argument("--kind", default="HU", choices=["HU", "normalized", "arbitrary"])
    p.add_argument("--bin-width", type=float, default=25.0)
    p.add_argument("--label", type=int, default=1)
    p.add_argument("--no-mask-correction", action="store_true")
    p.add_argument("--log-sigmas", type=_parse_floats, default=[1.0, 2.0, 3.0, 4.0, 5.0])
    p.add_argument("--no-wavelet", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--manifest-out")
    p.set_defaults(func=_cmd_radiomics)

    p = sub.add_parser(
        "compare",
        help="per-feature CCC and PCA distance between two cohorts",
        description="Concordance report between paired feature tables. "
        "Categories: excellent >= 0.90, good >= 0.75, moderate >= 0.50, "
        "poor below.",
    )
    p.add_argument("real")
    p.add_argument("synth")
    p.add_argument("--out")
    p.add_argument("--pca-out", help="scatter CSV of the 2-component embedding")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser(
        "metrics",
        help="MAE, MS-SSIM, and Dice between two files",
        description="Pairwise metrics. --mae/--ms-ssim treat A and B as "
        "intensity volumes; --dsc treats them as label masks.",
    )
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--mae", action="store_true")
    p.add_argument("--ms-ssim", action="store_true")
    p.add_argument("--dsc", action="store_true")
    p.add_argument("--kind", default="HU", choices=["HU", "normalized", "arbitrary"])
    p.add_argument("--scales", type=int, default=5)
    p.add_argument("--dsc-mode", default="semantic", choices=["semantic", "instance"])
    p.add_argument("--groups", help="JSON file: structure name -> [labels]")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser(
        "sample",
        help="run a sampler against a reference denoiser",
        description="Samplers: " + ", ".join(SAMPLER_NAMES) + ". Denoisers: "
        "point-mass:PATH (always predicts the volume at PATH) or "
        "gaussian:MU,STD (exact posterior for a Gaussian toy target).",
    )
    p.add_argument("--sampler", required=True, choices=list(SAMPLER_NAMES))
    p.add_argument("--denoiser", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--schedule-steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=7.0)
    p.add_argument("--shape", help="X,Y,Z (gaussian denoiser only)")
    p.add_argument("--spacing", help="SX,SY,SZ in mm (default 1,1,1)")
    p.add_argument("--kind", default="normalized", choices=["HU", "normalized", "arbitrary"])
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser(
        "inpaint-mask",
        help="build a blurred inpainting mask from a label map",
        description="Dilates the label (default 5 iterations, 3x3x3 cube), "
        "applies Gaussian blur (default sigma 25 voxels), clamps to [0, 1]. "
        "edge mode forces 1 on the original label voxels.",
    )
    p.add_argument("label")
    p.add_argument("out")
    p.add_argument("--mode", default="edge", choices=["edge", "full"])
    p.add_argument("--dilate", type=int, default=5)
    p.add_argument("--blur", type=float, default=25.0)
    p.set_defaults(func=_cmd_inpaint_mask)

    p = sub.add_parser(
        "ganloss",
        help="evaluate adversarial or diffusion objectives on files",
        description="Closed-form loss evaluation. Lambda presets: ct = "
        "(1, 1000, 100, 1, 10), mri = (1, 100, 100, 1, 10).",
    )
    p.add_argument("objective", choices=["generator", "discriminator", "diffusion"])
    p.add_argument("--preset", default="ct", choices=sorted(GAN_PRESETS))
    p.add_argument("--lambdas", help="five comma-separated weights (overrides preset)")
    p.add_argument("--kind", default="normalized", choices=["HU", "normalized", "arbitrary"])
    p.add_argument("--x", help="real batch volume (generator)")
    p.add_argument("--g", help="generated batch volume (generator)")
    p.add_argument("--tumor", help="tumor mask (generator)")
    p.add_argument("--d-fake", default="0", help="critic outputs, comma-separated")
    p.add_argument("--d-real", default="0", help="critic outputs, comma-separated")
    p.add_argument("--grad-norms", default="1", help="penalty norms, comma-separated")
    p.add_argument("--x0", help="target volume (diffusion)")
    p.add_argument("--x0-hat", help="denoised volume (diffusion)")
    p.add_argument("--mask", help="tumor mask (diffusion)")
    p.add_argument("--l1", type=float, default=10.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ganloss)

    p = sub.add_parser(
        "vtt",
        help="serve, report, or export a rating session",
        description="Rating study service. report --alpha accepts a number "
        "or a preset: default (0.05), paper-strict (0.04).",
    )
    p.add_argument("vtt_action", choices=["serve", "report", "export-csv"])
    p.add_argument("session", help="session description JSON")
    p.add_argument("--journal", required=True, help="ratings JSONL path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", help="static UI directory to mount")
    p.add_argument("--alpha", default="default")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_vtt)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IOFormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ArithmeticError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
