"""Batch command line: corpus synthesis, extraction, training, evaluation.

Exit codes: 0 ok, 1 usage/config, 2 data problems, 3 solver
non-convergence, 4 internal faults. VERIPHON_SEED overrides --seed.
"""

import argparse
import json
import os
import sys
import tempfile

from ._core import BACKEND
from .audio_io import load_wav, save_wav
from .classify import CvGrid
from .dsp import FrameConfig
from .enhance import multiband_subtract
from .errors import (BadK, BadNfft, NoConvergence, SingularAutocorrelation,
                     VeriphonError)
from .evaluate import (PRESET_NAMES, evaluate_systems, make_system,
                       parse_condition, timing_probe, train_systems,
                       trained_from_dict, trained_to_dict)
from .features import FeatureRecipe, combine, utterance_vector_to_csv
from .manifest import load_manifest
from .report import (write_condition_table, write_report, write_speaker_rocs,
                     write_system_summary)
from .synth import make_utterance, speaker_formants, synth_corpus


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    env = os.environ.get("VERIPHON_SEED")
    return int(env) if env else args.seed


def _frame_config(args) -> FrameConfig:
    return FrameConfig(nfft=args.nfft) if getattr(args, "nfft", None) \
        else FrameConfig()


def _recipe_from_args(args) -> FeatureRecipe:
    if args.recipe_index is not None:
        return FeatureRecipe.from_index(args.recipe_index, args.profile)
    return make_system(args.preset).recipe


def cmd_synth_corpus(args) -> int:
    manifest = synth_corpus(args.out, n_speakers=args.speakers,
                            n_train=args.train, n_test=args.test,
                            seed=_seed(args), duration_s=args.duration)
    print(f"wrote {len(manifest.speakers)} speakers, "
          f"{len(manifest.noises)} noises under {args.out}")
    return 0


def cmd_extract(args) -> int:
    manifest = load_manifest(args.manifest)
    recipe = _recipe_from_args(args)
    cfg = _frame_config(args)
    os.makedirs(args.out, exist_ok=True)
    index = {"recipe": recipe.describe(), "dim": recipe.dim, "files": {}}
    for spk in manifest.speakers:
        for path in list(spk.train) + list(spk.test):
            vec = combine(recipe, load_wav(manifest.resolve(path)), cfg)
            name = path.replace(os.sep, "__").replace("/", "__") + ".csv"
            utterance_vector_to_csv(vec, os.path.join(args.out, name))
            index["files"][path] = name
    with open(os.path.join(args.out, "index.json"), "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"extracted {len(index['files'])} utterances "
          f"({recipe.describe()}, dim {recipe.dim}) to {args.out}")
    return 0


def cmd_train(args) -> int:
    manifest = load_manifest(args.manifest)
    system = make_system(args.preset)
    trained = train_systems(manifest, system, seed=_seed(args),
                            cfg=_frame_config(args), grid=CvGrid(),
                            jobs=args.jobs)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "models.json")
    with open(path, "w") as fh:
        json.dump(trained_to_dict(trained), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"trained {len(trained.speakers)} speaker banks "
          f"({system.name}) -> {path}")
    return 0


def cmd_evaluate(args) -> int:
    manifest = load_manifest(args.manifest)
    system = make_system(args.preset)
    if args.models:
        with open(args.models) as fh:
            trained = trained_from_dict(json.load(fh))
    else:
        trained = train_systems(manifest, system, seed=_seed(args),
                                cfg=_frame_config(args), grid=CvGrid(),
                                jobs=args.jobs)
    rep = evaluate_systems(manifest, trained, args.conditions)
    paths = write_report(rep, args.out)
    write_system_summary([(system.name, rep)],
                         os.path.join(args.out, "summary.csv"))
    write_condition_table([(system.name, rep)],
                          os.path.join(args.out, "table.csv"))
    write_speaker_rocs(rep, os.path.join(args.out, "roc"))
    for cond in args.conditions:
        key = parse_condition(cond).name
        entry = rep.conditions[key]
        print(f"{key}: mean AUC {entry['mean_auc']:.4f} "
              f"(pooled {entry['pooled_auc']:.4f}, {entry['n_trials']} trials"
              f" x {len(entry['per_speaker'])} speakers)")
    print(f"report -> {paths['report']}")
    return 0


def cmd_denoise(args) -> int:
    buf = load_wav(args.infile)
    cfg = _frame_config(args)
    out = multiband_subtract(buf, cfg, noise_frames=args.noise_frames,
                             smooth=not args.no_smooth)
    save_wav(args.out, out)
    print(f"denoised {args.infile} -> {args.out}")
    return 0


def cmd_bench(args) -> int:
    if args.manifest:
        manifest = load_manifest(args.manifest)
        work = None
    else:
        work = tempfile.TemporaryDirectory(prefix="veriphon-bench-")
        manifest = synth_corpus(work.name, seed=_seed(args))
    try:
        system = make_system(args.preset)
        trained = train_systems(manifest, system, seed=_seed(args),
                                jobs=args.jobs)
        formants = speaker_formants(1, _seed(args))[0]
        probe = make_utterance(formants, seed=_seed(args),
                               duration_s=args.seconds)
        with tempfile.NamedTemporaryFile(suffix=".wav", delete=False) as fh:
            probe_path = fh.name
        save_wav(probe_path, probe)
        try:
            timing = timing_probe(trained, probe_path, repeats=args.repeats)
        finally:
            os.unlink(probe_path)
    finally:
        if work is not None:
            work.cleanup()
    print(f"preset {args.preset}, {args.seconds:g}s utterance, "
          f"SMO backend: {BACKEND}")
    print(f"{'stage':<10}{'mean s':>12}{'variance':>14}")
    for stage in ("read", "denoise", "extract", "classify"):
        print(f"{stage:<10}{timing[stage]['mean']:>12.4f}"
              f"{timing[stage]['var']:>14.3e}")
    print(f"{'total':<10}{timing['total']:>12.4f}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="veriphon",
                     description="speaker-verification batch toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, manifest=True):
        if manifest:
            p.add_argument("--manifest", required=True,
                           help="corpus manifest JSON")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--nfft", type=int, default=None)

    p = sub.add_parser("synth-corpus", help="generate the deterministic toy corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--speakers", type=int, default=6)
    p.add_argument("--train", type=int, default=7)
    p.add_argument("--test", type=int, default=2)
    p.add_argument("--duration", type=float, default=1.8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_synth_corpus)

    p = sub.add_parser("extract", help="write per-utterance feature CSVs")
    add_common(p)
    p.add_argument("--preset", choices=PRESET_NAMES, default="basic1")
    p.add_argument("--recipe-index", type=int, default=None,
                   help="feature-combination index 1..13 (overrides preset)")
    p.add_argument("--profile", choices=("low", "high"), default="low")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_extract)

    p = sub.add_parser("train", help="train per-speaker banks on clean audio")
    add_common(p)
    p.add_argument("--preset", choices=PRESET_NAMES, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="run the verification protocol")
    add_common(p)
    p.add_argument("--preset", choices=PRESET_NAMES, required=True)
    p.add_argument("--models", default=None,
                   help="models.json from `train`; omitted = train in-process")
    p.add_argument("--conditions", nargs="+", default=["clean"],
                   help="e.g. clean pink@10 white@20dB")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("denoise", help="multiband spectral subtraction on a WAV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--noise-frames", type=int, default=12)
    p.add_argument("--no-smooth", action="store_true")
    p.add_argument("--nfft", type=int, default=None)
    p.set_defaults(fn=cmd_denoise)

    p = sub.add_parser("bench", help="per-stage test-phase timing")
    p.add_argument("--preset", choices=PRESET_NAMES, required=True)
    p.add_argument("--manifest", default=None,
                   help="optional corpus; default synthesizes a toy one")
    p.add_argument("--seconds", type=float, default=20.0)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (NoConvergence, SingularAutocorrelation) as exc:
        print(f"error (convergence): {exc}", file=sys.stderr)
        return 3
    except (BadK, BadNfft, ValueError) as exc:
        print(f"error (config): {exc}", file=sys.stderr)
        return 1
    except (VeriphonError, OSError) as exc:
        print(f"error (data): {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - safety net
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
