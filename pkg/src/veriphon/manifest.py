"""Corpus manifests and experiment configuration, both as editable JSON."""

import json
import os
from dataclasses import dataclass, field

from .errors import ManifestError


@dataclass(frozen=True)
class SpeakerEntry:
    id: str
    train: tuple      # utterance paths used for enrollment
    test: tuple


@dataclass(frozen=True)
class CorpusManifest:
    speakers: tuple
    noises: dict      # name -> wav path
    sample_rate: int
    root: str = "."   # paths resolve against this directory

    def __post_init__(self):
        if not self.speakers:
            raise ManifestError("manifest lists no speakers")
        seen = set()
        ids = set()
        for spk in self.speakers:
            if spk.id in ids:
                raise ManifestError(f"duplicate speaker id {spk.id!r}")
            ids.add(spk.id)
            if not spk.train or not spk.test:
                raise ManifestError(
                    f"speaker {spk.id!r} needs >= 1 train and >= 1 test utterance")
            for path in list(spk.train) + list(spk.test):
                if path in seen:
                    raise ManifestError(f"path listed twice: {path!r}")
                seen.add(path)
        for name, path in self.noises.items():
            if path in seen:
                raise ManifestError(f"path listed twice: {path!r}")
            seen.add(path)
        if self.sample_rate < 1:
            raise ManifestError(f"bad sample_rate {self.sample_rate}")

    def resolve(self, path: str) -> str:
        return os.path.normpath(os.path.join(self.root, path))

    def noise_path(self, name: str) -> str:
        if name not in self.noises:
            raise ManifestError(f"noise {name!r} not in manifest "
                                f"(have {sorted(self.noises)})")
        return self.resolve(self.noises[name])


def load_manifest(path: str) -> CorpusManifest:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    try:
        speakers = tuple(SpeakerEntry(id=s["id"], train=tuple(s["train"]),
                                      test=tuple(s["test"]))
                         for s in doc["speakers"])
        return CorpusManifest(speakers=speakers,
                              noises=dict(doc.get("noises", {})),
                              sample_rate=int(doc["sample_rate"]),
                              root=os.path.dirname(os.path.abspath(path)))
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"malformed manifest {path}: {exc}") from exc


def save_manifest(manifest: CorpusManifest, path: str) -> None:
    doc = {"sample_rate": manifest.sample_rate,
           "speakers": [{"id": s.id, "train": list(s.train),
                         "test": list(s.test)} for s in manifest.speakers],
           "noises": dict(manifest.noises)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass
class ExperimentConfig:
    """Everything a batch run needs; defaults reproduce the presets as-is."""

    preset: str = "proposed1"
    conditions: tuple = ("clean",)
    seed: int = 0
    out_dir: str = "runs"
    jobs: int = 1
    overrides: dict = field(default_factory=dict)  # nfft, noise_frames, ...


def load_experiment(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read experiment config {path}: {exc}") from exc
    cfg = ExperimentConfig()
    for key in ("preset", "seed", "out_dir", "jobs"):
        if key in doc:
            setattr(cfg, key, doc[key])
    if "conditions" in doc:
        cfg.conditions = tuple(doc["conditions"])
    cfg.overrides = dict(doc.get("overrides", {}))
    return cfg
