"""Verification metrics and the batch one-vs-all evaluation protocol.

Each target speaker gets a bank trained on clean enrollment audio
(positives: the target's train utterances; negatives: everyone else's).
Test utterances are scored clean and under additive-noise conditions;
contamination touches test audio only. The headline number per condition
is the mean of per-speaker AUCs; a pooled-trials AUC is also reported.
"""

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np

from .audio_io import SnrSpec, load_wav, mix_noise_at_snr
from .classify import (CvGrid, LabeledSet, cv_select, model_from_dict,
                       model_to_dict, score_member)
from .dsp import FrameConfig
from .enhance import multiband_subtract
from .ensemble import BankMember, ClassifierBank, VotingRule
from .errors import (ConditionError, ManifestError, OneClassOnly,
                     UndefinedRate)
from .features import (FeatureRecipe, Normalizer, apply_normalizer, combine,
                       fit_normalizer)
from .manifest import CorpusManifest


# --- confusion counts and ROC -------------------------------------------

@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion_counts(decisions, labels) -> ConfusionCounts:
    """Tally 0/1 decisions against +-1 labels."""
    d = np.asarray(decisions, dtype=int)
    y = np.asarray(labels, dtype=float)
    return ConfusionCounts(
        tp=int(np.count_nonzero((d == 1) & (y > 0))),
        fp=int(np.count_nonzero((d == 1) & (y < 0))),
        tn=int(np.count_nonzero((d == 0) & (y < 0))),
        fn=int(np.count_nonzero((d == 0) & (y > 0))))


def tpr_fpr(c: ConfusionCounts):
    if c.tp + c.fn == 0 or c.fp + c.tn == 0:
        raise UndefinedRate("need at least one trial of each class")
    return c.tp / (c.tp + c.fn), c.fp / (c.fp + c.tn)


@dataclass(frozen=True)
class RocCurve:
    points: tuple      # ((fpr, tpr), ...) sorted, (0,0) .. (1,1)
    auc: float
    eer: float


def roc_auc(scores, labels) -> RocCurve:
    """Threshold-sweep ROC with the tie-aware rank statistic as AUC.

    The area is accumulated over integer counts, so it equals the exact
    pairwise statistic P(s+ > s-) + 0.5*P(s+ = s-) to the last bit.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=float)
    n_pos = int(np.count_nonzero(y > 0))
    n_neg = int(np.count_nonzero(y < 0))
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly("ROC needs both positive and negative trials")

    order = np.argsort(-s, kind="stable")
    ss = s[order]
    pos = y[order] > 0
    counts = [(0, 0)]  # cumulative (fp, tp) at each distinct threshold
    tp = fp = 0
    i = 0
    n = len(ss)
    while i < n:
        j = i
        while j < n and ss[j] == ss[i]:
            j += 1
        tp += int(np.count_nonzero(pos[i:j]))
        fp += (j - i) - int(np.count_nonzero(pos[i:j]))
        counts.append((fp, tp))
        i = j

    numer = 0  # twice the trapezoid area, in pair units (exact integers)
    for (fp0, tp0), (fp1, tp1) in zip(counts[:-1], counts[1:]):
        numer += (fp1 - fp0) * (tp0 + tp1)
    auc = numer / (2 * n_pos * n_neg)

    points = tuple((fp / n_neg, tp / n_pos) for fp, tp in counts)
    return RocCurve(points=points, auc=auc, eer=_eer_from_points(points))


def _eer_from_points(points) -> float:
    """Crossing of the ROC polyline with the fpr = 1 - tpr diagonal."""
    prev_fpr, prev_tpr = points[0]
    prev_d = prev_fpr + prev_tpr - 1.0
    for fpr, tpr in points[1:]:
        d = fpr + tpr - 1.0
        if d >= 0.0:
            if d == prev_d:
                return fpr
            t = -prev_d / (d - prev_d)
            return prev_fpr + t * (fpr - prev_fpr)
        prev_fpr, prev_tpr, prev_d = fpr, tpr, d
    return points[-1][0]


# --- conditions and system presets --------------------------------------

@dataclass(frozen=True)
class Condition:
    noise: str = None      # None = clean
    snr_db: float = None

    @property
    def name(self) -> str:
        if self.noise is None:
            return "clean"
        return f"{self.noise}@{self.snr_db:g}dB"


def parse_condition(text: str) -> Condition:
    t = text.strip()
    if t.lower() == "clean":
        return Condition()
    if "@" not in t:
        raise ConditionError(f"expected 'clean' or 'noise@snr', got {text!r}")
    noise, snr = t.split("@", 1)
    snr = snr.lower().removesuffix("db")
    try:
        return Condition(noise=noise, snr_db=float(snr))
    except ValueError as exc:
        raise ConditionError(f"bad SNR in condition {text!r}") from exc


SINGLE_MEMBER = ("svm-linear",)
FULL_BANK = ("svm-linear", "svm-rbf", "lr")


@dataclass(frozen=True)
class SystemConfig:
    name: str
    recipe: FeatureRecipe
    members: tuple = SINGLE_MEMBER
    rule: VotingRule = VotingRule(kind="or")
    enhance: bool = False


def make_system(name: str) -> SystemConfig:
    """Named presets; the low-dim profile applies unless stated otherwise."""
    n = name.lower()
    presets = {
        "basic1": lambda: SystemConfig("basic1", FeatureRecipe.from_index(1)),
        "basic2": lambda: SystemConfig("basic2", FeatureRecipe.from_index(3)),
        "basic3": lambda: SystemConfig("basic3", FeatureRecipe.from_index(13)),
        "basic4": lambda: SystemConfig(
            "basic4", FeatureRecipe(blocks=[("bfcc", 10), ("plp", 9)])),
        "basic5": lambda: SystemConfig(
            "basic5", FeatureRecipe(blocks=[("plp", 9), ("rplp", 9)])),
        "basic6": lambda: SystemConfig(
            "basic6", FeatureRecipe(blocks=[("bfcc", 10), ("plp", 9),
                                            ("rplp", 9)])),
        "proposed1": lambda: SystemConfig(
            "proposed1", FeatureRecipe.from_index(10), members=FULL_BANK),
        "proposed2": lambda: SystemConfig(
            "proposed2", FeatureRecipe(blocks=[("mfcc", 23), ("bfcc", 23),
                                               ("rplp", 9)]),
            members=FULL_BANK),
        "proposed3": lambda: SystemConfig(
            "proposed3", FeatureRecipe(blocks=[("mfcc", 23), ("bfcc", 23),
                                               ("rplp", 9)]),
            members=FULL_BANK, enhance=True),
    }
    if n not in presets:
        raise ValueError(f"unknown preset {name!r}; "
                         f"choose from {sorted(presets)}")
    return presets[n]()


PRESET_NAMES = ("basic1", "basic2", "basic3", "basic4", "basic5", "basic6",
                "proposed1", "proposed2", "proposed3")


def stable_seed(*parts) -> int:
    """Platform-stable 63-bit seed from a key tuple."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


# --- training -----------------------------------------------------------

@dataclass
class TrainedSpeaker:
    speaker_id: str
    bank: ClassifierBank
    cv_summary: list   # per member: dict with kind, C, sigma, val auc


@dataclass
class TrainedSystem:
    system: SystemConfig
    normalizer: Normalizer
    speakers: dict     # speaker id -> TrainedSpeaker
    seed: int
    frame: FrameConfig


def _extract_train_matrix(manifest, recipe, cfg):
    """Clean enrollment features: (vectors, speaker ids, per-row labels)."""
    rows = []
    owners = []
    for spk in manifest.speakers:
        for path in spk.train:
            buf = load_wav(manifest.resolve(path))
            rows.append(combine(recipe, buf, cfg).values)
            owners.append(spk.id)
    return np.asarray(rows), owners


def _train_one_speaker(task):
    """Worker for one speaker's bank; top level so process pools can pickle it."""
    Xn, labels, spk_id, member_kinds, seed, grid = task
    data = LabeledSet(Xn, labels)
    members = []
    summary = []
    for kind in member_kinds:
        res = cv_select(data, kind, grid=grid,
                        seed=stable_seed(seed, "cv", spk_id, kind))
        members.append(BankMember(model=res.model, score_mean=res.oof_mean,
                                  score_std=res.oof_std))
        summary.append({"member": kind, "C": res.best_c,
                        "sigma": res.best_sigma, "val_auc": res.mean_auc})
    return spk_id, TrainedSpeaker(speaker_id=spk_id,
                                  bank=ClassifierBank(members),
                                  cv_summary=summary)


def train_systems(manifest: CorpusManifest, system: SystemConfig,
                  seed: int = 0, cfg: FrameConfig = FrameConfig(),
                  grid: CvGrid = CvGrid(), jobs: int = 1) -> TrainedSystem:
    """Per-speaker banks fitted on clean enrollment features only.

    jobs > 1 trains speakers in parallel processes; results are merged by
    speaker id so the outcome does not depend on completion order.
    """
    if len(manifest.speakers) < 2:
        raise ManifestError("verification needs >= 2 speakers")
    X, owners = _extract_train_matrix(manifest, system.recipe, cfg)
    norm = fit_normalizer(X)
    Xn = apply_normalizer(norm, X)
    owners_arr = np.asarray(owners)

    tasks = [(Xn, np.where(owners_arr == spk.id, 1.0, -1.0), spk.id,
              system.members, seed, grid) for spk in manifest.speakers]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_train_one_speaker, tasks))
    else:
        results = [_train_one_speaker(t) for t in tasks]
    speakers = dict(sorted(results))
    return TrainedSystem(system=system, normalizer=norm, speakers=speakers,
                         seed=seed, frame=cfg)


# --- test-side feature extraction ---------------------------------------

def _condition_audio(manifest, condition, spk_id, utt_path, seed):
    """Test utterance under a condition; contamination is seeded per trial."""
    buf = load_wav(manifest.resolve(utt_path))
    if condition.noise is None:
        return buf
    try:
        noise = load_wav(manifest.noise_path(condition.noise))
    except ManifestError as exc:
        raise ConditionError(str(exc)) from exc
    mix_seed = stable_seed(seed, "mix", condition.noise,
                           repr(float(condition.snr_db)), spk_id, utt_path)
    return mix_noise_at_snr(buf, noise, SnrSpec(condition.snr_db),
                            seed=mix_seed)


def extract_test_features(manifest, system, condition, seed, cfg,
                          cache=None):
    """Feature vectors for all test utterances under one condition.

    Returns (ids, owners, matrix, seconds_per_utterance). The optional
    cache maps (recipe, enhance, condition, path) -> vector so several
    systems sharing a pipeline do the work once.
    """
    ids, owners, rows, timings = [], [], [], {}
    for spk in manifest.speakers:
        for path in spk.test:
            key = (system.recipe.describe(), system.enhance, condition.name,
                   path)
            start = time.perf_counter()
            if cache is not None and key in cache:
                vec = cache[key]
            else:
                buf = _condition_audio(manifest, condition, spk.id, path, seed)
                if system.enhance:
                    buf = multiband_subtract(buf, cfg)
                vec = combine(system.recipe, buf, cfg).values
                if cache is not None:
                    cache[key] = vec
            ids.append(path)
            owners.append(spk.id)
            rows.append(vec)
            timings[path] = time.perf_counter() - start
    return ids, owners, np.asarray(rows), timings


# --- evaluation ---------------------------------------------------------

@dataclass
class EvalReport:
    config: dict
    conditions: dict               # name -> per-speaker + aggregate results
    timings: dict = field(default_factory=dict, repr=False)  # sidecar only


def _fused_scalar_scores(bank, rule, vectors):
    """Shared-threshold fusion reduces to the k-th largest normalized score."""
    normed = np.stack([m.normalize(score_member(m.model, vectors))
                       for m in bank.members])
    need = rule.threshold(bank.n)
    return np.sort(normed, axis=0)[bank.n - need]


def _native_decisions(bank, rule, vectors):
    votes = np.stack([score_member(m.model, vectors) >= m.native_threshold
                      for m in bank.members])
    return (np.sum(votes, axis=0) >= rule.threshold(bank.n)).astype(int)


def evaluate_systems(manifest: CorpusManifest, trained: TrainedSystem,
                     conditions, cache=None) -> EvalReport:
    """Score every test trial under every condition with the trained banks."""
    system = trained.system
    cfg = trained.frame
    assert trained.normalizer.provenance == "train"
    cond_out = {}
    all_timings = {}
    for cond in conditions:
        if isinstance(cond, str):
            cond = parse_condition(cond)
        ids, owners, X, timings = extract_test_features(
            manifest, system, cond, trained.seed, cfg, cache)
        Xn = apply_normalizer(trained.normalizer, X)
        owners_arr = np.asarray(owners)

        per_speaker = {}
        pooled_scores, pooled_labels = [], []
        for spk_id in sorted(trained.speakers):
            entry = trained.speakers[spk_id]
            labels = np.where(owners_arr == spk_id, 1.0, -1.0)
            scores = _fused_scalar_scores(entry.bank, system.rule, Xn)
            curve = roc_auc(scores, labels)
            counts = confusion_counts(
                _native_decisions(entry.bank, system.rule, Xn), labels)
            per_speaker[spk_id] = {
                "auc": curve.auc,
                "eer": curve.eer,
                "points": [list(p) for p in curve.points],
                "counts": {"tp": counts.tp, "fp": counts.fp,
                           "tn": counts.tn, "fn": counts.fn},
            }
            pooled_scores.append(scores)
            pooled_labels.append(labels)

        pooled = roc_auc(np.concatenate(pooled_scores),
                         np.concatenate(pooled_labels))
        cond_out[cond.name] = {
            "per_speaker": per_speaker,
            "mean_auc": float(np.mean([v["auc"]
                                       for v in per_speaker.values()])),
            "pooled_auc": pooled.auc,
            "n_trials": int(len(ids)),
        }
        all_timings[cond.name] = timings

    config = {
        "system": system.name,
        "recipe": system.recipe.describe(),
        "members": list(system.members),
        "rule": {"kind": system.rule.kind, "k": system.rule.k},
        "enhance": system.enhance,
        "seed": trained.seed,
        "frame": {"frame_len_ms": cfg.frame_len_ms, "hop_ms": cfg.hop_ms,
                  "preemph": cfg.preemph, "nfft": cfg.nfft},
        "sample_rate": manifest.sample_rate,
        "cv": {spk: trained.speakers[spk].cv_summary
               for spk in sorted(trained.speakers)},
    }
    return EvalReport(config=config, conditions=cond_out,
                      timings=all_timings)


def run_protocol(manifest: CorpusManifest, system: SystemConfig, conditions,
                 seed: int = 0, cfg: FrameConfig = FrameConfig(),
                 grid: CvGrid = CvGrid(), cache=None,
                 trained: TrainedSystem = None, jobs: int = 1) -> EvalReport:
    """Train (unless a trained bundle is supplied) and evaluate."""
    if trained is None:
        trained = train_systems(manifest, system, seed=seed, cfg=cfg,
                                grid=grid, jobs=jobs)
    return evaluate_systems(manifest, trained, conditions, cache=cache)


# --- timing -------------------------------------------------------------

def timing_probe(trained: TrainedSystem, utt_path: str,
                 repeats: int = 3) -> dict:
    """Per-stage wall clock for the test phase of one utterance."""
    system = trained.system
    cfg = trained.frame
    bank = trained.speakers[sorted(trained.speakers)[0]].bank
    stages = {"read": [], "denoise": [], "extract": [], "classify": []}
    for _ in range(repeats):
        t0 = time.perf_counter()
        buf = load_wav(utt_path)
        t1 = time.perf_counter()
        if system.enhance:
            buf = multiband_subtract(buf, cfg)
        t2 = time.perf_counter()
        vec = combine(system.recipe, buf, cfg).values
        vec = apply_normalizer(trained.normalizer, vec)
        t3 = time.perf_counter()
        _fused_scalar_scores(bank, system.rule, np.atleast_2d(vec))
        t4 = time.perf_counter()
        stages["read"].append(t1 - t0)
        stages["denoise"].append(t2 - t1)
        stages["extract"].append(t3 - t2)
        stages["classify"].append(t4 - t3)
    out = {"repeats": repeats}
    for name, vals in stages.items():
        out[name] = {"mean": float(np.mean(vals)),
                     "var": float(np.var(vals))}
    out["total"] = float(sum(out[s]["mean"] for s in stages))
    return out


# --- trained-system serialization ---------------------------------------

def trained_to_dict(trained: TrainedSystem) -> dict:
    sysd = trained.system
    return {
        "version": 1,
        "system": {"name": sysd.name,
                   "recipe_blocks": [list(b) for b in sysd.recipe.blocks],
                   "members": list(sysd.members),
                   "rule": {"kind": sysd.rule.kind, "k": sysd.rule.k},
                   "enhance": sysd.enhance},
        "seed": trained.seed,
        "frame": {"frame_len_ms": trained.frame.frame_len_ms,
                  "hop_ms": trained.frame.hop_ms,
                  "preemph": trained.frame.preemph,
                  "nfft": trained.frame.nfft},
        "normalizer": {"mean": trained.normalizer.mean.tolist(),
                       "std": trained.normalizer.std.tolist(),
                       "active": trained.normalizer.active.tolist()},
        "speakers": {
            spk: {"cv_summary": entry.cv_summary,
                  "members": [{"model": model_to_dict(m.model),
                               "score_mean": m.score_mean,
                               "score_std": m.score_std}
                              for m in entry.bank.members]}
            for spk, entry in trained.speakers.items()},
    }


def trained_from_dict(doc: dict) -> TrainedSystem:
    if doc.get("version") != 1:
        raise ValueError(f"unsupported bundle version {doc.get('version')!r}")
    s = doc["system"]
    system = SystemConfig(
        name=s["name"],
        recipe=FeatureRecipe(blocks=[tuple(b) for b in s["recipe_blocks"]]),
        members=tuple(s["members"]),
        rule=VotingRule(kind=s["rule"]["kind"], k=s["rule"]["k"]),
        enhance=s["enhance"])
    f = doc["frame"]
    nd = doc["normalizer"]
    norm = Normalizer(mean=np.asarray(nd["mean"]), std=np.asarray(nd["std"]),
                      active=np.asarray(nd["active"], dtype=bool))
    speakers = {}
    for spk, entry in doc["speakers"].items():
        members = [BankMember(model=model_from_dict(m["model"]),
                              score_mean=m["score_mean"],
                              score_std=m["score_std"])
                   for m in entry["members"]]
        speakers[spk] = TrainedSpeaker(speaker_id=spk,
                                       bank=ClassifierBank(members),
                                       cv_summary=entry["cv_summary"])
    return TrainedSystem(
        system=system, normalizer=norm, speakers=speakers, seed=doc["seed"],
        frame=FrameConfig(frame_len_ms=f["frame_len_ms"], hop_ms=f["hop_ms"],
                          preemph=f["preemph"], nfft=f["nfft"]))
