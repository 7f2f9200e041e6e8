"""Parallel fusion of classifier decisions by voting, plus an ensemble ROC.

A bank holds the trained members (linear SVM, RBF SVM, LR by default)
together with score-normalization stats taken from their training-fold
predictions. Hard decisions use each member's native operating point; the
ROC comes from sweeping one shared threshold over z-normalized scores.
"""

import math
from dataclasses import dataclass

import numpy as np

from .classify import SvmModel, score_member
from .errors import BadK, OneClassOnly


@dataclass(frozen=True)
class VotingRule:
    """k-out-of-N acceptance; And/Or/Majority are the usual special cases."""

    kind: str
    k: int = 0

    _KINDS = ("and", "or", "majority", "kofn")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"rule kind must be one of {self._KINDS}")
        if self.kind == "kofn" and self.k < 1:
            raise BadK(f"k must be >= 1, got {self.k}")

    def threshold(self, n: int) -> int:
        """Number of member votes required to accept."""
        if self.kind == "and":
            return n
        if self.kind == "or":
            return 1
        if self.kind == "majority":
            return math.ceil((n + 1) / 2)
        if self.k > n:
            raise BadK(f"k={self.k} exceeds bank size {n}")
        return self.k

    @classmethod
    def parse(cls, text: str) -> "VotingRule":
        """'and' | 'or' | 'majority' | 'k-of-n' spellings like '2of3'."""
        t = text.strip().lower()
        if t in ("and", "or", "majority"):
            return cls(kind=t)
        if "of" in t:
            k = int(t.split("of")[0])
            return cls(kind="kofn", k=k)
        raise ValueError(f"cannot parse voting rule {text!r}")


def vote(decisions, rule: VotingRule) -> int:
    """Fuse binary member decisions under the rule."""
    decisions = list(decisions)
    if not all(d in (0, 1) for d in decisions):
        raise ValueError("decisions must be 0/1")
    return int(sum(decisions) >= rule.threshold(len(decisions)))


@dataclass
class BankMember:
    model: object
    score_mean: float   # stats from training-fold (out-of-fold) scores
    score_std: float

    @property
    def native_threshold(self) -> float:
        # SVM decides at the margin sign; LR at probability one half
        return 0.0 if isinstance(self.model, SvmModel) else 0.5

    def normalize(self, scores):
        return (np.asarray(scores, dtype=float) - self.score_mean) / self.score_std


@dataclass
class ClassifierBank:
    members: list

    @property
    def n(self) -> int:
        return len(self.members)


def bank_decide(bank: ClassifierBank, x, rule: VotingRule):
    """Fused 0/1 decision at the native operating points, plus raw scores."""
    scores = [float(score_member(m.model, np.asarray(x, dtype=float)))
              for m in bank.members]
    decisions = [int(s >= m.native_threshold)
                 for s, m in zip(scores, bank.members)]
    return vote(decisions, rule), scores


def ensemble_roc(bank: ClassifierBank, trials, rule: VotingRule):
    """ROC of the fused system under a shared normalized-score threshold.

    Every member's scores are z-normalized with its own training-derived
    stats; a single threshold tau sweeps the union of those values (plus
    +-inf) and the rule fuses the per-member votes score >= tau. Takes a
    LabeledSet of trials; returns (points, normalized_scores) where points
    is the deduplicated staircase sorted by (FPR, TPR) including (0,0)
    and (1,1).
    """
    labels = np.asarray(trials.labels, dtype=float)
    if not (np.any(labels > 0) and np.any(labels < 0)):
        raise OneClassOnly("ROC needs both positive and negative trials")
    vectors = np.asarray(trials.vectors, dtype=float)
    n_pos = int(np.count_nonzero(labels > 0))
    n_neg = int(np.count_nonzero(labels < 0))

    normed = np.stack([m.normalize(score_member(m.model, vectors))
                       for m in bank.members])  # members x trials
    need = rule.threshold(bank.n)

    taus = np.concatenate([[-np.inf], np.unique(normed.ravel()), [np.inf]])
    points = set()
    for tau in taus:
        fused = np.sum(normed >= tau, axis=0) >= need
        tp = int(np.count_nonzero(fused & (labels > 0)))
        fp = int(np.count_nonzero(fused & (labels < 0)))
        points.add((fp / n_neg, tp / n_pos))
    points.add((0.0, 0.0))
    points.add((1.0, 1.0))
    return sorted(points), normed


def bank_trials_to_csv(bank: ClassifierBank, trial_ids, trial_vectors,
                       rule: VotingRule, path) -> None:
    """Audit dump: one row per trial with member scores, votes, decision."""
    with open(path, "w") as fh:
        names = [f"score_{i}" for i in range(bank.n)]
        votes = [f"vote_{i}" for i in range(bank.n)]
        fh.write(",".join(["trial"] + names + votes + ["decision"]) + "\n")
        for tid, x in zip(trial_ids, trial_vectors):
            decision, scores = bank_decide(bank, x, rule)
            per = [int(s >= m.native_threshold)
                   for s, m in zip(scores, bank.members)]
            row = ([str(tid)] + [repr(float(s)) for s in scores]
                   + [str(v) for v in per] + [str(decision)])
            fh.write(",".join(row) + "\n")
