"""Desk-scale pool-based active-learning / core-set simulator.

Each step scores every remaining pool candidate with the configured
acquisition function, acquires the top scorer(s) (ties broken by lowest
pool index), performs an exact posterior update, and records evaluation
metrics.  Runs are deterministic given the config and seed; the CSV output
is byte-identical across repeats.

Label-aware acquisitions (csd, batch_csd) see the pool labels; bald only
ever receives the input, so it cannot peek at labels by construction.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from . import bayes
from .bayes import BayesModel, Posterior
from .errors import ZeroEvidence, ZeroProbabilityEvent

logger = logging.getLogger(__name__)

ACQUISITIONS = ("uniform", "bald", "csd", "batch_bald", "batch_csd")

CSV_HEADER = "step,x,y,score,posterior_entropy,accuracy,logloss"


@dataclass(frozen=True)
class SimConfig:
    """A declarative active-learning experiment.

    ``noise_rate`` flips that fraction of pool labels (chosen by the run
    seed) before the run starts -- the mislabeling ablation.  The
    evaluation set is never touched by noise.
    """

    model: BayesModel
    pool: tuple[tuple[int, int], ...]  # (input index, label index)
    eval_set: tuple[tuple[int, int], ...]
    initial: tuple[tuple[int, int], ...] = ()
    acquisition: str = "bald"
    batch_size: int = 1
    steps: int = 10
    seed: int = 0
    noise_rate: float = 0.0

    def __post_init__(self):
        if self.acquisition not in ACQUISITIONS:
            raise ValueError(
                f"acquisition must be one of {ACQUISITIONS}, got {self.acquisition!r}"
            )
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must lie in [0, 1]")
        if not self.pool:
            raise ValueError("pool must be non-empty")
        if not self.eval_set:
            raise ValueError("eval_set must be non-empty")
        m = self.model
        for name in ("pool", "eval_set", "initial"):
            pairs = tuple(
                (m.input_index(x), m.label_index(y)) for x, y in getattr(self, name)
            )
            object.__setattr__(self, name, pairs)

    @classmethod
    def from_json_dict(cls, doc: dict, *, model: BayesModel | None = None) -> "SimConfig":
        if model is None:
            spec = doc["model"]
            model = bayes.load_model(spec) if isinstance(spec, str) else (
                BayesModel.from_json_dict(spec)
            )
        return cls(
            model=model,
            pool=tuple(tuple(p) for p in doc["pool"]),
            eval_set=tuple(tuple(p) for p in doc["eval"]),
            initial=tuple(tuple(p) for p in doc.get("initial", ())),
            acquisition=doc.get("acquisition", "bald"),
            batch_size=int(doc.get("batch_size", 1)),
            steps=int(doc.get("steps", 10)),
            seed=int(doc.get("seed", 0)),
            noise_rate=float(doc.get("noise_rate", 0.0)),
        )


def load_config(path) -> SimConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return SimConfig.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class SimRow:
    step: int
    x: str
    y: str
    score: float
    posterior_entropy: float
    accuracy: float
    logloss: float


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    rows: tuple[SimRow, ...]

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.step},{r.x},{r.y},{r.score!r},{r.posterior_entropy!r},"
                f"{r.accuracy!r},{r.logloss!r}"
            )
        return "\n".join(lines) + "\n"

    def acquisitions_to_accuracy(self, target: float = 1.0) -> int | None:
        """1-based count of acquisitions until eval accuracy first reaches
        ``target``; None if it never does."""
        for i, row in enumerate(self.rows):
            if row.accuracy >= target:
                return i + 1
        return None


def _evaluate(model: BayesModel, post: Posterior, eval_set) -> tuple[float, float]:
    correct = 0
    total_ll = 0.0
    for xi, yi in eval_set:
        pred = bayes.predictive(model, post, xi)
        if int(np.argmax(pred)) == yi:  # argmax ties break to the lowest index
            correct += 1
        p = pred[yi]
        total_ll += -np.log(p) if p > 0 else np.inf
    n = len(eval_set)
    return correct / n, total_ll / n


def _apply_label_noise(pool, n_labels: int, rate: float, rng) -> tuple:
    if rate <= 0.0:
        return tuple(pool)
    n_flip = int(round(rate * len(pool)))
    if n_flip == 0:
        return tuple(pool)
    idx = rng.choice(len(pool), size=n_flip, replace=False)
    noisy = list(pool)
    for i in sorted(int(j) for j in idx):
        xi, yi = noisy[i]
        if n_labels == 2:
            flipped = 1 - yi
        else:
            others = [y for y in range(n_labels) if y != yi]
            flipped = int(others[rng.integers(len(others))])
        noisy[i] = (xi, flipped)
    return tuple(noisy)


def _select_batch(model, post, remaining, pool, cfg, rng):
    """Return [(pool index, score), ...] for one step, in acquisition order."""
    b = min(cfg.batch_size, len(remaining))
    if cfg.acquisition == "uniform":
        scores = {i: float(rng.random()) for i in remaining}
        ranked = sorted(remaining, key=lambda i: (-scores[i], i))
        return [(i, scores[i]) for i in ranked[:b]]
    if cfg.acquisition == "bald":
        scores = {i: bayes.bald(model, post, pool[i][0]) for i in remaining}
        ranked = sorted(remaining, key=lambda i: (-scores[i], i))
        return [(i, scores[i]) for i in ranked[:b]]
    if cfg.acquisition == "csd":
        scores = {}
        for i in remaining:
            xi, yi = pool[i]
            try:
                scores[i] = bayes.csd(model, post, xi, yi)
            except ZeroProbabilityEvent:
                scores[i] = -np.inf
        ranked = sorted(remaining, key=lambda i: (-scores[i], i))
        return [(i, scores[i]) for i in ranked[:b]]
    # greedy joint scoring for the batch variants
    chosen: list[tuple[int, float]] = []
    candidates = list(remaining)
    for _ in range(b):
        best = None
        for i in candidates:
            xs = [pool[j][0] for j, _ in chosen] + [pool[i][0]]
            if cfg.acquisition == "batch_bald":
                score = bayes.batch_score(model, post, xs)
            else:
                ys = [pool[j][1] for j, _ in chosen] + [pool[i][1]]
                try:
                    score = bayes.batch_score(model, post, xs, ys)
                except ZeroProbabilityEvent:
                    score = -np.inf
            if best is None or score > best[1]:
                best = (i, score)
        chosen.append(best)
        candidates.remove(best[0])
    return chosen


def run_sim(cfg: SimConfig) -> SimResult:
    """Run the experiment; deterministic given the config (incl. its seed)."""
    rng = np.random.default_rng(cfg.seed)
    model = cfg.model
    pool = _apply_label_noise(cfg.pool, model.n_labels, cfg.noise_rate, rng)
    post = bayes.posterior(model, list(cfg.initial))
    remaining = list(range(len(pool)))
    rows: list[SimRow] = []
    for step in range(1, cfg.steps + 1):
        if not remaining:
            break
        batch = _select_batch(model, post, remaining, pool, cfg, rng)
        for pool_idx, score in batch:
            remaining.remove(pool_idx)
            xi, yi = pool[pool_idx]
            try:
                post = bayes.update(model, post, xi, yi)
            except ZeroEvidence:
                logger.warning(
                    "step %d: skipped (x=%s, y=%s): zero likelihood under every "
                    "hypothesis", step, model.inputs[xi], model.labels[yi],
                )
            accuracy, logloss = _evaluate(model, post, cfg.eval_set)
            rows.append(
                SimRow(
                    step=step,
                    x=model.inputs[xi],
                    y=model.labels[yi],
                    score=float(score),
                    posterior_entropy=post.entropy,
                    accuracy=accuracy,
                    logloss=logloss,
                )
            )
    return SimResult(config=cfg, rows=tuple(rows))


def threshold_task(n_points: int = 32, true_threshold: int | None = None, *,
                   label_flip: float = 0.02, seed: int = 0):
    """The default synthetic task: 1-D threshold classifiers on a grid.

    Hypotheses are thresholds t in 0..n_points; hypothesis t labels input x
    as 1 iff x >= t, softened by ``label_flip`` likelihood noise.  Returns
    ``(model, pool, eval_set)`` where the pool and evaluation set are the
    full grid labelled by the true threshold (no label noise -- pass
    ``noise_rate`` to the config for the mislabeling ablation).
    """
    if not 0.0 < label_flip < 0.5:
        raise ValueError("label_flip must lie in (0, 0.5)")
    rng = np.random.default_rng(seed)
    if true_threshold is None:
        true_threshold = int(rng.integers(1, n_points))
    if not 0 < true_threshold <= n_points:
        raise ValueError("true_threshold must lie in 1..n_points")
    inputs = tuple(str(i) for i in range(n_points))
    hypotheses = tuple(f"t{t}" for t in range(n_points + 1))
    lik = np.empty((n_points + 1, n_points, 2))
    for t in range(n_points + 1):
        for x in range(n_points):
            p_one = 1.0 - label_flip if x >= t else label_flip
            lik[t, x] = (1.0 - p_one, p_one)
    model = BayesModel(
        hypotheses=hypotheses,
        prior=np.full(n_points + 1, 1.0 / (n_points + 1)),
        inputs=inputs,
        labels=("0", "1"),
        likelihood=lik,
    )
    labelled = tuple((x, 1 if x >= true_threshold else 0) for x in range(n_points))
    return model, labelled, labelled
