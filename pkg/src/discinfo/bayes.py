"""Exact-enumeration Bayesian discriminative models on finite spaces.

A :class:`BayesModel` holds a finite hypothesis space with a prior and a
full likelihood table p(y | x, omega).  Posteriors are computed exactly (in
log space) by enumeration, which makes every identity in this module
testable to float precision: the evidence decomposition of the variational
lower bound, the expected-information-gain form of BALD, the decomposition
of the per-label information gain into a posterior code shift plus the
surprise, and the importance-sampling form of the label entropy.

Models and posteriors are immutable; updates return new values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .dist import JointDistribution, Variable
from .errors import BatchTooLarge, SupportMismatch, ZeroEvidence, ZeroProbabilityEvent

MAX_HYPOTHESES = 10_000
MAX_LABEL_CONFIGS = 10**6
MAX_BATCH = 6
_ZERO = 1e-15  # exact-zero cutoff for 0 * log 0 terms
_EVIDENCE_FLOOR = 1e-300


def _xlogx(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    mask = p > _ZERO
    out[mask] = p[mask] * np.log(p[mask])
    return out


def _entropy_of(p: np.ndarray) -> float:
    return float(-_xlogx(np.asarray(p, dtype=float)).sum())


def _normalized(vec, what: str) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if np.any(vec < 0) or not np.all(np.isfinite(vec)):
        raise ValueError(f"{what} must be finite and non-negative")
    total = vec.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"{what} sums to {total!r}, not 1")
    return vec / total


@dataclass(frozen=True, eq=False)
class BayesModel:
    """Finite hypothesis space, prior, and likelihood table p(y | x, omega)."""

    hypotheses: tuple[str, ...]
    prior: np.ndarray  # (n_omega,)
    inputs: tuple[str, ...]
    labels: tuple[str, ...]
    likelihood: np.ndarray  # (n_omega, n_x, n_y)

    def __post_init__(self):
        hypotheses = tuple(str(h) for h in self.hypotheses)
        inputs = tuple(str(x) for x in self.inputs)
        labels = tuple(str(y) for y in self.labels)
        if len(hypotheses) > MAX_HYPOTHESES:
            raise ValueError(
                f"{len(hypotheses)} hypotheses exceeds the cap of {MAX_HYPOTHESES}"
            )
        for name, seq in (("hypotheses", hypotheses), ("inputs", inputs), ("labels", labels)):
            if not seq:
                raise ValueError(f"{name} must be non-empty")
            if len(set(seq)) != len(seq):
                raise ValueError(f"duplicate {name}")
        prior = _normalized(self.prior, "prior")
        if prior.shape != (len(hypotheses),):
            raise ValueError("prior length must match the hypothesis count")
        lik = np.asarray(self.likelihood, dtype=float)
        expected = (len(hypotheses), len(inputs), len(labels))
        if lik.shape != expected:
            raise ValueError(f"likelihood must have shape {expected}, got {lik.shape}")
        if np.any(lik < 0) or not np.all(np.isfinite(lik)):
            raise ValueError("likelihood entries must be finite and non-negative")
        row_sums = lik.sum(axis=2)
        if np.any(np.abs(row_sums - 1.0) > 1e-6):
            raise ValueError("every likelihood row p(. | x, omega) must sum to 1")
        lik = lik / row_sums[:, :, None]
        prior.setflags(write=False)
        lik.setflags(write=False)
        object.__setattr__(self, "hypotheses", hypotheses)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "likelihood", lik)

    @property
    def n_hypotheses(self) -> int:
        return len(self.hypotheses)

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    def input_index(self, x) -> int:
        return self.inputs.index(str(x)) if not isinstance(x, int) else x

    def label_index(self, y) -> int:
        return self.labels.index(str(y)) if not isinstance(y, int) else y

    def to_json_dict(self) -> dict:
        return {
            "hypotheses": list(self.hypotheses),
            "prior": [float(p) for p in self.prior],
            "inputs": list(self.inputs),
            "labels": list(self.labels),
            "likelihood": {
                h: {
                    x: [float(v) for v in self.likelihood[i, j]]
                    for j, x in enumerate(self.inputs)
                }
                for i, h in enumerate(self.hypotheses)
            },
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "BayesModel":
        hypotheses = [str(h) for h in doc["hypotheses"]]
        inputs = [str(x) for x in doc["inputs"]]
        labels = [str(y) for y in doc["labels"]]
        table = doc["likelihood"]
        lik = np.empty((len(hypotheses), len(inputs), len(labels)))
        for i, h in enumerate(hypotheses):
            rows = table[h]
            for j, x in enumerate(inputs):
                lik[i, j] = np.asarray(rows[x], dtype=float)
        return cls(tuple(hypotheses), np.asarray(doc["prior"], dtype=float),
                   tuple(inputs), tuple(labels), lik)


def load_model(path) -> BayesModel:
    with open(path, "r", encoding="utf-8") as fh:
        return BayesModel.from_json_dict(json.load(fh))


def dump_model(model: BayesModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_json_dict(), fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class Dataset:
    """An ordered list of (input index, label index) observations."""

    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def from_pairs(cls, model: BayesModel, pairs) -> "Dataset":
        resolved = tuple(
            (model.input_index(x), model.label_index(y)) for x, y in pairs
        )
        for xi, yi in resolved:
            if not 0 <= xi < len(model.inputs):
                raise ValueError(f"input index {xi} out of range")
            if not 0 <= yi < model.n_labels:
                raise ValueError(f"label index {yi} out of range")
        return cls(resolved)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True, eq=False)
class Posterior:
    """An exact posterior over hypotheses."""

    probs: np.ndarray

    def __post_init__(self):
        probs = _normalized(self.probs, "posterior")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def entropy(self) -> float:
        return _entropy_of(self.probs)


def _log_likelihood_sum(model: BayesModel, data: Dataset) -> np.ndarray:
    with np.errstate(divide="ignore"):
        loglik = np.log(model.likelihood)
    total = np.zeros(model.n_hypotheses)
    for xi, yi in data.pairs:
        total += loglik[:, xi, yi]
    return total


def posterior(model: BayesModel, data: Dataset | list) -> Posterior:
    """Exact posterior over hypotheses given a dataset (log-space update)."""
    if not isinstance(data, Dataset):
        data = Dataset.from_pairs(model, data)
    with np.errstate(divide="ignore"):
        log_post = np.log(model.prior) + _log_likelihood_sum(model, data)
    return _posterior_from_log(log_post)


def log_evidence(model: BayesModel, data: Dataset | list) -> float:
    """log p(data) by exact enumeration over hypotheses."""
    if not isinstance(data, Dataset):
        data = Dataset.from_pairs(model, data)
    with np.errstate(divide="ignore"):
        log_joint = np.log(model.prior) + _log_likelihood_sum(model, data)
    value = float(logsumexp(log_joint))
    if not np.isfinite(value):
        raise ZeroEvidence("the dataset has probability zero under every hypothesis")
    return value


def _posterior_from_log(log_post: np.ndarray) -> Posterior:
    finite = np.isfinite(log_post)
    if not np.any(finite):
        raise ZeroEvidence("the dataset has probability zero under every hypothesis")
    shifted = log_post - log_post[finite].max()
    probs = np.exp(shifted, where=np.isfinite(shifted), out=np.zeros_like(shifted))
    return Posterior(probs / probs.sum())


def update(model: BayesModel, post: Posterior, x, y) -> Posterior:
    """One exact Bayes step: reweight the posterior by p(y | x, omega)."""
    xi, yi = model.input_index(x), model.label_index(y)
    weights = post.probs * model.likelihood[:, xi, yi]
    total = weights.sum()
    if total <= _EVIDENCE_FLOOR:
        raise ZeroEvidence(
            f"observation (x={model.inputs[xi]!r}, y={model.labels[yi]!r}) has zero "
            f"probability under the current posterior"
        )
    return Posterior(weights / total)


def predictive(model: BayesModel, post: Posterior, x) -> np.ndarray:
    """The posterior-mixture label distribution p(y | x, data)."""
    xi = model.input_index(x)
    return post.probs @ model.likelihood[:, xi, :]


def joint_label_hypothesis(model: BayesModel, post: Posterior, x) -> JointDistribution:
    """The joint over (Omega, Y) at input x -- a bridge to the exact
    information-quantity engine for cross-checking the fast scores."""
    xi = model.input_index(x)
    cells = post.probs[:, None] * model.likelihood[:, xi, :]
    return JointDistribution(
        (Variable("Omega", model.hypotheses), Variable("Y", model.labels)),
        cells,
    )


def bald(model: BayesModel, post: Posterior, x) -> float:
    """Expected information gain about the hypotheses from labelling x:
    the predictive entropy minus the posterior-average conditional entropy."""
    xi = model.input_index(x)
    pred = post.probs @ model.likelihood[:, xi, :]
    cond = -_xlogx(model.likelihood[:, xi, :]).sum(axis=1)
    return _entropy_of(pred) - float(post.probs @ cond)


def csd(model: BayesModel, post: Posterior, x, y) -> float:
    """Realized information gain of the labelled pair (x, y): the posterior
    entropy drop after the exact Bayes step.  May be negative."""
    new_post, _ = _updated(model, post, x, y)
    return post.entropy - new_post.entropy


def surprise(model: BayesModel, post: Posterior, x, y) -> float:
    """KL of the updated posterior from the current one; always >= 0."""
    new_post, _ = _updated(model, post, x, y)
    return _kl_vec(new_post.probs, post.probs)


def _updated(model: BayesModel, post: Posterior, x, y):
    xi, yi = model.input_index(x), model.label_index(y)
    evidence = float(post.probs @ model.likelihood[:, xi, yi])
    if evidence <= _EVIDENCE_FLOOR:
        raise ZeroProbabilityEvent(
            f"label {model.labels[yi]!r} has zero predictive probability at "
            f"x={model.inputs[xi]!r}"
        )
    return Posterior(post.probs * model.likelihood[:, xi, yi] / evidence), evidence


def _kl_vec(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > _ZERO
    if np.any(q[mask] <= 0):
        raise SupportMismatch("q is zero where p has mass")
    return float((p[mask] * (np.log(p[mask]) - np.log(q[mask]))).sum())


@dataclass(frozen=True)
class CsdDecomposition:
    """The information gain split into a posterior code shift plus the
    surprise, with both routes to the conditional label entropy."""

    info_gain: float  # posterior entropy drop (may be negative)
    code_shift: float  # old-code expected length change under the new belief
    surprise: float  # KL(new posterior || old posterior)
    label_entropy_direct: float  # E_new IC(p(y | x, omega))
    label_entropy_importance: float  # same, by importance-weighting the old posterior


def csd_decomposition(model: BayesModel, post: Posterior, x, y) -> CsdDecomposition:
    """Split csd(x, y) as code_shift + surprise and compute the conditional
    label entropy by both the direct and the importance-sampling route.

    ``code_shift`` is ``E_old IC(old) - E_new IC(old)``: how much shorter the
    old posterior code becomes under the updated belief.  It vanishes when
    the current posterior is uniform, in which case the information gain
    equals the surprise exactly.
    """
    new_post, evidence = _updated(model, post, x, y)
    old, new = post.probs, new_post.probs
    mask_new = new > _ZERO
    # IC of each hypothesis under the *old* posterior code
    old_ic = np.zeros_like(old)
    old_ic[old > _ZERO] = -np.log(old[old > _ZERO])
    if np.any(old[mask_new] <= _ZERO):
        raise SupportMismatch("updated posterior has mass outside the old support")
    code_shift = float(old @ old_ic) - float(new @ old_ic)
    surprise_value = _kl_vec(new, old)

    xi, yi = model.input_index(x), model.label_index(y)
    lik = model.likelihood[:, xi, yi]
    with np.errstate(divide="ignore"):
        label_ic = np.where(lik > _ZERO, -np.log(np.maximum(lik, _ZERO)), 0.0)
    direct = float(new @ label_ic)
    importance = float(old @ (lik / evidence * label_ic))
    return CsdDecomposition(
        info_gain=post.entropy - new_post.entropy,
        code_shift=code_shift,
        surprise=surprise_value,
        label_entropy_direct=direct,
        label_entropy_importance=importance,
    )


def batch_score(model: BayesModel, post: Posterior, xs, ys=None, *,
                max_batch: int = MAX_BATCH) -> float:
    """Joint acquisition score for a batch of inputs.

    Without labels this is the joint expected information gain
    I[Omega; Y_1..Y_b | x_1..x_b] over all label configurations; with labels
    it is the realized joint information gain of the labelled batch.
    """
    xis = [model.input_index(x) for x in xs]
    b = len(xis)
    if b < 1:
        raise ValueError("batch must contain at least one input")
    if b > max_batch:
        raise BatchTooLarge(f"batch size {b} exceeds the cap of {max_batch}")
    if ys is not None:
        yis = [model.label_index(y) for y in ys]
        if len(yis) != b:
            raise ValueError("xs and ys must have equal length")
        weights = post.probs.copy()
        for xi, yi in zip(xis, yis):
            weights = weights * model.likelihood[:, xi, yi]
        total = weights.sum()
        if total <= _EVIDENCE_FLOOR:
            raise ZeroProbabilityEvent("the labelled batch has zero probability")
        return post.entropy - _entropy_of(weights / total)

    n_configs = model.n_labels**b
    if n_configs > MAX_LABEL_CONFIGS:
        raise BatchTooLarge(
            f"{n_configs} label configurations exceed the cap of {MAX_LABEL_CONFIGS}"
        )
    # p(y_1..y_b | omega) factorizes given omega; build it over all configs
    config_probs = np.ones((model.n_hypotheses, 1))
    for xi in xis:
        config_probs = (
            config_probs[:, :, None] * model.likelihood[:, xi, None, :]
        ).reshape(model.n_hypotheses, -1)
    pred = post.probs @ config_probs
    cond = -_xlogx(config_probs).sum(axis=1)
    return _entropy_of(pred) - float(post.probs @ cond)


# ---------------------------------------------------------------------------
# Evidence lower bounds on finite spaces


@dataclass(frozen=True)
class ElboVIResult:
    elbo: float
    log_evidence: float
    kl_gap: float  # KL(q || posterior); log_evidence == elbo + kl_gap


def elbo_vi(model: BayesModel, data: Dataset | list, q) -> ElboVIResult:
    """The variational lower bound on log p(data), exactly.

    ``q`` is a distribution over hypotheses.  Returns the bound, the exact
    log evidence, and the KL gap to the exact posterior; the three satisfy
    log_evidence = elbo + kl_gap identically.
    """
    if not isinstance(data, Dataset):
        data = Dataset.from_pairs(model, data)
    q = _normalized(q, "variational distribution")
    post = posterior(model, data)
    if np.any((post.probs > _ZERO) & (q <= 0)):
        raise SupportMismatch("q must be positive wherever the posterior has mass")
    loglik = _log_likelihood_sum(model, data)
    mask = q > _ZERO
    if np.any(~np.isfinite(loglik[mask])) :
        # q puts mass on a hypothesis that rules the data out: the expected
        # log likelihood diverges, so the bound is vacuous
        raise SupportMismatch(
            "q has mass on a hypothesis with zero data likelihood"
        )
    expected_loglik = float(q[mask] @ loglik[mask])
    kl_prior = _kl_vec(q, model.prior)
    elbo = expected_loglik - kl_prior
    return ElboVIResult(
        elbo=elbo,
        log_evidence=log_evidence(model, data),
        kl_gap=_kl_vec(q, post.probs),
    )


@dataclass(frozen=True, eq=False)
class LatentVarModel:
    """A discrete latent-variable model with a variational encoder.

    ``prior_z`` is p(z); ``decoder`` rows are p(x | z); ``encoder`` rows are
    q(z | x).  The model marginal is p(x) = sum_z p(z) p(x | z).
    """

    prior_z: np.ndarray  # (n_z,)
    decoder: np.ndarray  # (n_z, n_x)
    encoder: np.ndarray  # (n_x, n_z)

    def __post_init__(self):
        prior_z = _normalized(self.prior_z, "latent prior")
        decoder = np.asarray(self.decoder, dtype=float)
        encoder = np.asarray(self.encoder, dtype=float)
        if decoder.ndim != 2 or decoder.shape[0] != prior_z.size:
            raise ValueError("decoder must have one row per latent outcome")
        if encoder.shape != (decoder.shape[1], prior_z.size):
            raise ValueError("encoder must have shape (n_x, n_z)")
        for name, table in (("decoder", decoder), ("encoder", encoder)):
            if np.any(table < 0) or not np.all(np.isfinite(table)):
                raise ValueError(f"{name} entries must be finite and non-negative")
            sums = table.sum(axis=1)
            if np.any(np.abs(sums - 1.0) > 1e-6):
                raise ValueError(f"every {name} row must sum to 1")
        decoder = decoder / decoder.sum(axis=1, keepdims=True)
        encoder = encoder / encoder.sum(axis=1, keepdims=True)
        for arr in (prior_z, decoder, encoder):
            arr.setflags(write=False)
        object.__setattr__(self, "prior_z", prior_z)
        object.__setattr__(self, "decoder", decoder)
        object.__setattr__(self, "encoder", encoder)

    @property
    def marginal_x(self) -> np.ndarray:
        return self.prior_z @ self.decoder


@dataclass(frozen=True, eq=False)
class ElboVAEResult:
    """Per-input and expected reconstruction bounds.

    Per input x: ``nll[x] <= reconstruction[x] + kl_prior[x]`` with
    ``gap[x] = KL(q(Z|x) || p(Z|x))`` closing the bound exactly.  The
    expected rows weight the per-x rows by ``x_weights``.
    """

    x_weights: np.ndarray
    nll: np.ndarray  # IC(p(x)) under the model marginal
    reconstruction: np.ndarray  # E_{q(z|x)} IC(p(x|z))
    kl_prior: np.ndarray  # KL(q(Z|x) || p(Z))
    gap: np.ndarray  # KL(q(Z|x) || p(Z|x))
    expected_nll: float
    expected_reconstruction: float
    expected_kl_prior: float
    expected_gap: float


def elbo_vae(lv: LatentVarModel, x_weights=None) -> ElboVAEResult:
    """Evaluate the reconstruction bound of a latent-variable model exactly.

    ``x_weights`` is the distribution over inputs used for the expected
    bound; it defaults to the model marginal p(x), in which case the
    expected negative log likelihood is exactly the entropy of p(x).
    Inputs with zero weight are skipped; a positive weight on an input of
    zero model probability is an error.
    """
    marginal = lv.marginal_x
    if x_weights is None:
        weights = marginal.copy()
    else:
        weights = _normalized(x_weights, "x_weights")
        if weights.size != marginal.size:
            raise ValueError("x_weights length must match the input space")
    n_x = marginal.size
    nll = np.zeros(n_x)
    recon = np.zeros(n_x)
    kl_prior = np.zeros(n_x)
    gap = np.zeros(n_x)
    for xi in range(n_x):
        if weights[xi] <= _ZERO and x_weights is not None:
            continue
        if marginal[xi] <= _ZERO:
            if weights[xi] > _ZERO:
                raise ZeroProbabilityEvent(
                    f"input {xi} has zero model probability but positive weight"
                )
            continue
        q_z = lv.encoder[xi]
        post_z = lv.prior_z * lv.decoder[:, xi] / marginal[xi]
        if np.any((post_z > _ZERO) & (q_z <= 0)):
            raise SupportMismatch(
                f"encoder is zero where the exact latent posterior has mass (x={xi})"
            )
        mask = q_z > _ZERO
        if np.any(lv.decoder[mask, xi] <= 0):
            # q reaches a latent that cannot produce x: the bound diverges
            raise SupportMismatch(
                f"encoder has mass on a latent with zero emission probability (x={xi})"
            )
        nll[xi] = -math.log(marginal[xi])
        recon[xi] = float(-(q_z[mask] * np.log(lv.decoder[mask, xi])).sum())
        kl_prior[xi] = _kl_vec(q_z, lv.prior_z)
        gap[xi] = _kl_vec(q_z, post_z)
    return ElboVAEResult(
        x_weights=weights,
        nll=nll,
        reconstruction=recon,
        kl_prior=kl_prior,
        gap=gap,
        expected_nll=float(weights @ nll),
        expected_reconstruction=float(weights @ recon),
        expected_kl_prior=float(weights @ kl_prior),
        expected_gap=float(weights @ gap),
    )
