"""Exact information functionals on finite joint distributions.

Every functional here is an expectation of an information content, with
support for *tied* variables (fixed to an observed outcome) next to
*untied* ones (averaged over).  The semantics are uniform:

* the expectation runs over the untied variables, conditioned on **all**
  tied outcomes (head side and conditioning side alike);
* the information content argument is the head given the conditioning side,
  evaluated at the sampled / tied outcomes.

For example, with head ``(X, y)`` and conditioning side ``(Z, w)``::

    sum_{x,z} p(x, z | y, w) * IC( p(x, y | z, w) )

Terms contribute zero whenever their expectation weight is zero (the
``0 * log 0 == 0`` convention; cells at or below ``ZERO_CELL`` count as
exact zeros).  Tying to an outcome combination of zero probability raises
:class:`~discinfo.errors.ZeroProbabilityEvent`.

All functions are pure and operate on immutable values, so concurrent use
needs no coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dist import (
    Assignment,
    JointDistribution,
    ZERO_MASS,
    _tensor_of,
)
from .errors import (
    NonPositiveProbability,
    SupportMismatch,
    UnknownVariable,
    ZeroProbabilityEvent,
)

ZERO_CELL = 1e-15  # below this, a cell is an exact zero for 0*log(0)
_LN2 = math.log(2.0)


class LogBase(Enum):
    """Logarithm base for reported values; everything internal is in nats."""

    NATS = "nats"
    BITS = "bits"

    def from_nats(self, value: float) -> float:
        return value if self is LogBase.NATS else value / _LN2


@dataclass(frozen=True)
class Term:
    """One variable reference in a query: untied, or tied to an outcome index."""

    name: str
    outcome: int | None = None

    @property
    def tied(self) -> bool:
        return self.outcome is not None


def as_terms(specs) -> tuple[Term, ...]:
    """Coerce strings / (name, index) pairs / Terms into a Term tuple."""
    out = []
    for spec in specs:
        if isinstance(spec, Term):
            out.append(spec)
        elif isinstance(spec, str):
            out.append(Term(spec))
        else:
            name, idx = spec
            out.append(Term(str(name), None if idx is None else int(idx)))
    return tuple(out)


def information_content(rho: float, base: LogBase = LogBase.NATS) -> float:
    """The code length -log(rho) of an event with probability (or mass) rho."""
    rho = float(rho)
    if rho <= 0:
        raise NonPositiveProbability(f"information content undefined for {rho!r}")
    return base.from_nats(-math.log(rho))


def _subtensor(variables, tensor, names):
    """Marginal of ``tensor`` onto ``names``, keeping the declared axis order."""
    order = [v.name for v in variables]
    wanted = set(names)
    unknown = wanted - set(order)
    if unknown:
        raise UnknownVariable(f"unknown variable(s): {sorted(unknown)}")
    drop = tuple(i for i, n in enumerate(order) if n not in wanted)
    sub = tensor.sum(axis=drop) if drop else tensor
    kept = [n for n in order if n in wanted]
    return sub, kept


def _check_terms(d, terms):
    for t in terms:
        idx = d.index_of(t.name)  # KeyError -> caller converts
        if t.outcome is not None and not 0 <= t.outcome < d.variables[idx].size:
            raise ValueError(
                f"outcome index {t.outcome} out of range for variable {t.name!r}"
            )


def _entropy_nats(d: JointDistribution, head, given) -> float:
    head = as_terms(head)
    given = as_terms(given)
    if not head:
        raise ValueError("entropy query needs at least one head term")
    names = [t.name for t in head] + [t.name for t in given]
    if len(set(names)) != len(names):
        raise ValueError(f"a variable may appear only once per query: {names}")
    try:
        _check_terms(d, head + given)
    except KeyError as exc:
        raise UnknownVariable(str(exc)) from exc

    tensor, kept = _subtensor(d.variables, d.probs, names)
    tied = {t.name: t.outcome for t in head + given if t.outcome is not None}
    given_names = {t.name for t in given}

    ix = tuple(tied[n] if n in tied else slice(None) for n in kept)
    joint = tensor[ix]  # p(untied, tied-outcomes), axes = untied vars in kept order
    mass = float(np.sum(joint))
    if mass <= ZERO_MASS:
        raise ZeroProbabilityEvent(
            f"tied outcomes {tied} have probability {mass!r}"
        )

    untied = [n for n in kept if n not in tied]
    if given:
        head_axes = tuple(i for i, n in enumerate(kept) if n not in given_names)
        cond_marg = tensor.sum(axis=head_axes) if head_axes else tensor
        kept_given = [n for n in kept if n in given_names]
        gix = tuple(tied[n] if n in tied else slice(None) for n in kept_given)
        den = cond_marg[gix]  # over untied conditioning vars, kept order
        if untied:
            shape = tuple(
                d.variables[d.index_of(n)].size
                if (n in given_names and n not in tied)
                else 1
                for n in untied
            )
            den = np.broadcast_to(np.reshape(den, shape), np.shape(joint))
    else:
        den = 1.0

    joint_arr = np.asarray(joint, dtype=float)
    mask = joint_arr > ZERO_CELL
    if not np.any(mask):
        return 0.0
    num = joint_arr[mask]
    den_arr = np.broadcast_to(np.asarray(den, dtype=float), joint_arr.shape)[mask]
    # p(head | given) per expectation point; den >= num > 0 wherever mask holds
    return float(-(num * np.log(num / den_arr)).sum() / mass) + 0.0


def _q_value_arrays(q, q_head, q_given, tied_p, untied_p, point_shape, sizes_p):
    """Evaluate q(head | given) for every expectation point of the p measure.

    Returns an array broadcastable to ``point_shape``.  A q-side term takes
    its value from its own tie, from a p-side tie of the same name, or from
    the p-side expectation point.
    """
    q_names = [t.name for t in q_head] + [t.name for t in q_given]
    if len(set(q_names)) != len(q_names):
        raise ValueError(f"a variable may appear only once per query: {q_names}")
    tensor, kept = _subtensor(q.variables, _tensor_of(q), q_names)
    fixed = {}
    for t in q_head + q_given:
        if t.outcome is not None:
            fixed[t.name] = t.outcome
        elif t.name in tied_p:
            fixed[t.name] = tied_p[t.name]
        elif t.name not in untied_p:
            raise UnknownVariable(
                f"q-side variable {t.name!r} is neither tied nor part of the "
                f"left-hand measure"
            )

    def indexed(arr, arr_names):
        idx = []
        for n in arr_names:
            if n in fixed:
                idx.append(fixed[n])
            else:
                pos = untied_p.index(n)
                shape = [1] * len(untied_p)
                shape[pos] = sizes_p[pos]
                idx.append(np.arange(sizes_p[pos]).reshape(shape))
        return arr[tuple(idx)]

    num = indexed(tensor, kept)
    q_given_names = {t.name for t in q_given}
    if q_given:
        head_axes = tuple(i for i, n in enumerate(kept) if n not in q_given_names)
        cond_marg = tensor.sum(axis=head_axes) if head_axes else tensor
        kept_given = [n for n in kept if n in q_given_names]
        den = indexed(cond_marg, kept_given)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(num, dtype=float) / np.asarray(den, dtype=float)
    else:
        values = np.asarray(num, dtype=float)
    return np.broadcast_to(values, point_shape)


def _cross_entropy_nats(p: JointDistribution, q, p_head, p_given,
                        q_head=None, q_given=None) -> float:
    p_head = as_terms(p_head)
    p_given = as_terms(p_given)
    q_head = p_head if q_head is None else as_terms(q_head)
    q_given = p_given if q_given is None else as_terms(q_given)
    if not p_head or not q_head:
        raise ValueError("cross-entropy query needs head terms on both sides")
    names = [t.name for t in p_head] + [t.name for t in p_given]
    if len(set(names)) != len(names):
        raise ValueError(f"a variable may appear only once per query: {names}")
    try:
        _check_terms(p, p_head + p_given)
    except KeyError as exc:
        raise UnknownVariable(str(exc)) from exc

    tensor, kept = _subtensor(p.variables, p.probs, names)
    tied = {t.name: t.outcome for t in p_head + p_given if t.outcome is not None}
    ix = tuple(tied[n] if n in tied else slice(None) for n in kept)
    joint = np.asarray(tensor[ix], dtype=float)
    mass = float(np.sum(joint))
    if mass <= ZERO_MASS:
        raise ZeroProbabilityEvent(f"tied outcomes {tied} have probability {mass!r}")
    untied = [n for n in kept if n not in tied]
    sizes = [p.variables[p.index_of(n)].size for n in untied]

    q_vals = _q_value_arrays(q, q_head, q_given, tied, untied, joint.shape, sizes)
    mask = joint > ZERO_CELL
    if not np.any(mask):
        return 0.0
    qv = q_vals[mask]
    if np.any(~np.isfinite(qv)) or np.any(qv <= 0):
        raise SupportMismatch(
            "q is zero (or undefined) at an outcome where p has positive mass"
        )
    return float(-(joint[mask] * np.log(qv)).sum() / mass)


def entropy(d: JointDistribution, head, given=(), *, base: LogBase = LogBase.NATS) -> float:
    """Entropy of the head terms given the conditioning terms.

    ``head`` and ``given`` are sequences of variable names (untied) or
    ``(name, outcome_index)`` pairs (tied).  Examples::

        entropy(d, ["X"])                      # H[X]
        entropy(d, ["X"], [("Y", 1)])          # H[X | Y=1]
        entropy(d, [("Y", 1)], ["X"])          # H[y | X] with y = outcome 1
    """
    return base.from_nats(_entropy_nats(d, head, given))


def cross_entropy(p: JointDistribution, q, head, given=(), *,
                  q_head=None, q_given=None, base: LogBase = LogBase.NATS) -> float:
    """Cross-entropy: expectation under p of the information content of q.

    ``q`` may be a :class:`JointDistribution` or an
    :class:`UnnormalizedWeight`; an unconditional q side uses the raw cell
    mass, so scaled weights shift the result by the log of the scale.  The
    expectation always runs over the joint of the left side's head and
    conditioning variables (conditioned on its tied outcomes), which is why
    a conditional left side and the matching joint left side give the same
    cross-entropy.
    """
    return base.from_nats(
        _cross_entropy_nats(p, q, head, given, q_head=q_head, q_given=q_given)
    )


def kl_divergence(p: JointDistribution, q, head, given=(), *,
                  q_head=None, q_given=None, base: LogBase = LogBase.NATS) -> float:
    """KL divergence: cross-entropy minus the entropy of the left side.

    The left side's conditional structure matters here (unlike for the
    cross-entropy): ``kl(p, q, ["X"], ["Y"])`` subtracts H[X|Y] while a
    joint left side would subtract H[X,Y].
    """
    ce = _cross_entropy_nats(p, q, head, given, q_head=q_head, q_given=q_given)
    return base.from_nats(ce - _entropy_nats(p, head, given))


def mutual_info(d: JointDistribution, groups, given=(), *,
                base: LogBase = LogBase.NATS) -> float:
    """Mutual information between two or more term groups.

    Two groups evaluate to ``H[G1 | given] - H[G1 | G2, given]``; more
    groups recurse (``I[A;B;C] = I[A;B] - I[A;B|C]``).  Group order matters
    when outcomes are tied: ``I[(X,), ((Y, 1),)]`` is the information gain
    about X from observing Y=1, while the swapped order is the surprise of
    that outcome, and the two generally differ.
    """
    return base.from_nats(_mi_nats(d, groups, given))


def _mi_nats(d, groups, given) -> float:
    groups = [as_terms(g) for g in groups]
    if len(groups) < 2:
        raise ValueError("mutual information needs at least two groups")
    given = as_terms(given)
    if len(groups) == 2:
        left, right = groups
        return _entropy_nats(d, left, given) - _entropy_nats(d, left, given + right)
    return _mi_nats(d, groups[:-1], given) - _mi_nats(
        d, groups[:-1], given + groups[-1]
    )


def triple_mi(d: JointDistribution, groups, given=(), *,
              base: LogBase = LogBase.NATS) -> float:
    """Triple mutual information ``I[A;B] - I[A;B|C]``; may be negative."""
    groups = [as_terms(g) for g in groups]
    if len(groups) != 3:
        raise ValueError("triple mutual information needs exactly three groups")
    return base.from_nats(_mi_nats(d, groups, given))


def expected_marginal_ic(d: JointDistribution, x_names, observed, *,
                         base: LogBase = LogBase.NATS) -> float:
    """E over p(x | observed) of IC(p(x)): the marginal code length of the
    head group averaged under the conditioned distribution."""
    obs = observed if isinstance(observed, Assignment) else Assignment(tuple(dict(observed).items()))
    x_terms = as_terms(x_names)
    obs_terms = as_terms(obs.bindings)
    return base.from_nats(
        _cross_entropy_nats(d, d, x_terms, obs_terms, q_head=x_terms, q_given=())
    )


class QueryKind(Enum):
    ENTROPY = "entropy"
    CROSS_ENTROPY = "cross_entropy"
    KL = "kl"
    MUTUAL_INFO = "mutual_info"
    TRIPLE_MI = "triple_mi"


@dataclass(frozen=True)
class Query:
    """A declarative information query: term groups, conditioning, and kind.

    ``head`` always holds groups of terms; entropy / cross-entropy / KL
    queries use exactly one group, mutual information two or more, triple
    mutual information exactly three.
    """

    kind: QueryKind
    head: tuple[tuple[Term, ...], ...]
    given: tuple[Term, ...] = ()

    def __post_init__(self):
        head = tuple(as_terms(g) for g in self.head)
        given = as_terms(self.given)
        if not head or any(not g for g in head):
            raise ValueError("head groups must be non-empty")
        names = [t.name for g in head for t in g] + [t.name for t in given]
        if len(set(names)) != len(names):
            raise ValueError("a variable may appear only once across head and given")
        if self.kind in (QueryKind.ENTROPY, QueryKind.CROSS_ENTROPY, QueryKind.KL):
            if len(head) != 1:
                raise ValueError(f"{self.kind.value} takes exactly one head group")
        elif self.kind is QueryKind.MUTUAL_INFO and len(head) < 2:
            raise ValueError("mutual information needs at least two groups")
        elif self.kind is QueryKind.TRIPLE_MI and len(head) != 3:
            raise ValueError("triple mutual information needs exactly three groups")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "given", given)


def evaluate_query(d: JointDistribution, query: Query, q=None, *,
                   base: LogBase = LogBase.NATS) -> float:
    """Evaluate a :class:`Query` against a distribution (and optional q)."""
    if query.kind is QueryKind.ENTROPY:
        return entropy(d, query.head[0], query.given, base=base)
    if query.kind is QueryKind.CROSS_ENTROPY:
        if q is None:
            raise ValueError("cross-entropy query needs a second distribution")
        return cross_entropy(d, q, query.head[0], query.given, base=base)
    if query.kind is QueryKind.KL:
        if q is None:
            raise ValueError("KL query needs a second distribution")
        return kl_divergence(d, q, query.head[0], query.given, base=base)
    if query.kind is QueryKind.TRIPLE_MI:
        return triple_mi(d, query.head, query.given, base=base)
    return mutual_info(d, query.head, query.given, base=base)


@dataclass(frozen=True)
class DiagramTable:
    """The eight quantities relating X and an observed outcome Y=y.

    The additive structure: ``joint = cond_head + outcome``, ``joint =
    cond_outcome + expected_marginal_ic``, ``gain = marginal - cond_head``,
    ``surprise = outcome - cond_outcome = expected_marginal_ic - cond_head``.
    """

    x_names: tuple[str, ...]
    observed_name: str
    observed_index: int
    joint: float  # H[X, y]
    outcome: float  # H[y]
    marginal: float  # H[X]
    gain: float  # I[X; y]
    surprise: float  # I[y; X]
    cond_head: float  # H[X | y]
    cond_outcome: float  # H[y | X]
    expected_marginal_ic: float  # E_{p(x|y)} H[x]

    def rows(self):
        xs = ",".join(self.x_names)
        y = self.observed_name.lower()
        return [
            (f"H[{xs},{y}]", self.joint),
            (f"H[{y}]", self.outcome),
            (f"H[{xs}]", self.marginal),
            (f"I[{xs};{y}]", self.gain),
            (f"I[{y};{xs}]", self.surprise),
            (f"H[{xs}|{y}]", self.cond_head),
            (f"H[{y}|{xs}]", self.cond_outcome),
            (f"E_{{p({xs.lower()}|{y})}}[H[{xs.lower()}]]", self.expected_marginal_ic),
        ]


def diagram(d: JointDistribution, observed, *, base: LogBase = LogBase.NATS) -> DiagramTable:
    """Compute the eight-quantity decomposition for one observed variable.

    ``observed`` binds exactly one variable of ``d``; every other variable
    forms the (joint) X group.
    """
    obs = observed if isinstance(observed, Assignment) else Assignment(tuple(dict(observed).items()))
    if len(obs.bindings) != 1:
        raise ValueError("diagram needs exactly one observed variable")
    (y_name, y_idx), = obs.bindings
    obs.validate_against(d)
    x_names = tuple(n for n in d.names if n != y_name)
    if not x_names:
        raise ValueError("diagram needs at least one unobserved variable")
    y = (y_name, y_idx)
    xs = list(x_names)
    return DiagramTable(
        x_names=x_names,
        observed_name=y_name,
        observed_index=y_idx,
        joint=entropy(d, xs + [y], base=base),
        outcome=entropy(d, [y], base=base),
        marginal=entropy(d, xs, base=base),
        gain=mutual_info(d, [xs, [y]], base=base),
        surprise=mutual_info(d, [[y], xs], base=base),
        cond_head=entropy(d, xs, [y], base=base),
        cond_outcome=entropy(d, [y], xs, base=base),
        expected_marginal_ic=expected_marginal_ic(d, xs, {y_name: y_idx}, base=base),
    )
