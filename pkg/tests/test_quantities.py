import math

import numpy as np
import pytest

from discinfo import (
    JointDistribution,
    LogBase,
    NonPositiveProbability,
    Query,
    QueryKind,
    SupportMismatch,
    UnnormalizedWeight,
    Variable,
    ZeroProbabilityEvent,
    cross_entropy,
    diagram,
    entropy,
    evaluate_query,
    expected_marginal_ic,
    information_content,
    kl_divergence,
    marginalize,
    mutual_info,
    power,
    product,
    scale,
    three_cell_distribution,
    triple_mi,
)

from oracle import dist_to_cells, oracle_cross_entropy, oracle_entropy, oracle_mutual_info

LN2 = math.log(2.0)


def fair_coin(name="X"):
    return JointDistribution((Variable(name, ("0", "1")),), [0.5, 0.5])


def xor_triple():
    # Z = X xor Y with X, Y independent fair coins
    t = np.zeros((2, 2, 2))
    for x in (0, 1):
        for y in (0, 1):
            t[x, y, x ^ y] = 0.25
    return JointDistribution(
        (Variable("X", ("0", "1")), Variable("Y", ("0", "1")), Variable("Z", ("0", "1"))),
        t,
    )


def random_dist(rng, n_vars, max_support=3):
    variables = tuple(
        Variable(f"V{i}", tuple(str(k) for k in range(rng.integers(2, max_support + 1))))
        for i in range(n_vars)
    )
    cells = rng.exponential(1.0, size=tuple(v.size for v in variables))
    return JointDistribution(variables, cells / cells.sum())


class TestInformationContent:
    def test_certainty(self):
        assert information_content(1.0) == 0.0

    def test_half(self):
        assert information_content(0.5) == pytest.approx(LN2, abs=1e-15)

    def test_inverse_e(self):
        assert information_content(1.0 / math.e) == pytest.approx(1.0, abs=1e-12)

    def test_bits(self):
        assert information_content(0.5, LogBase.BITS) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(NonPositiveProbability):
            information_content(0.0)

    def test_mass_above_one_is_negative(self):
        assert information_content(2.0) == pytest.approx(-LN2)


class TestEntropy:
    def test_fair_coin(self):
        assert entropy(fair_coin(), ["X"]) == pytest.approx(LN2, abs=1e-12)

    def test_fair_coin_bits(self):
        assert entropy(fair_coin(), ["X"], base=LogBase.BITS) == pytest.approx(1.0)

    def test_three_cell_conditional_on_y1(self):
        d = three_cell_distribution()
        assert entropy(d, ["X"], [("Y", 1)]) == pytest.approx(0.0, abs=1e-12)

    def test_three_cell_golden_pair(self):
        d = three_cell_distribution()
        assert expected_marginal_ic(d, ["X"], {"Y": 1}) == pytest.approx(
            math.log(1.5), abs=1e-9
        )
        assert entropy(d, ["X"]) == pytest.approx(
            math.log(3 * 2 ** (1 / 3) / 2), abs=1e-9
        )

    def test_zero_probability_tie(self):
        d = JointDistribution(
            (Variable("X", ("0", "1")), Variable("Y", ("0", "1"))),
            [0.5, 0.0, 0.5, 0.0],
        )
        with pytest.raises(ZeroProbabilityEvent):
            entropy(d, ["X"], [("Y", 1)])

    def test_variable_repeated(self):
        with pytest.raises(ValueError):
            entropy(fair_coin(), ["X"], ["X"])

    def test_unmentioned_variables_are_marginalized(self):
        d = product(fair_coin("X"), fair_coin("Y"))
        assert entropy(d, ["X"]) == pytest.approx(LN2, abs=1e-12)


class TestCrossEntropyAndKL:
    def test_ce_self_is_entropy(self):
        rng = np.random.default_rng(1)
        d = random_dist(rng, 2)
        heads = list(d.names)
        assert cross_entropy(d, d, heads) == pytest.approx(entropy(d, heads), abs=1e-12)

    def test_ce_scale_rule(self):
        rng = np.random.default_rng(2)
        p, q = random_dist(rng, 1), random_dist(rng, 1)
        q = JointDistribution(p.variables, np.resize(q.probs, p.shape) / np.resize(q.probs, p.shape).sum())
        half_q = scale(q, 0.5)
        assert cross_entropy(p, half_q, ["V0"]) == pytest.approx(
            cross_entropy(p, q, ["V0"]) + LN2, abs=1e-12
        )

    def test_ce_power_rule(self):
        rng = np.random.default_rng(3)
        variables = (Variable("X", ("0", "1", "2")),)
        p = JointDistribution(variables, rng.dirichlet(np.ones(3)))
        q = JointDistribution(variables, rng.dirichlet(np.ones(3)))
        assert cross_entropy(p, power(q, 2.0), ["X"]) == pytest.approx(
            2.0 * cross_entropy(p, q, ["X"]), abs=1e-12
        )

    def test_kl_self_zero(self):
        rng = np.random.default_rng(4)
        d = random_dist(rng, 2)
        assert kl_divergence(d, d, list(d.names)) == pytest.approx(0.0, abs=1e-12)

    def test_kl_nonnegative_for_distributions(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            variables = (Variable("X", ("0", "1", "2")),)
            p = JointDistribution(variables, rng.dirichlet(np.ones(3)))
            raw = rng.dirichlet(np.ones(3)) + 1e-3
            q = JointDistribution(variables, raw / raw.sum())
            assert kl_divergence(p, q, ["X"]) >= -1e-12

    def test_kl_against_doubled_p_meets_mass_bound(self):
        rng = np.random.default_rng(6)
        d = random_dist(rng, 2)
        doubled = scale(d, 2.0)
        value = kl_divergence(d, doubled, list(d.names))
        assert value == pytest.approx(-LN2, abs=1e-12)
        assert value == pytest.approx(information_content(2.0), abs=1e-12)

    def test_support_mismatch(self):
        variables = (Variable("X", ("0", "1")),)
        p = JointDistribution(variables, [0.5, 0.5])
        q = JointDistribution(variables, [1.0, 0.0])
        with pytest.raises(SupportMismatch):
            cross_entropy(p, q, ["X"])

    def test_conditional_ce_left_insensitivity(self):
        rng = np.random.default_rng(7)
        d = random_dist(rng, 2)
        q = JointDistribution(d.variables, rng.dirichlet(np.ones(d.probs.size)).reshape(d.shape))
        x, y = d.names
        conditional_left = cross_entropy(d, q, [x], [y])
        joint_left = cross_entropy(d, q, [x, y], q_head=[x], q_given=[y])
        assert conditional_left == pytest.approx(joint_left, abs=1e-12)

    def test_kl_left_structure_differs(self):
        rng = np.random.default_rng(8)
        d = random_dist(rng, 2)
        q = JointDistribution(d.variables, rng.dirichlet(np.ones(d.probs.size)).reshape(d.shape))
        x, y = d.names
        conditional_left = kl_divergence(d, q, [x], [y])
        joint_left = kl_divergence(d, q, [x, y], q_head=[x], q_given=[y])
        # they differ exactly by the entropy of the conditioning variable
        assert conditional_left - joint_left == pytest.approx(
            entropy(d, [y]), abs=1e-9
        )


class TestMutualInfo:
    def test_independence_gives_zero(self):
        d = product(fair_coin("X"), fair_coin("Y"))
        assert mutual_info(d, [["X"], ["Y"]]) == pytest.approx(0.0, abs=1e-12)

    def test_surprise_equals_kl_of_conditional(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            d = random_dist(rng, 2)
            x, y = d.names
            for yi in range(d.variable(y).size):
                lhs = mutual_info(d, [[(y, yi)], [x]])
                from discinfo import condition

                post = condition(d, {y: yi})
                prior = marginalize(d, {x})
                rhs = kl_divergence(post, prior, [x])
                assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_group_order_matters_when_tied(self):
        d = three_cell_distribution()
        gain = mutual_info(d, [["X"], [("Y", 1)]])
        surprise = mutual_info(d, [[("Y", 1)], ["X"]])
        assert abs(gain - surprise) > 1e-3

    def test_zero_surprise_iff_independence(self):
        # independence => zero surprise for every outcome
        d_ind = product(
            JointDistribution((Variable("X", ("0", "1")),), [0.3, 0.7]),
            JointDistribution((Variable("Y", ("0", "1")),), [0.6, 0.4]),
        )
        for yi in (0, 1):
            assert mutual_info(d_ind, [[("Y", yi)], ["X"]]) == pytest.approx(
                0.0, abs=1e-12
            )
        # dependence (p(x|y) != p(x)) => strictly positive surprise
        d_dep = three_cell_distribution()
        assert mutual_info(d_dep, [[("Y", 1)], ["X"]]) > 1e-3

    def test_mi_as_kl_from_product_of_marginals(self):
        rng = np.random.default_rng(10)
        d = random_dist(rng, 2)
        x, y = d.names
        independent = product(marginalize(d, {x}), marginalize(d, {y}))
        assert mutual_info(d, [[x], [y]]) == pytest.approx(
            kl_divergence(d, independent, [x, y]), abs=1e-9
        )


class TestTripleMI:
    def test_independent_triple_is_zero(self):
        d = product(product(fair_coin("X"), fair_coin("Y")), fair_coin("Z"))
        assert triple_mi(d, [["X"], ["Y"], ["Z"]]) == pytest.approx(0.0, abs=1e-12)

    def test_xor_triple_is_minus_ln2(self):
        assert triple_mi(xor_triple(), [["X"], ["Y"], ["Z"]]) == pytest.approx(
            -LN2, abs=1e-12
        )

    def test_tied_triple_averages_to_untied(self):
        rng = np.random.default_rng(11)
        d = random_dist(rng, 3)
        x, y, z = d.names
        sizes = d.variable(z).size
        weighted = sum(
            prob * triple_mi(d, [[x], [y], [(z, zi)]])
            for zi in range(sizes)
            if (prob := float(marginalize(d, {z}).probs[zi])) > 0
        )
        assert weighted == pytest.approx(triple_mi(d, [[x], [y], [z]]), abs=1e-9)

    def test_needs_three_groups(self):
        with pytest.raises(ValueError):
            triple_mi(xor_triple(), [["X"], ["Y"]])


class TestDiagram:
    def test_independent_table(self):
        d = product(fair_coin("X"), fair_coin("Y"))
        table = diagram(d, {"Y": 1})
        assert table.gain == pytest.approx(0.0, abs=1e-12)
        assert table.surprise == pytest.approx(0.0, abs=1e-12)
        assert table.cond_head == pytest.approx(table.marginal, abs=1e-12)

    def test_three_cell_table(self):
        table = diagram(three_cell_distribution(), {"Y": 1})
        assert table.expected_marginal_ic == pytest.approx(math.log(1.5), abs=1e-9)
        assert table.marginal == pytest.approx(math.log(3 * 2 ** (1 / 3) / 2), abs=1e-9)

    def test_additive_relationships(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            d = random_dist(rng, 2)
            y = d.names[1]
            for yi in range(d.variable(y).size):
                t = diagram(d, {y: yi})
                assert t.joint == pytest.approx(t.cond_head + t.outcome, abs=1e-9)
                assert t.joint == pytest.approx(
                    t.cond_outcome + t.expected_marginal_ic, abs=1e-9
                )
                assert t.gain == pytest.approx(t.marginal - t.cond_head, abs=1e-9)
                assert t.surprise == pytest.approx(t.outcome - t.cond_outcome, abs=1e-9)

    def test_eight_rows(self):
        rows = diagram(three_cell_distribution(), {"Y": 1}).rows()
        assert len(rows) == 8


class TestQuery:
    def test_entropy_query(self):
        q = Query(QueryKind.ENTROPY, (( "X", ),), (("Y", 1),))
        d = three_cell_distribution()
        assert evaluate_query(d, q) == pytest.approx(entropy(d, ["X"], [("Y", 1)]))

    def test_mi_needs_two_groups(self):
        with pytest.raises(ValueError):
            Query(QueryKind.MUTUAL_INFO, (("X",),))

    def test_variable_unique_across_head_and_given(self):
        with pytest.raises(ValueError):
            Query(QueryKind.ENTROPY, (("X",),), (("X", 0),))


class TestAgainstOracle:
    """Randomized comparison with the loop-based reference implementation."""

    def test_entropy_patterns(self):
        rng = np.random.default_rng(100)
        for _ in range(60):
            d = random_dist(rng, int(rng.integers(2, 4)))
            names, sizes, cells = dist_to_cells(d)
            mentioned = list(rng.permutation(names))[: int(rng.integers(1, len(names) + 1))]
            split = int(rng.integers(1, len(mentioned) + 1))
            def spec(ns):
                return [
                    (n, int(rng.integers(d.variable(n).size)) if rng.random() < 0.5 else None)
                    for n in ns
                ]
            head, given = spec(mentioned[:split]), spec(mentioned[split:])
            expected = oracle_entropy(names, sizes, cells, head, given)
            if expected is None:
                with pytest.raises(ZeroProbabilityEvent):
                    entropy(d, head, given)
            else:
                assert entropy(d, head, given) == pytest.approx(expected, abs=1e-10)

    def test_mutual_info_patterns(self):
        rng = np.random.default_rng(101)
        for _ in range(40):
            d = random_dist(rng, 3)
            names, sizes, cells = dist_to_cells(d)
            perm = list(rng.permutation(names))
            def spec(ns):
                return [
                    (n, int(rng.integers(d.variable(n).size)) if rng.random() < 0.5 else None)
                    for n in ns
                ]
            groups = [spec(perm[:1]), spec(perm[1:2])]
            given = spec(perm[2:]) if rng.random() < 0.5 else []
            expected = oracle_mutual_info(names, sizes, cells, groups, given)
            assert expected is not None
            assert mutual_info(d, groups, given) == pytest.approx(expected, abs=1e-10)

    def test_cross_entropy_patterns(self):
        rng = np.random.default_rng(102)
        for _ in range(40):
            d = random_dist(rng, 2)
            q = JointDistribution(
                d.variables, rng.dirichlet(np.ones(d.probs.size)).reshape(d.shape) + 0.0
            )
            names, sizes, p_cells = dist_to_cells(d)
            _, _, q_cells = dist_to_cells(q)
            head = [(names[0], None)]
            given = [(names[1], None)] if rng.random() < 0.5 else []
            expected = oracle_cross_entropy(names, sizes, p_cells, q_cells, head, given)
            got = cross_entropy(d, q, head, given)
            assert got == pytest.approx(expected, abs=1e-10)

    def test_unnormalized_weight_cross_entropy(self):
        rng = np.random.default_rng(103)
        for _ in range(20):
            d = random_dist(rng, 1)
            w_cells = rng.exponential(1.0, size=d.shape) + 1e-3
            w = UnnormalizedWeight(d.variables, w_cells)
            names, sizes, p_cells = dist_to_cells(d)
            q_cells = {idx: float(w.weights[idx]) for idx in np.ndindex(*d.shape)}
            expected = oracle_cross_entropy(
                names, sizes, p_cells, q_cells, [(names[0], None)], []
            )
            got = cross_entropy(d, w, [names[0]])
            assert got == pytest.approx(expected, abs=1e-10)
