import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discinfo import (
    JointDistribution,
    MissingQDistribution,
    ParseError,
    UnknownVariable,
    Variable,
    entropy,
    evaluate,
    format_expression,
    kl_divergence,
    mutual_info,
    parse,
    product,
    three_cell_distribution,
)
from discinfo.expr import (
    ComparisonNode,
    CrossEntropyNode,
    DiffNode,
    DistSpec,
    EntropyNode,
    ExpectationNode,
    ICNode,
    KLNode,
    MINode,
    ScalarNode,
    ScaledNode,
    SumNode,
    TermSpec,
)

LN2 = math.log(2.0)


def fair_coin(name="X"):
    return JointDistribution((Variable(name, ("0", "1")),), [0.5, 0.5])


def random_dist(rng, names=("X", "Y"), max_support=3):
    variables = tuple(
        Variable(n, tuple(str(k) for k in range(rng.integers(2, max_support + 1))))
        for n in names
    )
    cells = rng.exponential(1.0, size=tuple(v.size for v in variables))
    return JointDistribution(variables, cells / cells.sum())


class TestParse:
    def test_entropy_with_tied_term(self):
        node = parse("H[X, y=1 | Z]")
        assert node == EntropyNode(
            (TermSpec("X"), TermSpec("y", "1")), (TermSpec("Z"),)
        )

    def test_mi_with_tied_given(self):
        node = parse("I[Omega ; Y | x=0]")
        assert node == MINode(
            ((TermSpec("Omega"),), (TermSpec("Y"),)), (TermSpec("x", "0"),)
        )

    def test_missing_bracket(self):
        with pytest.raises(ParseError) as err:
            parse("H[X | Y")
        assert err.value.offset == 7
        assert {",", "]"} <= set(err.value.expected)

    def test_mi_needs_second_group(self):
        with pytest.raises(ParseError) as err:
            parse("I[X]")
        assert ";" in err.value.expected

    def test_uppercase_binding_rejected(self):
        with pytest.raises(ParseError):
            parse("H[X=1]")

    def test_divergence(self):
        node = parse("KL[p(X,Y) || q(X|Y)]")
        assert node == KLNode(
            DistSpec("p", (TermSpec("X"), TermSpec("Y"))),
            DistSpec("q", (TermSpec("X"),), (TermSpec("Y"),)),
        )

    def test_expectation(self):
        node = parse("E_{p(x|y=1)}[H[x]]")
        assert node == ExpectationNode(
            DistSpec("p", (TermSpec("x"),), (TermSpec("y", "1"),)),
            EntropyNode((TermSpec("x"),)),
        )

    def test_expectation_requires_lowercase_head(self):
        with pytest.raises(ParseError):
            parse("E_{p(X)}[H[X]]")

    def test_arithmetic_and_comparison(self):
        node = parse("H[X,Y] == H[X] + H[Y|X]")
        assert isinstance(node, ComparisonNode)
        assert node.op == "=="
        assert isinstance(node.rhs, SumNode)

    def test_scaled_term(self):
        node = parse("0.5 * H[X]")
        assert node == ScaledNode(0.5, EntropyNode((TermSpec("X"),)))

    def test_bare_number(self):
        assert parse("I[X;Y] >= 0") == ComparisonNode(
            MINode(((TermSpec("X"),), (TermSpec("Y"),))), ">=", ScalarNode(0.0)
        )

    def test_ic_literal(self):
        assert parse("IC[0.5]") == ICNode(0.5)

    def test_whitespace_insensitive(self):
        assert parse("H[ X ,y=1|Z ]") == parse("H[X, y=1 | Z]")

    def test_trailing_garbage(self):
        with pytest.raises(ParseError) as err:
            parse("H[X] H[Y]")
        assert err.value.offset == 5

    def test_unexpected_character(self):
        with pytest.raises(ParseError) as err:
            parse("H[X] @ 2")
        assert err.value.offset == 5


class TestParseTotality:
    @settings(max_examples=300, deadline=None, derandomize=True)
    @given(st.text(alphabet="HIEKLC[]|;,=_{}()pq XYZxyz0123456789.*+-", max_size=40))
    def test_never_crashes(self, text):
        try:
            parse(text)
        except ParseError as err:
            assert 0 <= err.offset <= len(text)

    def test_truncations_of_valid_input(self):
        full = "E_{p(x|y=1)}[KL[p(X|y) || q(X)] + 2.5 * I[X; Y; z | w=0]]"
        assert parse(full) is not None
        for cut in range(len(full)):
            prefix = full[:cut]
            try:
                parse(prefix)
            except ParseError as err:
                assert 0 <= err.offset <= len(prefix)

    def test_deep_nesting_is_a_parse_error(self):
        with pytest.raises(ParseError):
            parse("1 * " * 100_000 + "H[X]")


# ---------------------------------------------------------------------------
# Random AST generation for the round-trip property


def _rng_name(rng, upper):
    pool = ["X", "Y", "Z", "W", "Omega"] if upper else ["x", "y", "z", "w", "omega"]
    base = pool[rng.integers(len(pool))]
    if rng.random() < 0.3:
        base += str(rng.integers(1, 4))
    return base


def _rng_termspec(rng):
    if rng.random() < 0.5:
        return TermSpec(_rng_name(rng, upper=True))
    name = _rng_name(rng, upper=False)
    if rng.random() < 0.5:
        return TermSpec(name, str(rng.integers(0, 4)))
    return TermSpec(name)


def _rng_termlist(rng, max_len=3):
    return tuple(_rng_termspec(rng) for _ in range(rng.integers(1, max_len + 1)))


def _rng_distspec(rng):
    letter = "p" if rng.random() < 0.7 else "q"
    given = _rng_termlist(rng) if rng.random() < 0.5 else ()
    return DistSpec(letter, _rng_termlist(rng), given)


def _rng_number(rng):
    return float(round(rng.uniform(0, 8), rng.integers(0, 4)))


def _rng_quantity(rng, depth):
    kind = rng.integers(6)
    if kind == 0:
        given = _rng_termlist(rng) if rng.random() < 0.5 else ()
        return EntropyNode(_rng_termlist(rng), given)
    if kind == 1:
        groups = tuple(_rng_termlist(rng) for _ in range(rng.integers(2, 4)))
        given = _rng_termlist(rng) if rng.random() < 0.4 else ()
        return MINode(groups, given)
    if kind == 2:
        return CrossEntropyNode(_rng_distspec(rng), _rng_distspec(rng))
    if kind == 3:
        return KLNode(_rng_distspec(rng), _rng_distspec(rng))
    if kind == 4:
        return ICNode(_rng_number(rng))
    if depth > 2:
        return ScalarNode(_rng_number(rng))
    measure_head = tuple(
        TermSpec(_rng_name(rng, upper=False)) for _ in range(rng.integers(1, 3))
    )
    measure_given = (
        tuple(
            TermSpec(_rng_name(rng, upper=False), str(rng.integers(0, 4)))
            for _ in range(rng.integers(1, 3))
        )
        if rng.random() < 0.5
        else ()
    )
    letter = "p" if rng.random() < 0.8 else "q"
    return ExpectationNode(
        DistSpec(letter, measure_head, measure_given), _rng_additive(rng, depth + 1)
    )


def _rng_term(rng, depth):
    if rng.random() < 0.2:
        if rng.random() < 0.5:
            return ScalarNode(_rng_number(rng))
        return ScaledNode(_rng_number(rng), _rng_term(rng, depth + 1))
    return _rng_quantity(rng, depth)


def _rng_additive(rng, depth):
    node = _rng_term(rng, depth)
    for _ in range(rng.integers(0, 3)):
        rhs = _rng_term(rng, depth)
        node = SumNode(node, rhs) if rng.random() < 0.5 else DiffNode(node, rhs)
    return node


def random_ast(rng):
    node = _rng_additive(rng, 0)
    if rng.random() < 0.4:
        ops = ["==", "<=", ">=", "!="]
        return ComparisonNode(node, ops[rng.integers(4)], _rng_additive(rng, 0))
    return node


class TestRoundTrip:
    def test_500_random_asts(self):
        rng = np.random.default_rng(42)
        for _ in range(500):
            ast = random_ast(rng)
            text = format_expression(ast)
            assert parse(text) == ast, text

    def test_right_nested_additive_has_no_surface_form(self):
        bad = SumNode(ScalarNode(1.0), SumNode(ScalarNode(2.0), ScalarNode(3.0)))
        with pytest.raises(ValueError):
            format_expression(bad)


class TestEvaluate:
    def test_product_mi_is_zero(self):
        d = product(fair_coin("X"), fair_coin("Y"))
        assert evaluate("I[X;Y]", d) == pytest.approx(0.0, abs=1e-12)

    def test_chain_rule_comparison_is_true(self):
        rng = np.random.default_rng(0)
        d = random_dist(rng)
        assert evaluate("H[X,Y] == H[X] + H[Y|X]", d) is True

    def test_three_cell_expectation(self):
        d = three_cell_distribution()
        assert evaluate("E_{p(x|y=1)}[H[x]]", d) == pytest.approx(
            math.log(1.5), abs=1e-9
        )

    def test_case_insensitive_resolution(self):
        d = three_cell_distribution()
        assert evaluate("H[x=1]", d) == pytest.approx(-math.log(2 / 3), abs=1e-12)

    def test_bare_lowercase_needs_binding(self):
        d = three_cell_distribution()
        with pytest.raises(UnknownVariable):
            evaluate("H[X|y]", d)
        bound = evaluate("H[X|y]", d, bindings={"Y": 1})
        assert bound == pytest.approx(0.0, abs=1e-12)

    def test_missing_q(self):
        d = fair_coin()
        with pytest.raises(MissingQDistribution):
            evaluate("KL[p(X) || q(X)]", d)

    def test_arithmetic(self):
        d = fair_coin()
        assert evaluate("2 * H[X] + IC[0.5] - H[X]", d) == pytest.approx(
            2 * LN2, abs=1e-12
        )

    def test_comparison_tolerances(self):
        d = fair_coin()
        assert evaluate("H[X] == 0.6931471805599453", d) is True
        assert evaluate("H[X] != 0.6931471805599453", d) is False
        assert evaluate("H[X] != 0.69", d) is True

    def test_nested_expectation(self):
        rng = np.random.default_rng(1)
        d = random_dist(rng)
        value = evaluate("E_{p(x)}[E_{p(y|x)}[H[x, y]]]", d)
        assert value == pytest.approx(entropy(d, ["X", "Y"]), abs=1e-9)

    def test_surprise_kl_form(self):
        rng = np.random.default_rng(2)
        d = random_dist(rng)
        assert evaluate("I[y;X] == KL[p(X|y) || p(X)]", d, bindings={"Y": 0}) is True


class TestEvaluatorAgainstDirectCalls:
    def test_200_randomized_pairs(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            d = random_dist(rng, names=("X", "Y", "Z"))
            yi = int(rng.integers(d.variable("Y").size))
            zi = int(rng.integers(d.variable("Z").size))
            pick = rng.integers(4)
            if pick == 0:
                text = f"H[X, y={yi} | Z]"
                direct = entropy(d, ["X", ("Y", yi)], ["Z"])
            elif pick == 1:
                text = f"I[X; Y | z={zi}]"
                direct = mutual_info(d, [["X"], ["Y"]], [("Z", zi)])
            elif pick == 2:
                text = f"KL[p(X|y={yi}) || p(X)]"
                from discinfo import Term

                direct = kl_divergence(
                    d, d, ["X"], [("Y", yi)], q_head=[Term("X")], q_given=()
                )
            else:
                text = "I[X; Y; Z]"
                from discinfo import triple_mi

                direct = triple_mi(d, [["X"], ["Y"], ["Z"]])
            assert evaluate(text, d) == pytest.approx(direct, abs=1e-12)
