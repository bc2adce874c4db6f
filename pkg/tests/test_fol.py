import pytest

from projmln import (
    Atom,
    Distinct,
    Implies,
    LiftedInterpretation,
    ParseError,
    ValidationError,
    evaluate_lifted,
    n_ij,
    n_ijl,
    parse_formula,
    parse_language,
)
from helpers import LANG_AR, LANG_R, CLAUSE_POOL


class TestParseLanguage:
    def test_single_binary(self):
        lang = parse_language("predicate R/2")
        assert lang.num_one_types == 2
        assert lang.num_two_tables == 4

    def test_unary_and_binary(self):
        lang = parse_language("predicate A/1\npredicate R/2")
        assert lang.num_one_types == 4
        assert lang.num_two_tables == 4

    def test_arity_error(self):
        with pytest.raises(ParseError):
            parse_language("predicate A/3")

    def test_duplicate_name(self):
        with pytest.raises(ParseError):
            parse_language("predicate A/1\npredicate A/2")

    def test_comments_and_sorting(self):
        lang = parse_language("# vocab\npredicate Z/2\npredicate B/1  # trailing\n")
        assert [name for name, _ in lang.predicates] == ["B", "Z"]

    def test_syntax_error_has_line(self):
        with pytest.raises(ParseError) as err:
            parse_language("predicate A/1\npredicat B/1")
        assert err.value.line == 2

    def test_empty_language(self):
        lang = parse_language("")
        assert lang.num_one_types == 1
        assert lang.num_two_tables == 1
        assert len(lang.one_types) == 1


class TestEnumerations:
    def test_one_types_r(self):
        types = LANG_R.one_types
        assert len(types) == 2
        assert types[0].bits == (False,)  # index 1: no loop
        assert types[1].bits == (True,)

    def test_one_type_index_bit_order(self):
        # A(x) is the least significant bit, so index 4 has both atoms true
        types = LANG_AR.one_types
        assert types[3].index == 4
        assert types[3].bits == (True, True)
        assert types[1].bits == (True, False)  # index 2: A without loop

    def test_two_tables_dual_map(self):
        assert [t.dual_index for t in LANG_R.two_tables] == [1, 3, 2, 4]

    def test_no_binary_predicates(self):
        lang = parse_language("predicate A/1")
        assert lang.num_two_tables == 1
        assert lang.two_tables[0].dual_index == 1

    def test_dual_is_involution(self):
        for lang in (LANG_R, LANG_AR, parse_language("predicate R/2\npredicate S/2")):
            for table in lang.two_tables:
                assert lang.dual(table.dual_index) == table.index

    def test_counts_match_language(self):
        for lang in (LANG_R, LANG_AR, parse_language("predicate R/2\npredicate S/2")):
            assert len(lang.one_types) == lang.num_one_types
            assert len(lang.two_tables) == lang.num_two_tables


class TestParseFormula:
    def test_implication(self):
        f = parse_formula("R(x,y) -> R(y,x)", LANG_R)
        assert isinstance(f, Implies)
        assert f.left == Atom("R", ("x", "y"))

    def test_conjunction(self):
        f = parse_formula("A(x) & R(x,y)", LANG_AR)
        assert f.left == Atom("A", ("x",))

    def test_unknown_variable(self):
        with pytest.raises(ParseError, match="variable z"):
            parse_formula("R(x,z)", LANG_R)

    def test_unknown_predicate(self):
        with pytest.raises(ParseError, match="unknown predicate"):
            parse_formula("Q(x)", LANG_R)

    def test_arity_mismatch(self):
        with pytest.raises(ParseError, match="arity"):
            parse_formula("R(x)", LANG_R)

    def test_precedence(self):
        # ! binds tighter than &, & tighter than |, | tighter than ->
        f = parse_formula("!R(x,x) & R(x,y) | R(y,x) -> R(x,y)", LANG_R)
        assert isinstance(f, Implies)

    def test_right_associative_implication(self):
        f = parse_formula("R(x,y) -> R(y,x) -> R(x,x)", LANG_R)
        assert isinstance(f.right, Implies)

    def test_distinct_marker(self):
        f = parse_formula("R(x,y) & x != y", LANG_R)
        assert f.right == Distinct("x", "y")

    def test_roundtrip_through_str(self):
        for lang in (LANG_R, LANG_AR):
            for text in CLAUSE_POOL[lang]:
                f = parse_formula(text, lang)
                assert parse_formula(str(f), lang) == f


class TestEvaluateLifted:
    def tau(self, lang, **values):
        base = {}
        for name, args in lang.single_var_atoms:
            base[(name, args)] = False
            base[(name, tuple("y" for _ in args))] = False
        for name, args in lang.two_var_atoms:
            base[(name, args)] = False
        for key, value in values.items():
            pred, _, rest = key.partition("_")
            base[(pred, tuple(rest))] = value
        return LiftedInterpretation(base)

    def test_failing_implication(self):
        tau = self.tau(LANG_R, R_xy=True)
        assert evaluate_lifted(parse_formula("R(x,y) -> R(y,x)", LANG_R), tau) is False

    def test_tautology(self):
        f = parse_formula("R(x,y) | !R(x,y)", LANG_R)
        for bit in (True, False):
            assert evaluate_lifted(f, self.tau(LANG_R, R_xy=bit)) is True

    def test_conjunction_true(self):
        tau = self.tau(LANG_AR, A_x=True, R_xy=True)
        assert evaluate_lifted(parse_formula("A(x) & R(x,y)", LANG_AR), tau) is True

    def test_distinct_is_true_until_substituted(self):
        tau = self.tau(LANG_R)
        marker = Distinct()
        assert evaluate_lifted(marker, tau) is True
        assert evaluate_lifted(marker.substitute({"y": "x"}), tau) is False


class TestNijl:
    def test_symmetric_clause_mutual_table(self):
        f = parse_formula("R(x,y) -> R(y,x)", LANG_R)
        i = j = LANG_R.one_types[0]
        assert n_ijl(f, LANG_R, i, j, LANG_R.two_tables[3]) == 1  # both directions
        assert n_ijl(f, LANG_R, i, j, LANG_R.two_tables[1]) == 0  # asymmetric

    def test_tautology_counts_everything(self):
        f = parse_formula("R(x,y) | !R(x,y)", LANG_R)
        for i in LANG_R.one_types:
            for j in LANG_R.one_types:
                assert n_ij(f, LANG_R, i, j) == LANG_R.num_two_tables
                for l in LANG_R.two_tables:
                    assert n_ijl(f, LANG_R, i, j, l) == 1

    def test_result_is_zero_or_one(self):
        for lang in (LANG_R, LANG_AR):
            for text in CLAUSE_POOL[lang]:
                f = parse_formula(text, lang)
                for i in lang.one_types:
                    for j in lang.one_types:
                        for l in lang.two_tables:
                            assert n_ijl(f, lang, i, j, l) in (0, 1)

    def test_swap_symmetry(self):
        # the closure over both variables is symmetric, so swapping the types
        # and dualizing the table leaves the count unchanged
        for lang in (LANG_R, LANG_AR):
            for text in CLAUSE_POOL[lang]:
                f = parse_formula(text, lang)
                for i in lang.one_types:
                    for j in lang.one_types:
                        for l in lang.two_tables:
                            dual = lang.two_tables[l.dual_index - 1]
                            assert n_ijl(f, lang, i, j, l) == n_ijl(f, lang, j, i, dual)


class TestLanguageValidation:
    def test_arity_zero_rejected(self):
        from projmln import Language

        with pytest.raises(ValidationError):
            Language((("P", 0),))

    def test_formula_validation_catches_bad_arity(self):
        from projmln.fol import validate_formula

        with pytest.raises(ValidationError):
            validate_formula(Atom("R", ("x",)), LANG_R)
