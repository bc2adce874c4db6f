import pytest

from projmln import (
    EnumerationCapError,
    ValidationError,
    World,
    enumerate_worlds,
    format_world,
    parse_world,
    restrict,
    stats,
    world_from_atoms,
)
from projmln.worlds import count_groundings, pair_slots, satisfies_universally
from projmln import parse_formula
from helpers import LANG_AR, LANG_R


@pytest.fixture
def fixture_world():
    return world_from_atoms(LANG_R, 3, [("R", (1, 1)), ("R", (1, 2)), ("R", (2, 1))])


class TestWorldFromAtoms:
    def test_fixture_types_and_pairs(self, fixture_world):
        w = fixture_world
        assert w.types == (2, 1, 1)
        assert w.canonical_pair(1, 2) == (1, 2, 4)
        assert w.canonical_pair(1, 3) == (1, 2, 1)
        assert w.canonical_pair(2, 3) == (1, 1, 1)

    def test_all_false_world(self):
        w = world_from_atoms(LANG_R, 2, [])
        assert w.types == (1, 1)
        assert w.canonical_pair(1, 2) == (1, 1, 1)

    def test_constant_out_of_range(self):
        with pytest.raises(ValidationError, match="outside domain"):
            world_from_atoms(LANG_R, 3, [("R", (4, 1))])

    def test_unknown_predicate(self):
        with pytest.raises(ValidationError, match="unknown predicate"):
            world_from_atoms(LANG_R, 2, [("Q", (1,))])

    def test_ground_truth_lookup(self, fixture_world):
        assert fixture_world.ground("R", (1, 1)) is True
        assert fixture_world.ground("R", (2, 1)) is True
        assert fixture_world.ground("R", (3, 1)) is False

    def test_atoms_roundtrip(self, fixture_world):
        atoms = fixture_world.true_atoms()
        assert atoms == {("R", (1, 1)), ("R", (1, 2)), ("R", (2, 1))}
        assert world_from_atoms(LANG_R, 3, atoms) == fixture_world


class TestStats:
    def test_fixture_counts(self, fixture_world):
        st = stats(fixture_world)
        assert st.type_counts == (2, 1)
        assert st.pair_counts == {(1, 1, 1): 1, (1, 2, 1): 1, (1, 2, 4): 1}

    def test_all_false_n2(self):
        st = stats(world_from_atoms(LANG_R, 2, []))
        assert st.type_counts == (2, 0)
        assert st.pair_counts == {(1, 1, 1): 1}

    @pytest.mark.parametrize("lang,n", [(LANG_R, 2), (LANG_R, 3), (LANG_AR, 2)])
    def test_invariants_exhaustive(self, lang, n):
        for w in enumerate_worlds(lang, n):
            st = stats(w)
            assert sum(st.type_counts) == n
            assert sum(st.pair_counts.values()) == n * (n - 1) // 2
            by_pair = {}
            for (i, j, l), c in st.pair_counts.items():
                assert i <= j
                if i == j:
                    assert l <= lang.dual(l)
                by_pair[(i, j)] = by_pair.get((i, j), 0) + c
            for (i, j), total in by_pair.items():
                assert total == pair_slots(st.type_counts, i, j)


class TestRestrict:
    def test_example_table(self):
        # a->1, b->2, c->3: loops on 1 and 2, mutual edges 1-2 and asymmetric ones to 3
        w = world_from_atoms(
            LANG_R,
            3,
            [
                ("R", (1, 1)),
                ("R", (1, 2)),
                ("R", (2, 1)),
                ("R", (2, 2)),
                ("R", (3, 1)),
                ("R", (3, 2)),
            ],
        )
        small = restrict(w, [1, 2])
        assert small.true_atoms() == {("R", (1, 1)), ("R", (1, 2)), ("R", (2, 1)), ("R", (2, 2))}

    def test_identity(self, fixture_world):
        assert restrict(fixture_world, [1, 2, 3]) == fixture_world

    def test_composition(self, fixture_world):
        outer = [3, 1, 2]
        inner = [2, 1]
        lhs = restrict(restrict(fixture_world, outer), inner)
        rhs = restrict(fixture_world, [outer[i - 1] for i in inner])
        assert lhs == rhs

    def test_reordering_dualizes(self):
        w = world_from_atoms(LANG_R, 2, [("R", (1, 2))])
        flipped = restrict(w, [2, 1])
        assert flipped.true_atoms() == {("R", (2, 1))}

    def test_errors(self, fixture_world):
        with pytest.raises(ValidationError):
            restrict(fixture_world, [])
        with pytest.raises(ValidationError):
            restrict(fixture_world, [1, 1])
        with pytest.raises(ValidationError):
            restrict(fixture_world, [0, 1])

    def test_restrict_commutes_with_stats(self, fixture_world):
        st = stats(restrict(fixture_world, [1, 2]))
        assert st.pair_counts == {(1, 2, 4): 1}


class TestEnumerateWorlds:
    def test_counts(self):
        assert sum(1 for _ in enumerate_worlds(LANG_R, 2)) == 16
        assert sum(1 for _ in enumerate_worlds(LANG_AR, 2)) == 64

    def test_distinct(self):
        seen = set(enumerate_worlds(LANG_R, 2))
        assert len(seen) == 16

    def test_cap(self):
        with pytest.raises(EnumerationCapError):
            enumerate_worlds(LANG_R, 6)
        # override allows it (36 atoms; don't iterate, just construct)
        enumerate_worlds(LANG_R, 6, max_atoms=36)

    def test_roundtrip_via_atoms(self):
        for w in enumerate_worlds(LANG_AR, 2):
            assert world_from_atoms(LANG_AR, 2, w.true_atoms()) == w


class TestGroundEvaluation:
    def test_count_groundings_two_variables(self, fixture_world):
        f = parse_formula("R(x,y)", LANG_R)
        assert count_groundings(f, fixture_world) == 3  # R(1,1), R(1,2), R(2,1)

    def test_count_groundings_single_variable(self, fixture_world):
        f = parse_formula("R(x,x)", LANG_R)
        assert count_groundings(f, fixture_world) == 1

    def test_satisfies_universally(self):
        f = parse_formula("R(x,y) -> R(y,x)", LANG_R)
        sym = world_from_atoms(LANG_R, 2, [("R", (1, 2)), ("R", (2, 1))])
        asym = world_from_atoms(LANG_R, 2, [("R", (1, 2))])
        assert satisfies_universally(f, sym)
        assert not satisfies_universally(f, asym)


class TestWorldFile:
    def test_roundtrip(self, fixture_world):
        text = format_world(fixture_world)
        assert parse_world(text, LANG_R) == fixture_world

    def test_parse_with_comments(self):
        text = "# a world\ndomain 2\nR(1,2)  # edge\n"
        w = parse_world(text, LANG_R)
        assert w.true_atoms() == {("R", (1, 2))}

    def test_missing_domain(self):
        with pytest.raises(Exception):
            parse_world("R(1,2)\n", LANG_R)
