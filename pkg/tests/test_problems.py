import pytest

import limitdp.corpus as corpus
from limitdp.errors import InvalidInstanceError, UnknownStateError
from limitdp.problems import (Play, Problem, reach_closure, reach_exact,
                              reach_within, successors)


@pytest.fixture
def cycle():
    return corpus.example1_cycle()


@pytest.fixture
def line10():
    return corpus.example3_line(10)


class TestConstruction:
    def test_rejects_empty_successors(self):
        with pytest.raises(InvalidInstanceError):
            Problem(states=("a",), successors_map={"a": ()}, rewards={"a": 0.0})

    def test_rejects_out_of_range_reward(self):
        with pytest.raises(InvalidInstanceError):
            Problem(states=("a",), successors_map={"a": ("a",)}, rewards={"a": 1.5})

    def test_rejects_unknown_successor(self):
        with pytest.raises(InvalidInstanceError):
            Problem(states=("a",), successors_map={"a": ("b",)}, rewards={"a": 0.0})

    def test_json_round_trip(self, cycle):
        assert Problem.from_json(cycle.to_json()).successors_map == cycle.successors_map


class TestSuccessors:
    def test_cycle(self, cycle):
        assert successors(cycle, "z0") == ("z1",)
        assert successors(cycle, "z1") == ("z0",)

    def test_line_shift(self, line10):
        assert successors(line10, 0) == (1,)
        assert successors(line10, -7) == (-6,)

    def test_tree_root(self):
        tree = corpus.example2_tree(5, 10)
        assert set(successors(tree, (0, 0))) == {(n, 1) for n in range(1, 6)}

    def test_unknown_state(self, cycle):
        with pytest.raises(UnknownStateError):
            successors(cycle, "z9")


class TestReach:
    def test_exact_cycle(self, cycle):
        assert reach_exact(cycle, "z0", 0) == {"z0"}
        assert reach_exact(cycle, "z0", 2) == {"z0"}
        assert reach_exact(cycle, "z0", 3) == {"z1"}

    def test_exact_line(self, line10):
        assert reach_exact(line10, 0, 5) == {5}

    def test_within(self, cycle, line10):
        assert reach_within(cycle, "z0", 0) == {"z0"}
        assert reach_within(cycle, "z0", 1) == {"z0", "z1"}
        assert reach_within(line10, 0, 3) == {0, 1, 2, 3}

    def test_closure_cycle_saturates(self, cycle):
        closure, saturated = reach_closure(cycle, "z0")
        assert closure == {"z0", "z1"} and saturated

    def test_closure_line_hits_cap(self, line10):
        closure, saturated = reach_closure(line10, 0)
        assert closure == set(range(0, 11)) and not saturated

    def test_within_monotone_and_below_closure(self):
        p = corpus.random_problem(8, 3, seed=5)
        z = p.states[0]
        closure, _ = reach_closure(p, z)
        previous = frozenset()
        for m in range(10):
            current = reach_within(p, z, m)
            assert previous <= current <= closure
            previous = current

    def test_exact_recurrence(self):
        p = corpus.random_problem(7, 3, seed=11)
        z = p.states[0]
        for n in range(6):
            expanded = {z2 for z1 in reach_exact(p, z, n)
                        for z2 in successors(p, z1)}
            assert reach_exact(p, z, n + 1) == expanded


class TestPlay:
    def test_feasible(self, cycle):
        play = Play.from_states(cycle, "z0", ["z1", "z0", "z1"])
        assert len(play) == 3

    def test_infeasible(self, cycle):
        with pytest.raises(InvalidInstanceError):
            Play.from_states(cycle, "z0", ["z0"])

    def test_empty_prefix_rejected(self):
        with pytest.raises(InvalidInstanceError):
            Play(origin="z0", prefix=())
