import pytest

from qjsd.exceptions import ValidationError
from qjsd.explore import explore, objective, replay_candidate
from qjsd.formats import matrix_from_record


@pytest.mark.parametrize("mode", ["neglog-cone", "qjsd-n3"])
def test_exploration_respects_budget_and_replays(mode):
    records = [c.to_dict() for c in explore(mode, seed=3, budget=150)]
    assert records
    assert sum(r["evaluations"] for r in records) <= 150
    for rec in records:
        assert -1.0 <= rec["objective"] <= 1.0
        assert replay_candidate(rec) == rec["objective"]
        dims = {matrix_from_record(p).shape for p in rec["points"]}
        assert dims == {(2, 2) if mode == "neglog-cone" else (3, 3)}


def test_exploration_is_deterministic():
    first = [c.to_dict() for c in explore("qjsd-n3", seed=5, budget=80)]
    second = [c.to_dict() for c in explore("qjsd-n3", seed=5, budget=80)]
    assert first == second


def test_exploration_argument_checks():
    with pytest.raises(ValidationError):
        next(explore("qutrit", 0, 10))
    with pytest.raises(ValidationError):
        next(explore("qjsd-n3", 0, 0))


def test_objective_of_collapsed_set_is_floor():
    import numpy as np

    states = np.stack([np.eye(3) / 3] * 4)
    assert objective("qjsd-n3", states) == -1.0
