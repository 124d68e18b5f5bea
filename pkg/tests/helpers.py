"""Shared assertions for comparing whole run results."""

import numpy as np

_TRAJECTORY_FIELDS = (
    "generation", "c_t", "c_s", "effectiveness", "resources",
    "endowment", "iterations", "adopted_t", "adopted_s",
)


def assert_results_equal(a, b):
    """Field-by-field equality of two RunResults, floats compared exactly."""
    assert a.params == b.params
    assert a.halt is b.halt
    assert a.generations == b.generations
    assert a.final_t == b.final_t
    assert a.final_s == b.final_s
    assert a.final_ld == b.final_ld
    assert a.final_endowment == b.final_endowment
    assert a.max_c_t == b.max_c_t
    assert a.max_c_s == b.max_c_s
    assert a.run_index == b.run_index
    for name in _TRAJECTORY_FIELDS:
        col_a = getattr(a.trajectory, name)
        col_b = getattr(b.trajectory, name)
        assert np.array_equal(col_a, col_b), f"trajectory column {name} differs"
