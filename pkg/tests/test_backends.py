"""Differential tests: the compiled kernel and the Python loop must
produce bit-identical runs, float for float, over a spread of configs."""

import os
import subprocess
import sys

import pytest

import coevo
from coevo import Params, RemovePolicy, ChargePolicy, run_simulation, use_backend
from coevo.backend import ENV_VAR, HAS_NUMBA, active_backend, default_backend

from helpers import assert_results_equal

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


@pytest.fixture(scope="module", autouse=True)
def _compiled():
    if HAS_NUMBA:
        coevo.warmup()


def both_backends(params, thin=1):
    with use_backend("numba"):
        a = run_simulation(params, thin=thin)
    with use_backend("numpy"):
        b = run_simulation(params, thin=thin)
    return a, b


CONFIG_SPREAD = [
    Params(eta=0.5, lam=0.5, seed=1, max_generations=80),
    Params(eta=0.01, lam=0.01, seed=2, max_generations=150, endowment0=20.0),
    Params(eta=0.99, lam=0.99, seed=3, max_generations=150),
    Params(eta=0.2, lam=0.8, seed=4, max_generations=100),
    Params(eta=0.8, lam=0.2, seed=5, max_generations=100),
    Params(eta=0.0, lam=1.0, seed=6, max_generations=60),
    Params(eta=1.0, lam=0.0, seed=7, max_generations=60),
    Params(eta=0.6, lam=0.6, seed=8, max_generations=60, init_complexity=1),
    Params(eta=0.5, lam=0.5, seed=9, max_generations=60, init_complexity=40),
    Params(eta=0.3, lam=0.3, seed=10, max_generations=80,
           remove_at_min=RemovePolicy.REJECT),
    Params(eta=0.7, lam=0.7, seed=11, max_generations=80,
           charge=ChargePolicy.DEFICIT),
    Params(eta=0.4, lam=0.4, seed=12, max_generations=80,
           remove_at_min=RemovePolicy.REJECT, charge=ChargePolicy.DEFICIT),
    Params(eta=0.5, lam=0.5, seed=13, max_generations=500, endowment0=5.0),
    Params(eta=0.2, lam=0.2, seed=14, max_generations=60, max_complexity=12),
    Params(eta=0.9, lam=0.1, seed=15, max_generations=40, endowment0=0.5),
]


@needs_numba
@pytest.mark.parametrize("params", CONFIG_SPREAD,
                         ids=lambda p: f"seed{p.seed}")
def test_backends_agree(params):
    a, b = both_backends(params)
    assert_results_equal(a, b)


@needs_numba
@pytest.mark.parametrize("thin", [1, 2, 7, 1000])
def test_backends_agree_thinned(thin):
    params = Params(eta=0.4, lam=0.6, seed=21, max_generations=90)
    a, b = both_backends(params, thin=thin)
    assert_results_equal(a, b)


@needs_numba
def test_backends_agree_zero_generations():
    a, b = both_backends(Params(seed=22, max_generations=0))
    assert_results_equal(a, b)


@needs_numba
def test_backends_agree_multiword():
    # strings wider than one 64-bit word from the start
    params = Params(eta=0.8, lam=0.8, seed=23, max_generations=80,
                    init_complexity=80)
    a, b = both_backends(params)
    assert_results_equal(a, b)
    assert a.final_c_t > 64 or a.final_c_s > 64


@needs_numba
def test_backends_agree_across_word_boundary():
    # random adoption walks the lengths back and forth across 64 bits
    params = Params(eta=0.0, lam=0.0, seed=24, max_generations=120,
                    init_complexity=63)
    a, b = both_backends(params)
    assert_results_equal(a, b)
    assert max(a.max_c_t, a.max_c_s) >= 65


@needs_numba
def test_backends_agree_across_seed_extremes():
    for seed in (0, 2**63 - 1, 2**63, 2**64 - 1):
        a, b = both_backends(Params(seed=seed, max_generations=40))
        assert_results_equal(a, b)


# ------------------------------------------------------------- selection


def test_default_backend_matches_availability():
    assert default_backend() == ("numba" if HAS_NUMBA else "numpy")


def test_use_backend_nests():
    with use_backend("numpy"):
        assert active_backend() == "numpy"
        if HAS_NUMBA:
            with use_backend("numba"):
                assert active_backend() == "numba"
        assert active_backend() == "numpy"


def test_use_backend_rejects_unknown():
    with pytest.raises(ValueError):
        with use_backend("fortran"):
            pass


def test_env_var_selects_backend():
    code = (
        "import coevo.backend as b; import sys; "
        "sys.exit(0 if b.active_backend() == 'numpy' else 1)"
    )
    env = dict(os.environ, **{ENV_VAR: "numpy"})
    proc = subprocess.run([sys.executable, "-c", code], env=env)
    assert proc.returncode == 0


def test_env_var_rejects_garbage():
    code = "import coevo.backend as b; b.active_backend()"
    env = dict(os.environ, **{ENV_VAR: "cuda"})
    proc = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert proc.returncode != 0
    assert "backend" in proc.stderr
