"""Backend selection and agreement between the compiled and pure kernels."""

import os
import subprocess
import sys

import numpy as np
import pytest

import sparserec
from sparserec import _backend, linalg, recovery, sensing, thresholding
from sparserec.recovery import Algorithm, RecoveryConfig

ALL = _backend.available_backends()
BOTH = len(ALL) == 2


@pytest.fixture(params=ALL)
def backend(request):
    previous = _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


def test_active_backend_is_listed():
    assert _backend.backend_name() in ALL
    assert set(ALL) <= {"cython", "python"}


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        _backend.set_backend("fortran")


def test_package_reexports_backend_info():
    assert sparserec.backend_name() == _backend.backend_name()
    assert sparserec.available_backends() == ALL


# ---------------------------------------------------------------- per-backend behavior

def test_top_s_tie_break_per_backend(backend):
    kern = _backend.active()
    # scores with a tie between slots 2 and 3; lowest index must win
    scores = np.array([2.0, -2.0, 1.0, 1.0, 0.0])
    assert list(kern.top_s_indices(scores, 2)) == [0, 2]
    assert list(kern.top_s_indices(scores, 3)) == [0, 2, 3]
    assert list(kern.top_s_indices(np.zeros(4), 2)) == [0, 1]


def test_hard_threshold_per_backend(backend):
    out, sup = thresholding.hard_threshold(np.array([1.0, -3.0, 2.0]), 2)
    assert sup.indices == (1, 2)
    assert np.array_equal(out, [0.0, -3.0, 2.0])


def test_recovery_runs_per_backend(backend):
    p = sensing.build_problem(12, 24, 3, seed=17)
    res = recovery.run_iht(p, RecoveryConfig(max_iters=30))
    assert res.iterations_run == 30
    assert np.count_nonzero(res.estimate) <= 3


def test_operator_norm_per_backend(backend):
    M = np.array([[3.0, 0.0], [4.0, 0.0]])
    assert linalg.operator_norm(M) == pytest.approx(5.0, abs=1e-9)


# ---------------------------------------------------------------- cross-backend agreement

@pytest.mark.skipif(not BOTH, reason="only one backend built")
def test_backends_agree_on_recovery_runs():
    p = sensing.build_problem(16, 32, 4, seed=23)
    results = {}
    for name in ALL:
        prev = _backend.set_backend(name)
        try:
            for alg, eta in ((Algorithm.IHT, 0.0), (Algorithm.ILAT, 0.5)):
                cfg = RecoveryConfig(algorithm=alg, eta=eta, max_iters=60,
                                     record_history=True)
                res = recovery.recover(p, cfg)
                results[(name, alg)] = res
        finally:
            _backend.set_backend(prev)
    for alg in (Algorithm.IHT, Algorithm.ILAT):
        a = results[("cython", alg)]
        b = results[("python", alg)]
        assert np.max(np.abs(a.estimate - b.estimate)) <= 1e-9
        assert [s.indices for s in a.support_history] == \
               [s.indices for s in b.support_history]
        assert a.gradient_evaluations == b.gradient_evaluations


@pytest.mark.skipif(not BOTH, reason="only one backend built")
def test_backends_agree_on_operator_norm():
    g = np.random.Generator(np.random.Philox(key=[7, 7]))
    for trial in range(5):
        M = g.standard_normal((6, 9))
        values = []
        for name in ALL:
            prev = _backend.set_backend(name)
            try:
                values.append(linalg.operator_norm(M))
            finally:
                _backend.set_backend(prev)
        assert values[0] == pytest.approx(values[1], rel=1e-9)


@pytest.mark.skipif(not BOTH, reason="only one backend built")
def test_backends_agree_on_selection_with_ties():
    vectors = [
        np.array([2.0, -2.0, 1.0, 1.0, 0.0]),
        np.array([1.0, 1.0, 1.0]),
        np.zeros(6),
        np.array([-5.0, 5.0, -5.0, 0.25]),
    ]
    for z in vectors:
        picks = []
        for name in ALL:
            prev = _backend.set_backend(name)
            try:
                _, sup = thresholding.hard_threshold(z, 2)
                picks.append(sup.indices)
            finally:
                _backend.set_backend(prev)
        assert picks[0] == picks[1], f"z={z}"


# ---------------------------------------------------------------- import-time forcing

def _import_with_backend(value):
    env = dict(os.environ, SPARSEREC_BACKEND=value)
    return subprocess.run(
        [sys.executable, "-c",
         "import sparserec; print(sparserec.backend_name())"],
        capture_output=True, text=True, env=env)


def test_env_var_forces_python_backend():
    proc = _import_with_backend("python")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "python"


def test_env_var_rejects_unknown_backend():
    proc = _import_with_backend("bogus")
    assert proc.returncode != 0
    assert "SPARSEREC_BACKEND" in proc.stderr
