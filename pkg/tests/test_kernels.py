"""Cross-checks the batch bucketing kernels against the scalar reference.

The scalar ``bucket_index`` (pure-python math.log10) acts as the oracle;
the numpy path and, when enabled, the numba path must agree with it
bitwise on every input.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from quantdist import kernels


def _awkward_values():
    vals = [0.0, -0.0, 1.0, -1.0, 1e-12, 1e12, -1e-12, -1e12]
    vals += [1e-300, -1e-300, 1e300, -1e300, 5e-324, 99.7, -99.7]
    for k in range(-14, 15):
        vals.append(10.0**k)
        vals.append(-(10.0**k))
    # values straddling bucket boundaries
    for tenth in range(-30, 31):
        edge = 10.0 ** (tenth / 10.0)
        for v in (edge, np.nextafter(edge, 0.0), np.nextafter(edge, np.inf)):
            vals.extend((v, -v))
    return np.array(vals, dtype=np.float64)


def _random_values(rng: np.random.Generator, n: int) -> np.ndarray:
    mags = 10.0 ** rng.uniform(-14, 14, size=n)
    signs = rng.choice([-1.0, 1.0], size=n)
    vals = mags * signs
    vals[rng.random(n) < 0.05] = 0.0
    return vals


def test_batch_matches_scalar_reference():
    rng = np.random.default_rng(42)
    values = np.concatenate([_awkward_values(), _random_values(rng, 20000)])
    got = kernels.bucket_indices(values)
    expected = np.array([kernels.bucket_index(float(v)) for v in values])
    assert np.array_equal(got, expected)


def test_numpy_and_active_path_agree():
    rng = np.random.default_rng(7)
    values = np.concatenate([_awkward_values(), _random_values(rng, 20000)])
    assert np.array_equal(
        kernels.bucket_indices(values), kernels._bucket_indices_numpy(values)
    )


def test_ids_in_range_and_monotone():
    rng = np.random.default_rng(3)
    values = np.sort(_random_values(rng, 5000))
    ids = kernels.bucket_indices(values)
    assert ids.min() >= -kernels.N_POSITIVE_BUCKETS
    assert ids.max() <= kernels.N_POSITIVE_BUCKETS
    assert np.all(np.diff(ids) >= 0)  # ascending value implies ascending id


def test_spot_ids():
    assert kernels.bucket_index(0.0) == 0
    assert kernels.bucket_index(-0.0) == 0
    assert kernels.bucket_index(1e-12) == 1
    assert kernels.bucket_index(1.0) == 121
    assert kernels.bucket_index(-1.0) == -121
    assert kernels.bucket_index(99.7) == 140
    assert kernels.bucket_index(100.0) == 141
    assert kernels.bucket_index(1e12) == 240  # clipped into the top bucket
    assert kernels.bucket_index(1e300) == 240
    assert kernels.bucket_index(1e-300) == 1


def test_bounds_contain_random_values():
    rng = np.random.default_rng(11)
    values = _random_values(rng, 2000)
    values = values[values != 0.0]
    for v in values:
        sid = kernels.bucket_index(float(v))
        assert (sid > 0) == (v > 0)
        if 1e-12 <= abs(v) < 1e12:
            lo, hi = kernels.bucket_bounds(abs(sid))
            assert lo * (1 - 1e-12) <= abs(v) <= hi * (1 + 1e-12)
        else:
            # out-of-range magnitudes land in the nearest edge bucket
            assert abs(sid) in (1, kernels.N_POSITIVE_BUCKETS)


def test_bounds_shape():
    assert kernels.bucket_bounds(0) == (0.0, 0.0)
    lo, hi = kernels.bucket_bounds(121)
    assert lo == pytest.approx(1.0) and hi == pytest.approx(kernels.BUCKET_WIDTH_RATIO)
    nlo, nhi = kernels.bucket_bounds(-121)
    assert (nlo, nhi) == (-hi, -lo)
    with pytest.raises(ValueError):
        kernels.bucket_bounds(241)


def test_accumulate_counts():
    ids, counts = kernels.accumulate([1.0, 1.05, -1.0, 0.0, 1e6])
    assert list(ids) == [-121, 0, 121, 181]
    assert list(counts) == [1, 1, 2, 1]


def test_env_flag_forces_numpy_path():
    code = (
        "from quantdist import kernels\n"
        "import numpy as np\n"
        "print(kernels.USE_NUMBA)\n"
        "vals = np.array([0.0, 2.5, -99.7, 1e13, 1e-44])\n"
        "print([int(i) for i in kernels.bucket_indices(vals)])\n"
    )
    env = dict(os.environ, QUANTDIST_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "False"
    expected = [kernels.bucket_index(v) for v in (0.0, 2.5, -99.7, 1e13, 1e-44)]
    assert lines[1] == str(expected)


@pytest.mark.skipif(not kernels.USE_NUMBA, reason="numba path not active")
def test_numba_path_is_active_by_default():
    assert kernels._bucket_indices_numba is not None
