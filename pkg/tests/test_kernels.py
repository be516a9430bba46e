import math
import os
import subprocess
import sys

import numpy as np
import pytest

from dynamide import _accel
from dynamide.kernels import KERNELS


def cases():
    n = 16
    x = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    z = np.zeros(n)
    yield "verlet_chain", (-0.5 * np.cos(x), 0.5 * np.cos(x), z, 0.1 * np.sin(x), 1.0, 0.7, 1.3, 1e-2, 500, 7)
    yield "rk4_two_level", (0.6 + 0j, 0.8j, 2.0 / 3.0, 1e-3, 500)
    w = np.array([0.0, 1.0, 1.0 + math.sqrt(2.0)])
    d = np.array([[0, 1, 0.3], [1, 0, 0.6j], [0.3, -0.6j, 0]], dtype=np.complex128) * 0.1
    d3 = np.zeros((3, 3, 3), dtype=np.complex128)
    d3[:, :, 0] = d
    d3[:, :, 2] = 0.5 * d
    g = np.einsum("nsj,snj->ns", d3, d3).real
    rr = np.einsum("lkj,snj->lksn", d3, d3)
    lam0 = np.array([0.3, 0.5j, 0.81], dtype=np.complex128)
    lam0 /= np.linalg.norm(lam0)
    yield "rk4_secular", (lam0, w, g, 2.0 / 3.0, 0.01, 300, 7)
    yield "rk4_full", (lam0, w, rr, 2.0 / 3.0, 0.25, 0.01, 300, 7)
    yield "rk4_driven", (np.array([0.1, 0, 0]), np.zeros(3), np.array([1.0, 0.2, 0]), np.array([0, 0.5, 0.0]),
                         1.3, 1.0, 1e-3, 1.0, 0.02, 400, 9, 13)


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("name,args", list(cases()), ids=[c[0] for c in cases()])
def test_numba_and_numpy_agree(name, args):
    nb, npf = KERNELS[name]
    out_nb, out_np = nb(*args), npf(*args)
    if not isinstance(out_nb, tuple):
        out_nb, out_np = (out_nb,), (out_np,)
    assert len(out_nb) == len(out_np)
    for a, b in zip(out_nb, out_np):
        a, b = np.asarray(a), np.asarray(b)
        assert a.shape == b.shape
        np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-13 * max(1.0, np.abs(b).max()))


@pytest.mark.parametrize("flag,expect", [("1", "numpy"), ("", "numba" if _accel.HAVE_NUMBA else "numpy")])
def test_env_flag_selects_backend(flag, expect):
    env = dict(os.environ, DYNAMIDE_NO_NUMBA=flag)
    code = ("import dynamide, dynamide.kernels as k; "
            "print(dynamide.backend_name(), k.rk4_driven is k.KERNELS['rk4_driven'][1])")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, is_np = out.stdout.split()
    assert name == expect
    assert is_np == str(expect == "numpy")
