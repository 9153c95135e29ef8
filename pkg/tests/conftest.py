import os
import stat
import sys
import textwrap

import numpy as np
import pytest

from simadv import BuiltinSut, ParameterDomain, from_params


@pytest.fixture
def square2():
    return ParameterDomain([(-1.0, 1.0), (-1.0, 1.0)], ["x0", "x1"])


@pytest.fixture
def wide2():
    return ParameterDomain([(-2.0, 2.0), (-2.0, 2.0)], ["x0", "x1"])


def make_basin_sut(amplitude=1.0, center=(0.0, 0.0), scale=0.5,
                   score_sign="loss-as-is"):
    land = from_params(
        "basin",
        {"amplitude": amplitude, "center": list(center), "scale": scale},
        dims=len(center),
    )
    return BuiltinSut(land, score_sign=score_sign)


@pytest.fixture
def basin_sut():
    return make_basin_sut()


def write_script(tmp_path, name, body):
    """Drop a small executable python script used as a child process."""
    path = tmp_path / name
    path.write_text(f"#!{sys.executable}\n" + textwrap.dedent(body))
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return str(path)


def scalar_basin(point, amplitude, center, scale):
    """Independent scalar recomputation of the basin formula (ascending
    accumulation over python floats, then np.exp)."""
    acc = 0.0
    for x, c in zip(point, center):
        d = float(x) - float(c)
        acc += d * d
    denom = 2.0 * (float(scale) * float(scale))
    return float(amplitude) * float(np.exp(-(acc / denom)))


ADAPTER_DIST = os.path.join(os.path.dirname(os.path.dirname(__file__)),
                            "adapter", "dist", "main.js")
