import numpy as np
import pytest

from chemolab import (
    ChiParams,
    FieldInit,
    GridSpec,
    SimConfig,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)


def bump_config(nx=512, lx=4.0, dt=1e-4, t_end=1.0, chi0=2.0, lam=0.0, **kw):
    """The workhorse scenario: a centered bump on a quiet background over a
    uniform signal, below the smallness threshold for a = 1, k = 2."""
    kw.setdefault("chi", ChiParams(chi0=chi0, a=1.0, k=2.0))
    return SimConfig(
        grid=GridSpec(1, (lx,), (nx,)),
        lam=lam,
        dt=dt,
        t_end=t_end,
        init_u=FieldInit(
            kind="gaussian", base=0.1, amplitude=5.0, sigma=0.2, center=(lx / 2.0,)
        ),
        init_v=FieldInit(kind="constant", value=1.0),
        **kw,
    )


def constant_config(value=1.0, nx=128, lam=0.0, dt=1e-3, t_end=0.1, **kw):
    kw.setdefault("chi", ChiParams(chi0=2.0, a=1.0, k=2.0))
    return SimConfig(
        grid=GridSpec(1, (1.0,), (nx,)),
        lam=lam,
        dt=dt,
        t_end=t_end,
        init_u=FieldInit(kind="constant", value=value),
        init_v=FieldInit(kind="constant", value=value),
        **kw,
    )
