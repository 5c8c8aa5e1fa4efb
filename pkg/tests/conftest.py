import math

import pytest

from radreact.units import ChargeModel, SphereShell, UniformBall


def scaled_model(beta=1e-3, radius=0.1, m0=1.0, m_b=None, ball=False) -> ChargeModel:
    """Synthetic particle with a chosen radiation time beta = e^2/(6 pi m0)."""
    e = math.sqrt(beta * 6.0 * math.pi * m0)
    ff = UniformBall(radius) if ball else SphereShell(radius)
    return ChargeModel(e=e, m0=m0, form_factor=ff, m_b=m_b)


@pytest.fixture
def shell_model():
    # moderate self-energy so bare and effective masses differ visibly
    return ChargeModel(e=2.0, m0=3.0, form_factor=SphereShell(0.7), m_b=1.0)


@pytest.fixture
def ball_model():
    return ChargeModel(e=2.0, m0=3.0, form_factor=UniformBall(0.7), m_b=1.0)
