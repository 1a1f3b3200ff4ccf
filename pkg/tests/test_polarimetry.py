import math

import numpy as np
import pytest

from slowlight import polarimetry as pol
from slowlight.errors import InvalidInputError
from slowlight.polarimetry import JonesField


def test_x_polarized_splits_into_equal_circular():
    ep, em = pol.lin_to_circular(1.0, 0.0)
    assert abs(ep) == pytest.approx(abs(em), abs=1e-15)
    assert abs(ep) ** 2 + abs(em) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_round_trip_identity():
    rng = np.random.default_rng(7)
    for _ in range(50):
        ex, ey = rng.normal(size=2) + 1j * rng.normal(size=2)
        ep, em = pol.lin_to_circular(ex, ey)
        bx, by = pol.circular_to_lin(ep, em)
        assert bx == pytest.approx(ex, abs=1e-12)
        assert by == pytest.approx(ey, abs=1e-12)
        # intensity preserved by the basis change
        assert abs(ep) ** 2 + abs(em) ** 2 == pytest.approx(
            abs(ex) ** 2 + abs(ey) ** 2, rel=1e-12
        )


def test_y_polarized_relative_phase():
    # y light has sigma+/- components pi out of phase relative to x light
    xp, xm = pol.lin_to_circular(1.0, 0.0)
    yp, ym = pol.lin_to_circular(0.0, 1.0)
    relative = (yp / ym) / (xp / xm)
    assert relative == pytest.approx(-1.0, abs=1e-12)


def test_rotation_angle_values():
    assert pol.rotation_angle(1.0, 1.0, 795e-9, 0.04) == 0.0
    lam, length = 795e-9, 0.04
    assert pol.rotation_angle(1.0 + lam / (2 * length), 1.0, lam, length) == pytest.approx(
        math.pi / 2, rel=1e-12
    )
    # odd under index swap
    a = pol.rotation_angle(1.0 + 1e-7, 1.0, lam, length)
    b = pol.rotation_angle(1.0, 1.0 + 1e-7, lam, length)
    assert a == pytest.approx(-b, rel=1e-12)


def test_pbs_projection_examples():
    # field along the control axis (x), detector along y
    i_sig, i_ctrl = pol.pbs_project(JonesField(1.0, 0.0), math.pi / 2)
    assert i_sig == pytest.approx(0.0, abs=1e-15)
    assert i_ctrl == pytest.approx(1.0, rel=1e-12)
    # 45 degrees splits evenly
    i_sig, i_ctrl = pol.pbs_project(JonesField(1.0, 1.0), math.pi / 2)
    assert i_sig == pytest.approx(i_ctrl, rel=1e-12)


def test_pbs_malus_small_angle():
    theta = 1e-4
    field = JonesField(math.cos(theta), math.sin(theta))
    i_sig, _ = pol.pbs_project(field, math.pi / 2)
    assert i_sig == pytest.approx(math.sin(theta) ** 2, abs=1e-10)


def test_pbs_intensity_conservation_random_fields():
    rng = np.random.default_rng(11)
    for _ in range(50):
        ex, ey = rng.normal(size=2) + 1j * rng.normal(size=2)
        angle = rng.uniform(0, 2 * math.pi)
        i_sig, i_ctrl = pol.pbs_project(JonesField(ex, ey), angle)
        assert i_sig + i_ctrl == pytest.approx(abs(ex) ** 2 + abs(ey) ** 2, rel=1e-12)


def test_pbs_extinction_leakage():
    i_sig, i_ctrl = pol.pbs_project(JonesField(1.0, 0.0), math.pi / 2, extinction_ratio=1e-4)
    assert i_sig == pytest.approx(1e-4, rel=1e-9)
    assert i_ctrl == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(InvalidInputError):
        pol.pbs_project(JonesField(1.0, 0.0), 0.0, extinction_ratio=-1.0)


def test_jones_field_validation():
    with pytest.raises(InvalidInputError):
        JonesField(math.nan, 0.0)
    with pytest.raises(InvalidInputError):
        JonesField(1.0, 0.0, basis="diagonal")
    field = JonesField(0.3 + 0.1j, -0.2j, basis="linear")
    circ = field.to_circular()
    assert circ.basis == "circular"
    back = circ.to_linear()
    assert back.a == pytest.approx(field.a, abs=1e-14)
    assert back.b == pytest.approx(field.b, abs=1e-14)
