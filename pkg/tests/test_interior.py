import json
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from jacstrata.assembly import open_moduli_class
from jacstrata.equivariant import character_at, partitions, restrict
from jacstrata.interior import (
    ELLIPTIC_CURVE,
    InteriorProvider,
    MissingInteriorData,
    configuration_class,
    genus0_class,
    genus1_class,
    power_class,
    twisted_m0n_count,
)
from jacstrata.motives import L, ONE, MotiveClass, adams, integrate_M11

V = MotiveClass.V


def _perm_of_type(mu):
    out, start = [], 0
    for k in mu:
        out += [start + (i + 1) % k for i in range(k)]
        start += k
    return out


def test_power_class_characters():
    x = L + 2
    P = power_class(x, 3)
    assert character_at(P, (1, 1, 1)) == x ** 3
    assert character_at(P, (2, 1)) == adams(2, x) * x
    assert character_at(P, (3,)) == adams(3, x)


@pytest.mark.parametrize("N", range(0, 6))
@pytest.mark.parametrize("n", range(1, 5))
def test_configuration_characters_count_fixed_injections(N, n):
    F = configuration_class(MotiveClass.scalar(N), n)
    for mu in partitions(n):
        sigma = _perm_of_type(mu)
        fixed = sum(
            1
            for f in product(range(N), repeat=n)
            if len(set(f)) == n and all(f[sigma[i]] == f[i] for i in range(n))
        )
        assert character_at(F, mu) == fixed


def test_configuration_two_points_symbolic():
    x = V(1) + L
    F = configuration_class(x, 2)
    assert character_at(F, (1, 1)) == x * x - x
    assert character_at(F, (2,)) == adams(2, x) - x
    # the (2) coefficient of the Frobenius characteristic
    assert F.coefficient((2,)) == (adams(2, x) - x) * Fraction(1, 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-2, 2), st.integers(1, 5))
def test_identity_character_is_falling_product(a, b, c, n):
    x = a + b * L + c * V(2)
    expected = ONE
    for i in range(n):
        expected = expected * (x - i)
    assert character_at(configuration_class(x, n), (1,) * n) == expected


def test_genus0_examples():
    assert twisted_m0n_count((1, 1, 1)) == [1]
    assert character_at(genus0_class(4), (1, 1, 1, 1)) == L - 2
    assert character_at(genus0_class(4), (2, 1, 1)) == L
    assert character_at(genus0_class(4), (2, 2)) == L - 2
    assert character_at(genus0_class(4), (3, 1)) == 1 + L
    assert character_at(genus0_class(4), (4,)) == L
    with pytest.raises(ValueError):
        genus0_class(2)


@pytest.mark.parametrize("n", range(3, 8))
def test_configurations_on_the_line_split_off_pgl2(n):
    assert configuration_class(1 + L, n) == genus0_class(n).map_coefficients(
        lambda c: c * (L ** 3 - L)
    )


def test_genus1_examples():
    assert character_at(genus1_class(1), (1,)) == L + L ** 2
    assert character_at(genus1_class(2), (1, 1)) == integrate_M11(ELLIPTIC_CURVE * (ELLIPTIC_CURVE - 1))
    for n in range(1, 5):
        assert genus1_class(n).is_character_integral()


@pytest.mark.parametrize("n", range(1, 5))
def test_genus1_is_the_universal_curve(n):
    # E^n minus diagonals over M_{1,1}, modulo nothing, is the universal curve over M_{1,n}
    lhs = character_at(genus1_class(n), (1,) * n)
    assert lhs == open_moduli_class(1, n + 1) + n * open_moduli_class(1, n)


def test_open_moduli_classes():
    assert open_moduli_class(1, 1) == L
    assert open_moduli_class(1, 2) == L ** 2
    assert open_moduli_class(0, 5) == L ** 2 - 5 * L + 6


def test_provider_dispatch_and_plugins(tmp_path):
    prov = InteriorProvider()
    assert prov(0, 3) == genus0_class(3)
    assert prov(1, 2) == genus1_class(2)
    assert not prov.has(2, 0)
    with pytest.raises(MissingInteriorData) as err:
        prov(2, 0)
    assert '"class"' in str(err.value)
    with pytest.raises(ValueError):
        prov(0, 2)

    table = {"g": 2, "n": 1, "class": {"1": [{"coeff": 3, "l_exp": 1}, {"coeff": 1}]}}
    path = tmp_path / "plugin.json"
    path.write_text(json.dumps(table))
    prov.load_plugin(path)
    assert prov.has(2, 1)
    assert character_at(prov(2, 1), (1,)) == 3 * L + 1


def test_plugin_rejects_non_integral_characters(tmp_path):
    table = {"g": 2, "n": 2, "class": {"1,1": [{"coeff": "1/3"}]}}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(table))
    with pytest.raises(ValueError):
        InteriorProvider().load_plugin(path)
