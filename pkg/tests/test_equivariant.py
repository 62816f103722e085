from collections import Counter
from fractions import Fraction
from itertools import permutations
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from jacstrata.equivariant import (
    EquivariantClass,
    character_at,
    dimension_of,
    e,
    from_characters,
    h,
    invariants,
    irreducible_character,
    partitions,
    plethysm_cycle,
    power_sum,
    product,
    restrict,
    schur_multiplicities,
    z,
)
from jacstrata.motives import L, ONE, MotiveClass, adams


def cycle_type(perm):
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen:
            continue
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = perm[j]
            n += 1
        out.append(n)
    return tuple(sorted(out, reverse=True))


@pytest.mark.parametrize("n", range(1, 7))
def test_z_counts_centralizers(n):
    counts = Counter(cycle_type(p) for p in permutations(range(n)))
    for mu in partitions(n):
        assert counts[mu] * z(mu) == factorial(n)


def test_trivial_and_sign_characters():
    for n in range(1, 6):
        for mu in partitions(n):
            assert character_at(h(n), mu) == ONE
            assert character_at(e(n), mu) == (-1) ** (n - len(mu))


def test_product_of_characters_h1_h1():
    # p_1^2 = h_2 + e_2
    assert product(h(1), h(1)) == h(2) + e(2)


def test_plethysm_character_rule():
    # p_1 -> p_2: character 2 at (2)
    assert character_at(plethysm_cycle(2, power_sum((1,))), (2,)) == 2 * ONE
    F = from_characters((2,), {(1, 1): L + 3, (2,): L - 1})
    G = plethysm_cycle(3, F)
    for mu in partitions(2):
        r_mu = tuple(3 * k for k in mu)
        assert character_at(G, r_mu) == adams(3, character_at(F, mu)) * Fraction(z(r_mu), z(mu))


def test_mn_characters_are_orthonormal():
    for n in range(1, 7):
        parts = list(partitions(n))
        for lam in parts:
            for nu in parts:
                s = sum(Fraction(irreducible_character(lam, mu) * irreducible_character(nu, mu), z(mu)) for mu in parts)
                assert s == (1 if lam == nu else 0)


def test_schur_multiplicities_of_permutation_representation():
    # C^3 with S_3 permuting coordinates = trivial + standard
    perm = from_characters((3,), {(1, 1, 1): 3, (2, 1): 1, (3,): 0})
    assert schur_multiplicities(perm) == {((3,),): ONE, ((2, 1),): ONE}


def test_restrict_to_young_subgroup():
    F = from_characters((3,), {(1, 1, 1): 3 + L, (2, 1): 1 - L, (3,): L})
    R = restrict(F, (2, 1))
    assert character_at(R, ((1, 1), (1,))) == 3 + L
    assert character_at(R, ((2,), (1,))) == 1 - L


def test_invariants_and_dimension():
    F = from_characters((2,), {(1, 1): 2 * L + 4, (2,): 2})
    assert dimension_of(F) == 2 * L + 4
    assert invariants(F) == L + 3


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        EquivariantClass((3,), {(2, 1, 1): ONE})
    with pytest.raises(ValueError):
        EquivariantClass((2, 1), {((2,),): ONE})


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.lists(st.integers(-5, 5), min_size=7, max_size=7))
def test_from_characters_round_trip(n, values):
    chars = {mu: MotiveClass.scalar(v) + v * L for mu, v in zip(partitions(n), values)}
    F = from_characters((n,), chars)
    assert F.character_table() == {(mu,): c for mu, c in chars.items()}
    assert F.is_character_integral()
