import json
from fractions import Fraction

import pytest
import sympy

from jacstrata import assembly
from jacstrata.acceptance import tree_sum_chi
from jacstrata.assembly import (
    chi_M0bar,
    chi_compactified,
    expected_dimension,
    homology_matrix,
    is_palindromic,
    moduli_curves_class,
    orbifold_euler,
    stratum_class,
    torus_trace,
    verify_independence,
    wood_rhs,
)
from jacstrata.bijections import InadmissibleDegree
from jacstrata.equivariant import dimension_of, invariants, restrict
from jacstrata.graphs import StableGraph, automorphism_group
from jacstrata.interior import MissingInteriorData
from jacstrata.motives import L, ONE, MotiveClass, e_polynomial

LOOP = StableGraph.from_spec([0], [[1]], [(0, 0)])
THETA = StableGraph.from_spec([0, 0], [[], []], [(0, 1)] * 3)


def poly(*coeffs):
    return sum((c * L ** i for i, c in enumerate(coeffs)), MotiveClass())


# -- traces ------------------------------------------------------------------------

def test_torus_trace_on_a_loop():
    ident, flip = automorphism_group(LOOP).elements
    assert torus_trace(LOOP, [0], ident) == L - 1
    assert torus_trace(LOOP, [0], flip) == L + 1
    assert torus_trace(LOOP, [], ident) == ONE


@pytest.mark.parametrize("graph,sub", [(THETA, [0, 1, 2]), (THETA, [0, 1]), (LOOP, [0])])
def test_torus_trace_is_the_characteristic_polynomial(graph, sub):
    x = sympy.symbols("x")
    for phi in automorphism_group(graph, sub):
        A_inv = sympy.Matrix(homology_matrix(graph, sub, phi.inverse()))
        expected = sympy.Poly(A_inv.charpoly(x).as_expr(), x) if A_inv.rows else sympy.Poly(1, x)
        t = torus_trace(graph, sub, phi)
        assert t == sum((int(c) * L ** i for (i,), c in expected.terms()), MotiveClass())
    ident = automorphism_group(graph, sub).elements[0]
    assert torus_trace(graph, sub, ident) == (L - 1) ** (len(sub) - graph.num_vertices + 1)


def test_strata_of_type_11():
    classes = sorted(
        (str(stratum_class(G, sub, 0).motive) for G, sub in [
            (StableGraph.from_spec([1], [[1]], []), []),
            (LOOP, []),
            (LOOP, [0]),
        ])
    )
    assert sorted([str(L + L ** 2), str(ONE), str(L)]) == classes


# -- totals ------------------------------------------------------------------------

TYPE_VALUES = {
    (1, (1,)): poly(1, 2, 1),
    (1, (1, 1)): poly(1, 4, 4, 1),
    (1, (2,)): poly(1, 4, 4, 1),
    (1, (1, 1, 1)): poly(1, 8, 15, 8, 1),
    (1, (3,)): poly(1, 8, 15, 8, 1),
    (1, (2, 1)): poly(1, 8, 15, 8, 1),
}


@pytest.mark.parametrize("key", list(TYPE_VALUES))
def test_hodge_euler_characteristics(key):
    g, colors = key
    d = 1 if 2 in colors or 3 in colors else 0
    r = chi_compactified(g, colors, d)
    assert r.motive == TYPE_VALUES[key]
    assert is_palindromic(r.e_polynomial, expected_dimension(g, sum(colors)))
    assert all(c >= 0 for c in r.e_polynomial.values())
    assert r.equivariant.is_character_integral()


def test_symmetric_characters_and_invariant_parts():
    two = chi_compactified(1, (2,), 1)
    assert two.character_table()[((2,),)] == poly(1, 2, 2, 1)
    assert invariants(two.equivariant) == poly(1, 3, 3, 1)
    three = chi_compactified(1, (3,), 1)
    assert three.character_table()[((2, 1),)] == poly(1, 4, 7, 4, 1)
    assert three.character_table()[((3,),)] == poly(1, 2, 3, 2, 1)
    assert invariants(three.equivariant) == poly(1, 4, 7, 4, 1)
    assert invariants(chi_compactified(1, (2, 1), 1).equivariant) == poly(1, 6, 11, 6, 1)


def test_colorings_are_consistent_under_restriction():
    full = chi_compactified(1, (3,), 1).equivariant
    assert restrict(full, (2, 1)) == chi_compactified(1, (2, 1), 0).equivariant
    assert restrict(full, (1, 1, 1)) == chi_compactified(1, (1, 1, 1), 0).equivariant
    assert dimension_of(chi_compactified(1, (2,), 1).equivariant) == chi_compactified(1, (1, 1), 0).motive


@pytest.mark.parametrize("g,colors,degrees", [(1, (1,), [-2, 0, 1, 3]), (1, (2,), [-1, 1, 3]), (1, (1, 1), [0, 1, 2])])
def test_degree_independence(g, colors, degrees):
    base = chi_compactified(g, colors, degrees[0])
    for d in degrees[1:]:
        other = chi_compactified(g, colors, d)
        assert other.equivariant == base.equivariant
        assert [s.motive for s in other.strata] == [s.motive for s in base.strata]


def test_inadmissible_and_missing_data():
    with pytest.raises(InadmissibleDegree):
        chi_compactified(1, (2,), 0)
    with pytest.raises(MissingInteriorData):
        chi_compactified(2, (), 0)


def test_parallel_jobs_give_identical_output():
    a = chi_compactified(1, (1, 1), 0, jobs=1).to_json()
    b = chi_compactified(1, (1, 1), 0, jobs=2).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_result_json_shape():
    out = chi_compactified(1, (2,), 1).to_json()
    assert out["type"] == [1, [2]]
    assert {"u": 0, "v": 0, "c": 1} in out["e_polynomial"]
    assert set(out["equivariant"]) == {"character_table", "irreducibles", "invariant_part"}
    assert "equivariant" not in chi_compactified(1, (1,), 0).to_json()


def test_verify_independence_reports():
    ok = verify_independence(1, (1,), [0, 1, 2])
    assert ok["status"] == "PASS" and ok["claims_verified"]
    mixed = verify_independence(1, (2,), [0, 1, 3])
    assert mixed["rejected"] == [0]
    assert mixed["status"] == "PRECONDITION"
    assert mixed["admissible_status"] == "PASS"
    assert verify_independence(1, (2,), [0, 2])["status"] == "PRECONDITION"


def test_sign_mutation_is_visible(monkeypatch):
    monkeypatch.setattr(assembly, "MUTATIONS", {"torus_sign_flip"})
    bad = chi_compactified(1, (1,), 0)
    assert bad.motive == -poly(1, 2, 1)
    assert any(c < 0 for c in bad.e_polynomial.values())


# -- Euler characteristics -----------------------------------------------------------

@pytest.mark.parametrize(
    "g,n,value",
    [(1, 1, Fraction(1, 2)), (1, 2, Fraction(1)), (1, 3, Fraction(7, 2)), (2, 0, Fraction(1, 4)), (2, 1, Fraction(7, 8))],
)
def test_orbifold_euler_characteristics(g, n, value):
    assert orbifold_euler(g, (1,) * n) == value == wood_rhs(g, n)


def test_genus0_euler_characteristics():
    assert [chi_M0bar(m) for m in range(3, 8)] == [1, 2, 7, 34, 213]
    for m in range(3, 8):
        assert chi_M0bar(m) == tree_sum_chi(m)


def test_moduli_of_curves_classes():
    assert moduli_curves_class(0, 5) == poly(1, 5, 1)
    assert moduli_curves_class(0, 6) == poly(1, 16, 16, 1)
    assert moduli_curves_class(0, 7) == poly(1, 42, 127, 42, 1)
    assert moduli_curves_class(1, 1) == poly(1, 1)
    assert moduli_curves_class(1, 2) == poly(1, 2, 1) == chi_compactified(1, (1,), 0).motive
    assert moduli_curves_class(1, 3) == poly(1, 5, 5, 1)
    assert moduli_curves_class(1, 4) == poly(1, 12, 23, 12, 1)
    for n in range(1, 5):
        assert e_polynomial(moduli_curves_class(1, n)).get((1, 1)) == 2 ** n - n
