"""Coefficient ring for Hodge Euler characteristics.

Elements are finite integer (or rational) combinations of monomials

    L^i * V_k * S[m_1]^(r_1) * ...

where ``L`` is the Lefschetz class, ``V_k`` is the k-th symmetric power of the
standard weight-one local system over M_{1,1}, and ``S[m]^(r)`` is the Adams
twist psi^r of the level-one cusp-form motive of weight m.  A class without any
``V_k`` (k >= 1) is *absolute* and has an E-polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Tuple, Union

Number = Union[int, Fraction]
# (lefschetz exponent, V index, sorted tuple of (weight, adams twist))
Monomial = Tuple[int, int, Tuple[Tuple[int, int], ...]]

# weights m with no level-one cusp forms of weight m
_NO_CUSP_FORMS = frozenset({2, 4, 6, 8, 10, 14})


def _norm(c: Number) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class MotiveClass:
    """Immutable normal-form element of the coefficient ring."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean: Dict[Monomial, Number] = {}
        if terms:
            for mono, c in terms.items():
                if c:
                    clean[mono] = _norm(c)
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def scalar(cls, c: Number) -> "MotiveClass":
        return cls({(0, 0, ()): c})

    @classmethod
    def L(cls, i: int = 1) -> "MotiveClass":
        if i < 0:
            raise ValueError("negative Lefschetz exponent")
        return cls({(i, 0, ()): 1})

    @classmethod
    def V(cls, k: int) -> "MotiveClass":
        if k < 0:
            raise ValueError("V_k needs k >= 0")
        return cls({(0, k, ()): 1})

    @classmethod
    def S(cls, weight: int, twist: int = 1) -> "MotiveClass":
        return cls({(0, 0, ((weight, twist),)): 1})

    @classmethod
    def coerce(cls, x) -> "MotiveClass":
        if isinstance(x, MotiveClass):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.scalar(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to MotiveClass")

    # -- container protocol -------------------------------------------
    def terms(self) -> Dict[Monomial, Number]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def __iter__(self):
        return iter(sorted(self._terms))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MotiveClass.scalar(other)
        if not isinstance(other, MotiveClass):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = MotiveClass.coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            out[mono] = out.get(mono, 0) + c
        return MotiveClass(out)

    __radd__ = __add__

    def __neg__(self):
        return MotiveClass({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-MotiveClass.coerce(other))

    def __rsub__(self, other):
        return MotiveClass.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MotiveClass({m: c * other for m, c in self._terms.items()})
        other = MotiveClass.coerce(other)
        out: Dict[Monomial, Number] = {}
        for (i1, k1, s1), c1 in self._terms.items():
            for (i2, k2, s2), c2 in other._terms.items():
                syms = tuple(sorted(s1 + s2))
                for j, k in _clebsch_gordan(k1, k2):
                    mono = (i1 + i2 + j, k, syms)
                    out[mono] = out.get(mono, 0) + c1 * c2
        return MotiveClass(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = MotiveClass.scalar(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, c: Number):
        return self * (Fraction(1) / Fraction(c))

    # -- predicates ---------------------------------------------------
    def is_absolute(self) -> bool:
        return all(k == 0 for (_, k, _) in self._terms)

    def is_tate(self) -> bool:
        """True when the class is a polynomial in L alone."""
        return all(k == 0 and not s for (_, k, s) in self._terms)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._terms.values())

    def symbols(self) -> list:
        seen = set()
        for (_, _, syms) in self._terms:
            seen.update(syms)
        return sorted(seen)

    def tate_coefficients(self) -> Dict[int, Number]:
        if not self.is_tate():
            raise ValueError("class is not a polynomial in L")
        return {i: c for (i, _, _), c in self._terms.items()}

    # -- printing -----------------------------------------------------
    def __repr__(self):
        return f"MotiveClass({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (i, k, syms), c in sorted(self._terms.items()):
            factors = []
            if i:
                factors.append("L" if i == 1 else f"L^{i}")
            if k:
                factors.append(f"V{k}")
            for m, r in syms:
                factors.append(f"S{m}" if r == 1 else f"psi{r}(S{m})")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


def _clebsch_gordan(a: int, b: int):
    """V_a * V_b = sum_{i <= min(a,b)} L^i V_{a+b-2i}."""
    return [(i, a + b - 2 * i) for i in range(min(a, b) + 1)]


ONE = MotiveClass.scalar(1)
ZERO = MotiveClass()
L = MotiveClass.L(1)


def multiply(x: MotiveClass, y: MotiveClass) -> MotiveClass:
    return MotiveClass.coerce(x) * MotiveClass.coerce(y)


@lru_cache(maxsize=None)
def _adams_V(r: int, k: int) -> MotiveClass:
    # psi^r(V_k) = sum_j alpha^{rj} beta^{r(k-j)}; rewrite a symmetric
    # homogeneous form sum_j c_j alpha^j beta^{N-j} as sum_i (c_i - c_{i-1}) L^i V_{N-2i}
    n = r * k
    coeff = [0] * (n + 1)
    for j in range(k + 1):
        coeff[r * j] += 1
    out: Dict[Monomial, Number] = {}
    for i in range(n // 2 + 1):
        c = coeff[i] - (coeff[i - 1] if i else 0)
        if c:
            out[(i, n - 2 * i, ())] = c
    return MotiveClass(out)


def adams(r: int, x: MotiveClass) -> MotiveClass:
    """Adams operation psi^r; a ring endomorphism with psi^r psi^s = psi^{rs}."""
    if r < 1:
        raise ValueError("Adams operations need r >= 1")
    x = MotiveClass.coerce(x)
    if r == 1:
        return x
    out = ZERO
    for (i, k, syms), c in x._terms.items():
        term = MotiveClass({(r * i, 0, tuple(sorted((m, r * s) for m, s in syms))): c})
        if k:
            term = term * _adams_V(r, k)
        out = out + term
    return out


def jacobian_factor(g: int) -> MotiveClass:
    """Relative class sum_k (-1)^k Lambda^k V_1 of the Jacobian of a genus-g fiber."""
    if g == 0:
        return ONE
    if g == 1:
        return ONE - MotiveClass.V(1) + L
    raise NotImplementedError(
        f"genus {g} Jacobian factor needs a plugin table of interior classes"
    )


def cusp_form_dimension(weight: int) -> int:
    """Dimension of level-one cusp forms of the given weight."""
    if weight < 0 or weight % 2:
        return 0
    if weight == 2:
        return 0
    q, r = divmod(weight, 12)
    full = q + (0 if r == 2 else 1)  # dim M_k
    return max(full - 1, 0)


def eichler_shimura(k: int) -> MotiveClass:
    """Compactly supported Euler characteristic of V_k over M_{1,1}."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return L
    if k % 2:
        return ZERO
    weight = k + 2
    if weight in _NO_CUSP_FORMS or cusp_form_dimension(weight) == 0:
        return -ONE
    return -MotiveClass.S(weight) - ONE


def integrate_M11(x: MotiveClass) -> MotiveClass:
    x = MotiveClass.coerce(x)
    out = ZERO
    for (i, k, syms), c in x._terms.items():
        base = MotiveClass({(i, 0, syms): c})
        out = out + base * eichler_shimura(k)
    return out


# -- E-polynomials ----------------------------------------------------

EPoly = Dict[Tuple[int, int], Number]


def _epoly_mul(a: EPoly, b: EPoly) -> EPoly:
    out: EPoly = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def _symbol_epoly(weight: int, twist: int) -> EPoly:
    dim = cusp_form_dimension(weight)
    e = twist * (weight - 1)
    if dim == 0:
        return {}
    return {(e, 0): dim, (0, e): dim}


def e_polynomial(x: MotiveClass) -> EPoly:
    """Hodge-Deligne polynomial {(p, q): coefficient} with L -> uv."""
    x = MotiveClass.coerce(x)
    if not x.is_absolute():
        raise ValueError("E-polynomial is only defined for absolute classes")
    out: EPoly = {}
    for (i, _, syms), c in x._terms.items():
        poly: EPoly = {(i, i): c}
        for m, r in syms:
            poly = _epoly_mul(poly, _symbol_epoly(m, r))
        for key, v in poly.items():
            out[key] = out.get(key, 0) + v
    return {k: _norm(v) for k, v in sorted(out.items()) if v}


def epoly_to_text(poly: EPoly) -> str:
    """Render as a polynomial in q = uv when possible, else in u and v."""
    if not poly:
        return "0"
    if all(i == j for i, j in poly):
        parts = []
        for (i, _), c in sorted(poly.items()):
            mono = "" if i == 0 else ("q" if i == 1 else f"q^{i}")
            parts.append(_fmt_term(c, mono))
        return " + ".join(parts).replace("+ -", "- ")
    parts = []
    for (i, j), c in sorted(poly.items()):
        mono = "*".join(
            s for s in (
                "" if i == 0 else ("u" if i == 1 else f"u^{i}"),
                "" if j == 0 else ("v" if j == 1 else f"v^{j}"),
            ) if s
        )
        parts.append(_fmt_term(c, mono))
    return " + ".join(parts).replace("+ -", "- ")


def _fmt_term(c, mono: str) -> str:
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    return f"{c}{mono}"


# -- serialization ----------------------------------------------------

def _coeff_json(c: Number):
    return c if isinstance(c, int) else f"{c.numerator}/{c.denominator}"


def _coeff_from_json(c) -> Number:
    if isinstance(c, int):
        return c
    if isinstance(c, str):
        return _norm(Fraction(c))
    raise ValueError(f"bad coefficient {c!r}")


def to_json(x: MotiveClass) -> list:
    out = []
    for (i, k, syms), c in x.items():
        entry = {"l_exp": i}
        if k:
            entry["v_index"] = k
        if len(syms) == 1 and syms[0][1] == 1:
            entry["s_weight"] = syms[0][0]
        elif syms:
            entry["symbols"] = [list(s) for s in syms]
        entry["coeff"] = _coeff_json(c)
        out.append(entry)
    return out


def from_json(data: Iterable[dict]) -> MotiveClass:
    terms: Dict[Monomial, Number] = {}
    for entry in data:
        i = int(entry.get("l_exp", 0))
        k = int(entry.get("v_index", 0))
        if "s_weight" in entry:
            syms = ((int(entry["s_weight"]), 1),)
        else:
            syms = tuple(sorted((int(m), int(r)) for m, r in entry.get("symbols", [])))
        mono = (i, k, syms)
        terms[mono] = terms.get(mono, 0) + _coeff_from_json(entry["coeff"])
    return MotiveClass(terms)
