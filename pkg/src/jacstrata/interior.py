"""Equivariant Hodge Euler characteristics of the open vertex moduli J_{g,n}.

Genus 0 is handled by twisted point counts on the projective line, genus 1 by
inverting the coincidence stratification of E^n fiberwise over M_{1,1} and
integrating against the Eichler-Shimura table.  Higher genus requires a plugin
table (see :meth:`InteriorProvider.load_plugin`).
"""

from __future__ import annotations

import json
import threading
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Tuple

from .equivariant import (
    EquivariantClass,
    Partition,
    as_partition,
    partitions,
    z,
)
from .motives import (
    ONE,
    ZERO,
    MotiveClass,
    adams,
    from_json,
    integrate_M11,
    L,
)


class MissingInteriorData(LookupError):
    """Raised when an interior class needs a plugin table that was not loaded."""


# -- graded helpers ----------------------------------------------------------

def power_class(x: MotiveClass, n: int) -> EquivariantClass:
    """Frobenius characteristic of X^n with S_n permuting the factors."""
    x = MotiveClass.coerce(x)
    out = {}
    for mu in partitions(n):
        c = ONE
        for k in mu:
            c = c * adams(k, x)
        out[mu] = c * Fraction(1, z(mu))
    return EquivariantClass((n,), out)


def _mul_graded(a: Dict[int, dict], b: Dict[int, dict], top: int) -> Dict[int, dict]:
    # series in the power sums: degree -> {partition: MotiveClass}
    out: Dict[int, dict] = {}
    for da, ta in a.items():
        for db, tb in b.items():
            if da + db > top:
                continue
            bucket = out.setdefault(da + db, {})
            for ka, ca in ta.items():
                for kb, cb in tb.items():
                    key = as_partition(ka + kb)
                    bucket[key] = bucket.get(key, ZERO) + ca * cb
    return out


def _nonempty_sets_series(r: int, top: int) -> Dict[int, dict]:
    # p_r o (h_1 + h_2 + ...), truncated to degree top
    out: Dict[int, dict] = {}
    k = 1
    while r * k <= top:
        out[r * k] = {
            tuple(r * part for part in mu): MotiveClass.scalar(Fraction(1, z(mu)))
            for mu in partitions(k)
        }
        k += 1
    return out


def configuration_class(x: MotiveClass, n: int) -> EquivariantClass:
    """Frobenius characteristic of the ordered configuration space F(X, n).

    Uses sum_n ch(X^n) = (sum_b ch F(X, b)) o (h_1 + h_2 + ...), solved
    degree by degree.  The coefficients of F are not twisted by the plethysm
    since the inner series has rational coefficients.
    """
    x = MotiveClass.coerce(x)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return EquivariantClass((0,), {(): ONE})
    series = {r: _nonempty_sets_series(r, n) for r in range(1, n + 1)}
    known: List[EquivariantClass] = [EquivariantClass((0,), {(): ONE})]
    for b in range(1, n + 1):
        target = {k[0]: c for k, c in power_class(x, b).items()}
        for smaller in range(1, b):
            composed = _compose_degree(known[smaller], series, b)
            for mu, c in composed.items():
                target[mu] = target.get(mu, ZERO) - c
        known.append(EquivariantClass((b,), target))
    return known[n]


def _compose_degree(F: EquivariantClass, series, degree: int) -> dict:
    # degree-`degree` part of F o (h_1 + h_2 + ...)
    out: dict = {}
    for (nu,), c in F.items():
        acc = {0: {(): ONE}}
        for part in nu:
            acc = _mul_graded(acc, series[part], degree)
        for mu, coeff in acc.get(degree, {}).items():
            out[mu] = out.get(mu, ZERO) + c * coeff
    return out


# -- genus 0: twisted point counts -----------------------------------------

def _mobius(n: int) -> int:
    out, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            out = -out
        p += 1
    if m > 1:
        out = -out
    return out


def _poly_mul(a: List[int], b: List[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add(a: List[int], b: List[int]) -> List[int]:
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return out


def _poly_divexact(num: List[int], den: List[int]) -> List[int]:
    num = list(num)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    while den[-1] == 0:
        den = den[:-1]
    if len(num) < len(den):
        if any(num):
            raise ArithmeticError("division by q^3 - q is not exact")
        return [0]
    quot = [0] * (len(num) - len(den) + 1)
    for i in range(len(quot) - 1, -1, -1):
        c, r = divmod(num[i + len(den) - 1], den[-1])
        if r:
            raise ArithmeticError("division by q^3 - q is not exact")
        quot[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num):
        raise ArithmeticError("division by q^3 - q is not exact")
    return quot


def closed_points_poly(k: int) -> List[int]:
    """b_k(q) = sum_{d | k} mobius(d) (q^{k/d} + 1): points of exact degree k on P^1."""
    out = [0] * (k + 1)
    for d in range(1, k + 1):
        if k % d == 0:
            mu = _mobius(d)
            out[k // d] += mu
            out[0] += mu
    return out


def twisted_m0n_count(mu: Partition) -> List[int]:
    """Polynomial T_mu(q): Frobenius-twisted point count of M_{0,n}."""
    mult: Dict[int, int] = {}
    for k in mu:
        mult[k] = mult.get(k, 0) + 1
    num = [1]
    for k, m in sorted(mult.items()):
        b = closed_points_poly(k)
        for j in range(m):
            num = _poly_mul(num, _poly_add(b, [-j * k]))
    return _poly_divexact(num, [0, -1, 0, 1])


def _poly_to_motive(poly: List[int]) -> MotiveClass:
    return MotiveClass({(i, 0, ()): c for i, c in enumerate(poly) if c})


def genus0_class(n: int) -> EquivariantClass:
    if n < 3:
        raise ValueError("M_{0,n} needs n >= 3")
    return EquivariantClass(
        (n,),
        {
            mu: _poly_to_motive(twisted_m0n_count(mu)) * Fraction(1, z(mu))
            for mu in partitions(n)
        },
    )


# -- genus 1 ------------------------------------------------------------------

ELLIPTIC_CURVE = ONE - MotiveClass.V(1) + L


def genus1_class(n: int) -> EquivariantClass:
    """J_{1,n} fibers over M_{1,1} with fiber F(E, n); integrate coefficientwise."""
    if n < 1:
        raise ValueError("J_{1,n} needs n >= 1")
    relative = configuration_class(ELLIPTIC_CURVE, n)
    return relative.map_coefficients(integrate_M11)


# -- provider -------------------------------------------------------------------

def _parse_partition_key(key: str) -> Partition:
    text = key.strip().strip("[]()")
    if not text:
        return ()
    return as_partition(int(t) for t in text.replace(" ", "").split(",") if t)


class InteriorProvider:
    """Memoized source of chi_c^{S_n}(J_{g,n}); genus >= 2 from plugin tables."""

    def __init__(self, plugins: Dict[Tuple[int, int], EquivariantClass] | None = None):
        self._cache: Dict[Tuple[int, int], EquivariantClass] = {}
        self._plugins: Dict[Tuple[int, int], EquivariantClass] = dict(plugins or {})
        self._lock = threading.Lock()

    def add_table(self, g: int, n: int, cls: EquivariantClass) -> None:
        if cls.shape != (n,):
            raise ValueError(f"plugin class for ({g},{n}) has shape {cls.shape}")
        if not cls.is_character_integral():
            raise ValueError(f"plugin class for ({g},{n}) fails character integrality")
        self._plugins[(g, n)] = cls

    def load_plugin(self, path) -> None:
        data = json.loads(Path(path).read_text())
        tables = data if isinstance(data, list) else [data]
        for table in tables:
            g, n = int(table["g"]), int(table["n"])
            coeffs = {
                _parse_partition_key(k): from_json(v) for k, v in table["class"].items()
            }
            self.add_table(g, n, EquivariantClass((n,), coeffs))

    def has(self, g: int, n: int) -> bool:
        return g <= 1 or (g, n) in self._plugins

    def __call__(self, g: int, n: int) -> EquivariantClass:
        key = (g, n)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if 2 * g - 2 + n <= 0:
            raise ValueError(f"J_{{{g},{n}}} is not a stable type")
        if key in self._plugins:
            value = self._plugins[key]
        elif g == 0:
            value = genus0_class(n)
        elif g == 1:
            value = genus1_class(n)
        else:
            raise MissingInteriorData(
                f"interior class of J_{{{g},{n}}} needs a plugin table: JSON "
                '{"g": int, "n": int, "class": {"<partition>": [motive terms]}}'
            )
        with self._lock:
            self._cache.setdefault(key, value)
        return self._cache[key]


DEFAULT_PROVIDER = InteriorProvider()


def interior(g: int, n: int, provider: InteriorProvider | None = None) -> EquivariantClass:
    return (provider or DEFAULT_PROVIDER)(g, n)
