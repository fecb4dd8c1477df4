"""Truncated Taylor (jet) arithmetic and fixed-size vector algebra.

A :class:`Jet` stores the normalized Taylor coefficients ``c_k = f^(k)(t0)/k!``
of a scalar function about an expansion point, up to a fixed order K.
Arithmetic and elementary functions propagate the whole coefficient vector
through the standard convolution recurrences, so the k-th derivative of any
composite expression is exact to rounding.  :class:`VecJ` bundles 3 or 6 jets
sharing one order and provides the dot/cross/norm operations needed for frame
computations.  :func:`fd_oracle` is a finite-difference estimator with one
Richardson extrapolation step, kept deliberately independent of the jet code
path so the two can cross-check each other.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

__all__ = [
    "Jet",
    "VecJ",
    "JetError",
    "DivisionByZeroJet",
    "DomainError",
    "OrderExceeded",
    "DimensionMismatch",
    "ZeroNorm",
    "RankDeficient",
    "NonFiniteJet",
    "JET_FUNCTIONS",
    "jet_pow",
    "gram_schmidt",
    "fd_oracle",
]

# Division-by-zero guard sits at the subnormal boundary rather than exact
# zero so near-underflow denominators fail loudly instead of spraying Inf.
DIV_FLOOR = 1e-300

# Below this norm the direction of a vector is numerically meaningless.
NORM_FLOOR = 1e-12


class JetError(ValueError):
    """Base class for jet and vector algebra failures."""


class DivisionByZeroJet(JetError):
    """Denominator jet has (numerically) zero constant term."""


class DomainError(JetError):
    """Elementary function evaluated outside its domain.

    Carries the function name and the offending constant term; an optional
    ``span`` is attached by the expression evaluator.
    """

    def __init__(self, func: str, value: float, span=None):
        self.func = func
        self.value = value
        self.span = span
        super().__init__(f"{func} undefined at {value!r}")


class OrderExceeded(JetError):
    """Requested derivative order exceeds the jet's truncation order."""


class DimensionMismatch(JetError):
    """Vector dimensions or jet orders do not agree."""


class ZeroNorm(JetError):
    """Normalization of a (numerically) zero vector was requested."""


class RankDeficient(JetError):
    """Gram-Schmidt hit a linearly dependent vector.

    ``index`` is the 0-based position of the first dependent input.
    """

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"vector {index} is linearly dependent on its predecessors")


class NonFiniteJet(JetError):
    """An operation produced NaN or infinite coefficients."""


def _finite(coeffs: list[float]) -> list[float]:
    # Summing is one C-level pass; any NaN/Inf entry taints the total.  A
    # finite aggregate that overflows the sum also trips this, which is fine:
    # coefficients at 1e308 scale are already past any meaningful use.
    if not math.isfinite(sum(coeffs)):
        raise NonFiniteJet("operation produced non-finite coefficients")
    return coeffs


class Jet:
    """Normalized Taylor coefficients c_0..c_K of a scalar about one point."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[float]):
        cs = tuple(float(c) for c in coeffs)
        if not cs:
            raise ValueError("a jet needs at least the order-0 coefficient")
        self.coeffs = cs

    @classmethod
    def variable(cls, t0: float, order: int) -> "Jet":
        """Jet of the identity function at t0: [t0, 1, 0, ..., 0]."""
        if order < 0:
            raise ValueError("jet order must be >= 0")
        if order == 0:
            return cls((float(t0),))
        return cls((float(t0), 1.0) + (0.0,) * (order - 1))

    @classmethod
    def constant(cls, value: float, order: int) -> "Jet":
        if order < 0:
            raise ValueError("jet order must be >= 0")
        return cls((float(value),) + (0.0,) * order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> float:
        return self.coeffs[0]

    def derivative(self, k: int) -> float:
        """k-th derivative at the expansion point, i.e. k! * c_k."""
        if k < 0:
            raise ValueError("derivative order must be >= 0")
        if k > self.order:
            raise OrderExceeded(f"derivative {k} of an order-{self.order} jet")
        return math.factorial(k) * self.coeffs[k]

    def d(self) -> "Jet":
        """Jet of the derivative function (one order lower)."""
        if self.order == 0:
            raise OrderExceeded("cannot differentiate an order-0 jet")
        return Jet(tuple((k + 1) * c for k, c in enumerate(self.coeffs[1:])))

    def truncated(self, order: int) -> "Jet":
        if order > self.order:
            raise OrderExceeded(f"cannot extend an order-{self.order} jet to {order}")
        if order == self.order:
            return self
        return Jet(self.coeffs[: order + 1])

    def is_finite(self) -> bool:
        return all(math.isfinite(c) for c in self.coeffs)

    def _coerced(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise DimensionMismatch(
                    f"jet orders differ: {self.order} vs {other.order}"
                )
            return other
        if isinstance(other, (int, float)):
            return Jet.constant(other, self.order)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerced(other)
        if o is NotImplemented:
            return NotImplemented
        out = [a + b for a, b in zip(self.coeffs, o.coeffs)]
        if not math.isfinite(sum(out)):
            raise NonFiniteJet("addition produced non-finite coefficients")
        return Jet(out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerced(other)
        if o is NotImplemented:
            return NotImplemented
        out = [a - b for a, b in zip(self.coeffs, o.coeffs)]
        if not math.isfinite(sum(out)):
            raise NonFiniteJet("subtraction produced non-finite coefficients")
        return Jet(out)

    def __rsub__(self, other):
        o = self._coerced(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Jet(tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        o = self._coerced(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        n = len(a)
        out = []
        tot = 0.0
        for k in range(n):
            s = 0.0
            for j in range(k + 1):
                s += a[j] * b[k - j]
            out.append(s)
            tot += s
        if not math.isfinite(tot):
            raise NonFiniteJet("multiplication produced non-finite coefficients")
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerced(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if abs(b[0]) < DIV_FLOOR:
            raise DivisionByZeroJet(f"denominator constant term {b[0]!r}")
        n = len(a)
        out: list[float] = []
        tot = 0.0
        for k in range(n):
            s = a[k]
            for j in range(k):
                s -= out[j] * b[k - j]
            s /= b[0]
            out.append(s)
            tot += s
        if not math.isfinite(tot):
            raise NonFiniteJet("division produced non-finite coefficients")
        return Jet(out)

    def __rtruediv__(self, other):
        o = self._coerced(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"


# --- elementary functions -------------------------------------------------
#
# All recurrences below are the classic normalized-coefficient forms: with
# v = f(u), the identity u' * f'(u) = v' becomes a convolution between the
# shifted coefficient sequences.


def _sin_cos(u: Jet) -> tuple[Jet, Jet]:
    uc = u.coeffs
    n = len(uc)
    s = [0.0] * n
    c = [0.0] * n
    s[0] = math.sin(uc[0])
    c[0] = math.cos(uc[0])
    for k in range(1, n):
        ss = 0.0
        cc = 0.0
        for j in range(1, k + 1):
            ss += j * uc[j] * c[k - j]
            cc += j * uc[j] * s[k - j]
        s[k] = ss / k
        c[k] = -cc / k
    return Jet(_finite(s)), Jet(_finite(c))


def jet_sin(u: Jet) -> Jet:
    return _sin_cos(u)[0]


def jet_cos(u: Jet) -> Jet:
    return _sin_cos(u)[1]


def jet_tan(u: Jet) -> Jet:
    if abs(math.cos(u.coeffs[0])) < 1e-12:
        raise DomainError("tan", u.coeffs[0])
    s, c = _sin_cos(u)
    return s / c


def jet_exp(u: Jet) -> Jet:
    uc = u.coeffs
    n = len(uc)
    v = [0.0] * n
    try:
        v[0] = math.exp(uc[0])
    except OverflowError:
        raise NonFiniteJet(f"exp overflows at {uc[0]!r}") from None
    for k in range(1, n):
        s = 0.0
        for j in range(1, k + 1):
            s += j * uc[j] * v[k - j]
        v[k] = s / k
    return Jet(_finite(v))


def jet_log(u: Jet) -> Jet:
    uc = u.coeffs
    if uc[0] <= 0.0:
        raise DomainError("log", uc[0])
    n = len(uc)
    v = [0.0] * n
    v[0] = math.log(uc[0])
    for k in range(1, n):
        s = 0.0
        for j in range(1, k):
            s += j * v[j] * uc[k - j]
        v[k] = (uc[k] - s / k) / uc[0]
    return Jet(_finite(v))


def jet_sqrt(u: Jet) -> Jet:
    uc = u.coeffs
    if uc[0] <= 0.0:
        raise DomainError("sqrt", uc[0])
    n = len(uc)
    v = [0.0] * n
    v[0] = math.sqrt(uc[0])
    for k in range(1, n):
        s = 0.0
        for j in range(1, k):
            s += v[j] * v[k - j]
        v[k] = (uc[k] - s) / (2.0 * v[0])
    return Jet(_finite(v))


def _sinh_cosh(u: Jet) -> tuple[Jet, Jet]:
    uc = u.coeffs
    n = len(uc)
    s = [0.0] * n
    c = [0.0] * n
    try:
        s[0] = math.sinh(uc[0])
        c[0] = math.cosh(uc[0])
    except OverflowError:
        raise NonFiniteJet(f"sinh/cosh overflow at {uc[0]!r}") from None
    for k in range(1, n):
        ss = 0.0
        cc = 0.0
        for j in range(1, k + 1):
            ss += j * uc[j] * c[k - j]
            cc += j * uc[j] * s[k - j]
        s[k] = ss / k
        c[k] = cc / k
    return Jet(_finite(s)), Jet(_finite(c))


def jet_sinh(u: Jet) -> Jet:
    return _sinh_cosh(u)[0]


def jet_cosh(u: Jet) -> Jet:
    return _sinh_cosh(u)[1]


def jet_pow(u: Jet, r: float) -> Jet:
    """u**r.

    Integer exponents go through repeated multiplication (well-defined for
    negative bases, and for zero bases when r >= 0); fractional exponents
    require a positive constant term and reduce to exp(r*log(u)).
    """
    rf = float(r)
    if rf.is_integer():
        n = int(rf)
        if n == 0:
            return Jet.constant(1.0, u.order)
        p = _int_pow(u, abs(n))
        if n > 0:
            return p
        return Jet.constant(1.0, u.order) / p
    if u.coeffs[0] <= 0.0:
        raise DomainError("pow", u.coeffs[0])
    return jet_exp(jet_log(u) * rf)


def _int_pow(u: Jet, n: int) -> Jet:
    result = None
    base = u
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    assert result is not None
    return result


JET_FUNCTIONS: dict[str, Callable[[Jet], Jet]] = {
    "sin": jet_sin,
    "cos": jet_cos,
    "tan": jet_tan,
    "exp": jet_exp,
    "log": jet_log,
    "sqrt": jet_sqrt,
    "sinh": jet_sinh,
    "cosh": jet_cosh,
}


class VecJ:
    """Vector of 3 or 6 jets sharing one order."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[Jet]):
        es = tuple(entries)
        if len(es) not in (3, 6):
            raise DimensionMismatch(f"VecJ dimension must be 3 or 6, got {len(es)}")
        order = es[0].order
        for e in es:
            if e.order != order:
                raise DimensionMismatch("VecJ entries must share one order")
        self.entries = es

    @classmethod
    def constant(cls, values: Sequence[float], order: int) -> "VecJ":
        return cls(Jet.constant(v, order) for v in values)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def order(self) -> int:
        return self.entries[0].order

    def value(self) -> tuple[float, ...]:
        return tuple(e.coeffs[0] for e in self.entries)

    def _check(self, other: "VecJ") -> None:
        if not isinstance(other, VecJ):
            raise DimensionMismatch("expected a VecJ")
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimensions differ: {self.dim} vs {other.dim}")
        if other.order != self.order:
            raise DimensionMismatch(f"orders differ: {self.order} vs {other.order}")

    def dot(self, other: "VecJ") -> Jet:
        self._check(other)
        acc = self.entries[0] * other.entries[0]
        for a, b in zip(self.entries[1:], other.entries[1:]):
            acc = acc + a * b
        return acc

    def cross(self, other: "VecJ") -> "VecJ":
        self._check(other)
        if self.dim != 3:
            raise DimensionMismatch("cross product requires dimension 3")
        a1, a2, a3 = self.entries
        b1, b2, b3 = other.entries
        return VecJ(
            (
                a2 * b3 - a3 * b2,
                a3 * b1 - a1 * b3,
                a1 * b2 - a2 * b1,
            )
        )

    def norm(self) -> Jet:
        sq = self.dot(self)
        if sq.coeffs[0] < NORM_FLOOR * NORM_FLOOR:
            raise ZeroNorm(f"vector norm {math.sqrt(max(sq.coeffs[0], 0.0)):.3e} below floor")
        return jet_sqrt(sq)

    def normalized(self) -> "VecJ":
        return self.scale(Jet.constant(1.0, self.order) / self.norm())

    def scale(self, s) -> "VecJ":
        if isinstance(s, (int, float)):
            s = Jet.constant(s, self.order)
        return VecJ(e * s for e in self.entries)

    def __add__(self, other):
        self._check(other)
        return VecJ(a + b for a, b in zip(self.entries, other.entries))

    def __sub__(self, other):
        self._check(other)
        return VecJ(a - b for a, b in zip(self.entries, other.entries))

    def __neg__(self):
        return VecJ(-a for a in self.entries)

    def d(self) -> "VecJ":
        return VecJ(e.d() for e in self.entries)

    def truncated(self, order: int) -> "VecJ":
        return VecJ(e.truncated(order) for e in self.entries)

    def __repr__(self):
        return f"VecJ({list(self.entries)!r})"


# --- plain-float helpers ----------------------------------------------------


def _fdot(a: Sequence[float], b: Sequence[float]) -> float:
    return sum(x * y for x, y in zip(a, b))


def _fnorm(a: Sequence[float]) -> float:
    return math.sqrt(_fdot(a, a))


def gram_schmidt(
    vectors: Sequence[Sequence[float]], tol: float = 1e-12
) -> list[tuple[float, ...]]:
    """Orthonormalize real vectors, rejecting near-dependent inputs.

    Modified Gram-Schmidt; raises :class:`RankDeficient` with the 0-based
    index of the first vector whose residual norm after projection drops
    below ``tol``.
    """
    vs = [tuple(float(x) for x in v) for v in vectors]
    if not vs:
        raise ValueError("gram_schmidt needs at least one vector")
    dim = len(vs[0])
    if dim not in (3, 6):
        raise DimensionMismatch(f"vectors must have dimension 3 or 6, got {dim}")
    basis: list[tuple[float, ...]] = []
    for i, v in enumerate(vs):
        if len(v) != dim:
            raise DimensionMismatch("vectors must share one dimension")
        u = list(v)
        for e in basis:
            r = _fdot(u, e)
            u = [x - r * y for x, y in zip(u, e)]
        nrm = _fnorm(u)
        if nrm < tol:
            raise RankDeficient(i)
        basis.append(tuple(x / nrm for x in u))
    return basis


# --- finite-difference oracle ------------------------------------------------

# Near-optimal plain central-difference steps at double precision.
FD_DEFAULT_STEP = {1: 1e-5, 2: 1e-4, 3: 1e-3}


def _central(f: Callable[[float], float], t0: float, k: int, h: float) -> float:
    if k == 1:
        return (f(t0 + h) - f(t0 - h)) / (2.0 * h)
    if k == 2:
        return (f(t0 + h) - 2.0 * f(t0) + f(t0 - h)) / (h * h)
    # k == 3
    return (f(t0 + 2 * h) - 2.0 * f(t0 + h) + 2.0 * f(t0 - h) - f(t0 - 2 * h)) / (
        2.0 * h * h * h
    )


def fd_oracle(
    f: Callable[[float], float], t0: float, k: int, h: float | None = None
) -> float:
    """Central-difference k-th derivative with one Richardson step.

    Combines the symmetric stencils at h and h/2; the h**2 error terms
    cancel, leaving an O(h**4) truncation error.  Independent of the jet
    code by construction: callers compare the two.
    """
    if k not in (1, 2, 3):
        raise ValueError("fd_oracle supports derivative orders 1..3")
    if h is None:
        h = FD_DEFAULT_STEP[k]
    # Nudge h so t0 + h is exactly representable relative to t0.
    adjusted = (t0 + h) - t0
    if adjusted != 0.0:
        h = adjusted
    coarse = _central(f, t0, k, h)
    fine = _central(f, t0, k, h * 0.5)
    return (4.0 * fine - coarse) / 3.0
