"""Vertical, complete and horizontal lifts from R^3 to its tangent space.

Tangent-space points carry base coordinates x and fiber coordinates y.  For
a vector field X and a constant-coefficient connection with symbols
G[a][b][g] (a: fiber output, b: direction, g: transported index), the three
lifts evaluate at p = (x, y) as

    vertical:    base 0,     fiber X(x)
    complete:    base X(x),  fiber  sum_b y^b dX^a/dx^b
    horizontal:  base X(x),  fiber -sum_{b,g} y^b G[a][b][g] X^g(x)

Scalar functions lift as f^v(p) = f(x) and f^c(p) = y . grad f(x).  Applying
a lifted field to a lifted function is a directional derivative on the
6-dimensional space; the second-order terms that appear for f^c are obtained
from univariate jets via the polarization identity, so no nested or
multivariate jets are needed.

Curves lift pointwise: vertical to (anchor, beta(t)), complete to
(beta(t), beta'(t)), and horizontal to (beta(t), w(t)) with w parallel
transported along beta by classical 4-stage Runge-Kutta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .expr import (
    BinOp,
    ExprAst,
    FieldSpec,
    FormatError,
    CurveSpec,
    eval_float,
    eval_jet,
    parse_expr,
)
from .frenet import DomainIntervalError
from .jets import Jet, VecJ

__all__ = [
    "TangentPoint",
    "Connection",
    "LiftKind",
    "LiftedField",
    "LiftedFieldValue",
    "Prop21Result",
    "TANGENT_VARS",
    "lift_function",
    "lift_field",
    "apply_field",
    "field_sum",
    "field_scale",
    "prop21_check",
    "parallel_transport",
    "transport_grid",
    "fiber_jets",
    "lifted_point_jets",
    "parse_connection_file",
]

TANGENT_VARS = frozenset({"x1", "x2", "x3", "y1", "y2", "y3"})

# Transport resolution: steps per unit parameter length.
TRANSPORT_STEPS_PER_UNIT = 1000


@dataclass(frozen=True)
class TangentPoint:
    """A point of the tangent space: base coordinates x, fiber coordinates y."""

    x: tuple[float, float, float]
    y: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != 3 or len(self.y) != 3:
            raise ValueError("a tangent point needs 3 base and 3 fiber coordinates")
        if not all(math.isfinite(v) for v in self.x + self.y):
            raise ValueError("tangent point coordinates must be finite")


@dataclass(frozen=True)
class Connection:
    """Constant connection symbols G[a][b][g], all zero for the flat case."""

    gamma: tuple[tuple[tuple[float, ...], ...], ...]

    def __post_init__(self):
        g = tuple(tuple(tuple(float(v) for v in row) for row in plane) for plane in self.gamma)
        if len(g) != 3 or any(len(p) != 3 or any(len(r) != 3 for r in p) for p in g):
            raise ValueError("connection symbols must form a 3x3x3 array")
        for plane in g:
            for row in plane:
                for v in row:
                    if not math.isfinite(v):
                        raise ValueError("connection symbols must be finite")
        object.__setattr__(self, "gamma", g)

    @classmethod
    def flat(cls) -> "Connection":
        zero = ((0.0,) * 3,) * 3
        return cls((zero,) * 3)

    @classmethod
    def from_entries(cls, entries: dict[tuple[int, int, int], float]) -> "Connection":
        """Build from 1-based (a, b, g) -> value entries; the rest are 0."""
        g = [[[0.0] * 3 for _ in range(3)] for _ in range(3)]
        for (a, b, c), v in entries.items():
            if not (1 <= a <= 3 and 1 <= b <= 3 and 1 <= c <= 3):
                raise ValueError(f"connection indices must be in 1..3, got {(a, b, c)}")
            g[a - 1][b - 1][c - 1] = float(v)
        return cls(tuple(tuple(tuple(r) for r in p) for p in g))

    @property
    def is_flat(self) -> bool:
        return all(v == 0.0 for p in self.gamma for r in p for v in r)

    def contract(self, direction: Sequence, transported: Sequence):
        """sum_{b,g} G[a][b][g] * direction[b] * transported[g], per output a.

        Works elementwise over floats or jets (anything with * and +).
        """
        out = []
        for a in range(3):
            acc = None
            for b in range(3):
                for g in range(3):
                    coeff = self.gamma[a][b][g]
                    if coeff == 0.0:
                        continue
                    term = direction[b] * transported[g] * coeff
                    acc = term if acc is None else acc + term
            if acc is None:
                acc = 0.0 * direction[0] * transported[0]
            out.append(acc)
        return out


@dataclass(frozen=True)
class LiftKind:
    """Which lift to take, with the data the lift needs.

    Vertical lifts of curves sit over a fixed anchor point (any constant
    anchor yields an isometric fiber copy); horizontal lifts start from an
    initial fiber vector w0 at t_min.
    """

    kind: str
    anchor: tuple[float, float, float] | None = None
    w0: tuple[float, float, float] | None = None

    @classmethod
    def vertical(cls, anchor: Sequence[float] | None = None) -> "LiftKind":
        a = tuple(float(v) for v in anchor) if anchor is not None else None
        return cls("vertical", anchor=a)

    @classmethod
    def complete(cls) -> "LiftKind":
        return cls("complete")

    @classmethod
    def horizontal(cls, w0: Sequence[float]) -> "LiftKind":
        return cls("horizontal", w0=tuple(float(v) for v in w0))

    def __post_init__(self):
        if self.kind not in ("vertical", "complete", "horizontal"):
            raise ValueError(f"unknown lift kind {self.kind!r}")
        for vec in (self.anchor, self.w0):
            if vec is not None and not all(math.isfinite(v) for v in vec):
                raise ValueError("lift parameters must be finite")
        if self.kind == "horizontal" and self.w0 is None:
            raise ValueError("horizontal lift needs an initial fiber vector w0")


# --- scalar helpers (partials via univariate jets) ---------------------------


def _eval_field_components(spec: FieldSpec, x: Sequence[float]) -> tuple[float, ...]:
    b = {"x1": float(x[0]), "x2": float(x[1]), "x3": float(x[2])}
    return tuple(eval_float(c, b) for c in spec.components)


def _dir_jet_bindings(x: Sequence[float], d: Sequence[float], order: int):
    names = ("x1", "x2", "x3")
    return {
        name: Jet((float(xv),) + (float(dv),) + (0.0,) * (order - 1))
        for name, xv, dv in zip(names, x, d)
    }


def _dir_deriv(ast: ExprAst, x: Sequence[float], d: Sequence[float]) -> float:
    """First derivative of s -> f(x + s d) at 0."""
    return eval_jet(ast, _dir_jet_bindings(x, d, 1)).coeffs[1]


def _dir_second(ast: ExprAst, x: Sequence[float], d: Sequence[float]) -> float:
    """Second derivative of s -> f(x + s d) at 0."""
    return 2.0 * eval_jet(ast, _dir_jet_bindings(x, d, 2)).coeffs[2]


def _mixed_second(
    ast: ExprAst, x: Sequence[float], a: Sequence[float], b: Sequence[float]
) -> float:
    """sum_{i,j} a_i b_j d2f/dx_i dx_j via polarization of directional seconds."""
    ab = tuple(u + v for u, v in zip(a, b))
    return 0.5 * (_dir_second(ast, x, ab) - _dir_second(ast, x, a) - _dir_second(ast, x, b))


def _grad(ast: ExprAst, x: Sequence[float]) -> tuple[float, float, float]:
    basis = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    return tuple(_dir_deriv(ast, x, e) for e in basis)


def _jacobian(spec: FieldSpec, x: Sequence[float]) -> list[list[float]]:
    """J[a][b] = dX^a/dx^b."""
    basis = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    cols = []
    for e in basis:
        bindings = _dir_jet_bindings(x, e, 1)
        cols.append([eval_jet(c, bindings).coeffs[1] for c in spec.components])
    return [[cols[b][a] for b in range(3)] for a in range(3)]


# --- function and field lifts -------------------------------------------------


def lift_function(f: FieldSpec, kind: str, p: TangentPoint) -> float:
    """Value of f^v or f^c at p: the pullback f(x), or y . grad f(x)."""
    if f.kind != "scalar":
        raise ValueError("lift_function expects a scalar field")
    if kind in ("v", "vertical"):
        return eval_float(f.components[0], {"x1": p.x[0], "x2": p.x[1], "x3": p.x[2]})
    if kind in ("c", "complete"):
        return _dir_deriv(f.components[0], p.x, p.y)
    raise ValueError(f"unknown function lift kind {kind!r}")


@dataclass(frozen=True)
class LiftedFieldValue:
    base: tuple[float, float, float]
    fiber: tuple[float, float, float]

    def as_tuple(self) -> tuple[float, ...]:
        return self.base + self.fiber


class LiftedField:
    """A lifted vector field, evaluable at tangent points."""

    def __init__(self, field: FieldSpec, kind: str, connection: Connection | None = None):
        if field.kind != "vector":
            raise ValueError("lift_field expects a vector field")
        if kind not in ("vertical", "complete", "horizontal"):
            raise ValueError(f"unknown field lift kind {kind!r}")
        self.field = field
        self.kind = kind
        self.connection = connection or Connection.flat()

    def at(self, p: TangentPoint) -> LiftedFieldValue:
        xval = _eval_field_components(self.field, p.x)
        if self.kind == "vertical":
            return LiftedFieldValue((0.0, 0.0, 0.0), xval)
        if self.kind == "complete":
            jac = _jacobian(self.field, p.x)
            fiber = tuple(
                sum(p.y[b] * jac[a][b] for b in range(3)) for a in range(3)
            )
            return LiftedFieldValue(xval, fiber)
        fiber = tuple(-v for v in self.connection.contract(p.y, xval))
        return LiftedFieldValue(xval, fiber)


_KIND_ALIASES = {
    "v": "vertical",
    "c": "complete",
    "h": "horizontal",
    "H": "horizontal",
    "vertical": "vertical",
    "complete": "complete",
    "horizontal": "horizontal",
}


def lift_field(
    X: FieldSpec, kind: str, connection: Connection | None = None
) -> LiftedField:
    try:
        kind = _KIND_ALIASES[kind]
    except KeyError:
        raise ValueError(f"unknown field lift kind {kind!r}") from None
    return LiftedField(X, kind, connection)


def apply_field(F: LiftedField, g, p: TangentPoint) -> float:
    """Directional derivative of a scalar on the tangent space along F at p.

    ``g`` is either a pair (kind, FieldSpec) with kind in {'v', 'c'}, a raw
    expression over x1..x3, y1..y3 (string or AST), or a plain callable of
    six floats is not supported: the partials must be exact.
    """
    val = F.at(p)
    a, b = val.base, val.fiber
    if isinstance(g, tuple) and len(g) == 2 and isinstance(g[1], FieldSpec):
        kind, spec = g
        if spec.kind != "scalar":
            raise ValueError("apply_field expects a scalar FieldSpec")
        ast = spec.components[0]
        if kind in ("v", "vertical"):
            # g depends on x only.
            return _dir_deriv(ast, p.x, a)
        if kind in ("c", "complete"):
            # d/dx part needs mixed seconds of f against the fiber coordinate;
            # d/dy part is just grad f against the fiber direction.
            return _mixed_second(ast, p.x, a, p.y) + _dir_deriv(ast, p.x, b)
        raise ValueError(f"unknown scalar lift kind {kind!r}")
    if isinstance(g, str):
        g = parse_expr(g, TANGENT_VARS)
    direction = dict(
        zip(
            ("x1", "x2", "x3", "y1", "y2", "y3"),
            ((p.x[0], a[0]), (p.x[1], a[1]), (p.x[2], a[2]),
             (p.y[0], b[0]), (p.y[1], b[1]), (p.y[2], b[2])),
        )
    )
    bindings = {name: Jet(pair) for name, pair in direction.items()}
    return eval_jet(g, bindings).coeffs[1]


def _apply_scalar_field(X: FieldSpec, f: FieldSpec, x: Sequence[float]) -> float:
    """(Xf)(x) = X(x) . grad f(x)."""
    return _dir_deriv(f.components[0], x, _eval_field_components(X, x))


def _apply_scalar_field_complete(
    X: FieldSpec, f: FieldSpec, p: TangentPoint
) -> float:
    """(Xf)^c at p = (D_y X)(x) . grad f(x) + sum y^b X^g d2f/dx^b dx^g."""
    xval = _eval_field_components(X, p.x)
    jac = _jacobian(X, p.x)
    dyX = tuple(sum(p.y[b] * jac[a][b] for b in range(3)) for a in range(3))
    grad_f = _grad(f.components[0], p.x)
    first = sum(u * v for u, v in zip(dyX, grad_f))
    return first + _mixed_second(f.components[0], p.x, p.y, xval)


# --- field algebra on ASTs ------------------------------------------------------


def _synth(op: str, left: ExprAst, right: ExprAst) -> ExprAst:
    return BinOp(op, left, right, (0, 0))


def field_sum(X: FieldSpec, Y: FieldSpec) -> FieldSpec:
    if X.kind != Y.kind:
        raise ValueError("cannot add fields of different kinds")
    comps = tuple(_synth("+", a, b) for a, b in zip(X.components, Y.components))
    return FieldSpec(X.kind, comps)


def field_scale(f: FieldSpec, X: FieldSpec) -> FieldSpec:
    """The module product fX of a scalar and a vector field."""
    if f.kind != "scalar" or X.kind != "vector":
        raise ValueError("field_scale expects (scalar, vector)")
    fa = f.components[0]
    return FieldSpec("vector", tuple(_synth("*", fa, c) for c in X.components))


# --- lift identity suite ----------------------------------------------------------


@dataclass(frozen=True)
class Prop21Result:
    """Absolute residuals of the lift identity suite at one tangent point."""

    residuals: dict[str, float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _max_abs_diff(u: LiftedFieldValue, v: Sequence[float]) -> float:
    return max(abs(a - b) for a, b in zip(u.as_tuple(), v))


def prop21_check(
    X: FieldSpec,
    Y: FieldSpec,
    f: FieldSpec,
    g: FieldSpec,
    G: Connection,
    p: TangentPoint,
) -> Prop21Result:
    """Residuals of the lift identities at p.

    Checked componentwise: additivity of all three lifts; the module rules
    (fX)^v = f^v X^v, (fX)^c = f^c X^v + f^v X^c, (fX)^H = f^v X^H; and the
    scalar pairings X^v(f^v) = 0, X^c(f^v) = X^v(f^c) = X^H(f^v) = (Xf)^v,
    X^c(f^c) = (Xf)^c, each evaluated for both scalar arguments.
    """
    res: dict[str, float] = {}
    kinds = ("vertical", "complete", "horizontal")
    short = {"vertical": "v", "complete": "c", "horizontal": "h"}

    XY = field_sum(X, Y)
    for kind in kinds:
        left = lift_field(XY, kind, G).at(p)
        xa = lift_field(X, kind, G).at(p).as_tuple()
        ya = lift_field(Y, kind, G).at(p).as_tuple()
        res[f"additivity_{short[kind]}"] = _max_abs_diff(
            left, tuple(u + v for u, v in zip(xa, ya))
        )

    fX = field_scale(f, X)
    fv = lift_function(f, "v", p)
    fc = lift_function(f, "c", p)
    Xv = lift_field(X, "vertical", G).at(p).as_tuple()
    Xc = lift_field(X, "complete", G).at(p).as_tuple()
    Xh = lift_field(X, "horizontal", G).at(p).as_tuple()
    res["module_v"] = _max_abs_diff(
        lift_field(fX, "vertical", G).at(p), tuple(fv * u for u in Xv)
    )
    res["module_c"] = _max_abs_diff(
        lift_field(fX, "complete", G).at(p),
        tuple(fc * u + fv * w for u, w in zip(Xv, Xc)),
    )
    res["module_h"] = _max_abs_diff(
        lift_field(fX, "horizontal", G).at(p), tuple(fv * u for u in Xh)
    )

    FXv = lift_field(X, "vertical", G)
    FXc = lift_field(X, "complete", G)
    FXh = lift_field(X, "horizontal", G)
    for scalar, tag in ((f, "f"), (g, "g")):
        xf_v = _apply_scalar_field(X, scalar, p.x)
        xf_c = _apply_scalar_field_complete(X, scalar, p)
        res[f"Xv_{tag}v"] = abs(apply_field(FXv, ("v", scalar), p))
        res[f"Xc_{tag}v"] = abs(apply_field(FXc, ("v", scalar), p) - xf_v)
        res[f"Xv_{tag}c"] = abs(apply_field(FXv, ("c", scalar), p) - xf_v)
        res[f"Xc_{tag}c"] = abs(apply_field(FXc, ("c", scalar), p) - xf_c)
        res[f"XH_{tag}v"] = abs(apply_field(FXh, ("v", scalar), p) - xf_v)
    return Prop21Result(res)


# --- parallel transport -------------------------------------------------------------


def _curve_velocity(curve: CurveSpec, t: float) -> tuple[float, float, float]:
    tj = Jet.variable(t, 1)
    return tuple(eval_jet(c, {"t": tj}).coeffs[1] for c in curve.components)


def _transport_rhs(G: Connection, curve: CurveSpec, u: float, w: Sequence[float]):
    vel = _curve_velocity(curve, u)
    return [-v for v in G.contract(vel, w)]


def _rk4_segment(
    G: Connection,
    curve: CurveSpec,
    w: list[float],
    t0: float,
    t1: float,
    steps: int,
) -> list[float]:
    h = (t1 - t0) / steps
    for i in range(steps):
        u = t0 + i * h
        k1 = _transport_rhs(G, curve, u, w)
        k2 = _transport_rhs(G, curve, u + 0.5 * h, [a + 0.5 * h * b for a, b in zip(w, k1)])
        k3 = _transport_rhs(G, curve, u + 0.5 * h, [a + 0.5 * h * b for a, b in zip(w, k2)])
        k4 = _transport_rhs(G, curve, u + h, [a + h * b for a, b in zip(w, k3)])
        w = [
            a + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            for a, b1, b2, b3, b4 in zip(w, k1, k2, k3, k4)
        ]
    return w


def parallel_transport(
    G: Connection,
    curve: CurveSpec,
    w0: Sequence[float],
    t: float,
    steps: int | None = None,
) -> tuple[float, float, float]:
    """Transport w0 from t_min to t along the curve: w' = -G(beta', w).

    Classical 4-stage Runge-Kutta with a fixed step (t - t_min)/steps; the
    default step count is proportional to the parameter length.  The flat
    connection transports exactly.
    """
    if t < curve.t_min or t > curve.t_max:
        raise DomainIntervalError(t, curve.domain)
    w = [float(v) for v in w0]
    if len(w) != 3:
        raise ValueError("w0 must have 3 components")
    if t == curve.t_min:
        return tuple(w)
    if steps is None:
        steps = max(1, math.ceil(TRANSPORT_STEPS_PER_UNIT * (t - curve.t_min)))
    if steps < 1:
        raise ValueError("steps must be >= 1")
    return tuple(_rk4_segment(G, curve, w, curve.t_min, t, steps))


def transport_grid(
    G: Connection,
    curve: CurveSpec,
    w0: Sequence[float],
    ts: Sequence[float],
    steps_per_unit: int = TRANSPORT_STEPS_PER_UNIT,
) -> dict[float, tuple[float, float, float]]:
    """One integration pass covering many target parameters.

    Returns a map t -> w(t).  Integration proceeds left to right through the
    sorted targets, so a sweep over an n-point grid costs one traversal.
    """
    targets = sorted(set(float(t) for t in ts))
    for t in targets:
        if t < curve.t_min or t > curve.t_max:
            raise DomainIntervalError(t, curve.domain)
    out: dict[float, tuple[float, float, float]] = {}
    w = [float(v) for v in w0]
    prev = curve.t_min
    for t in targets:
        if t > prev:
            n = max(1, math.ceil(steps_per_unit * (t - prev)))
            w = _rk4_segment(G, curve, w, prev, t, n)
            prev = t
        out[t] = tuple(w)
    return out


def fiber_jets(
    G: Connection, base_velocity: VecJ, w_value: Sequence[float], order: int
) -> list[Jet]:
    """Taylor coefficients of the transported fiber from its defining ODE.

    Given jets of beta' and the value w(t), the relation
    w' = -G(beta', w) determines every higher coefficient recursively.
    """
    if order > base_velocity.order + 1:
        raise ValueError("base velocity jets too short for requested order")
    bd = [e.coeffs for e in base_velocity.entries]
    W = [[0.0] * (order + 1) for _ in range(3)]
    for a in range(3):
        W[a][0] = float(w_value[a])
    for k in range(order):
        for a in range(3):
            s = 0.0
            for b in range(3):
                for g in range(3):
                    coeff = G.gamma[a][b][g]
                    if coeff == 0.0:
                        continue
                    conv = 0.0
                    for i in range(k + 1):
                        conv += bd[b][i] * W[g][k - i]
                    s += coeff * conv
            W[a][k + 1] = -s / (k + 1)
    return [Jet(W[a]) for a in range(3)]


def lifted_point_jets(
    curve_jets: VecJ,
    kind: LiftKind,
    G: Connection,
    anchor: Sequence[float] | None = None,
    w_value: Sequence[float] | None = None,
) -> VecJ:
    """Point jets of the lifted curve in R^6 from point jets of the base.

    For the horizontal kind ``w_value`` is the transported fiber at the
    expansion point (the caller integrates the transport ODE; this function
    extends the value to jets through the ODE itself).
    """
    K = curve_jets.order
    if kind.kind == "vertical":
        if anchor is None:
            raise ValueError("vertical lift needs an anchor")
        const = [Jet.constant(v, K) for v in anchor]
        return VecJ(tuple(const) + curve_jets.entries)
    if kind.kind == "complete":
        vel = curve_jets.d()
        return VecJ(curve_jets.truncated(K - 1).entries + vel.entries)
    if kind.kind == "horizontal":
        if w_value is None:
            raise ValueError("horizontal lift needs the transported fiber value")
        vel = curve_jets.d()
        fib = fiber_jets(G, vel, w_value, K)
        return VecJ(curve_jets.entries + tuple(fib))
    raise ValueError(f"unknown lift kind {kind.kind!r}")


# --- connection file ------------------------------------------------------------


def parse_connection_file(text: str) -> Connection:
    """Parse the line-oriented connection format.

    Entries look like ``gamma 1 2 3 = 0.5`` with 1-based indices; unspecified
    entries are zero.  ``flat = true`` is shorthand for the zero connection
    and excludes gamma entries.
    """
    entries: dict[tuple[int, int, int], float] = {}
    flat = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "flat":
            if value.lower() not in ("true", "false"):
                raise FormatError(lineno, f"flat must be true or false, got {value!r}")
            flat = value.lower() == "true"
            continue
        parts = key.split()
        if len(parts) != 4 or parts[0] != "gamma":
            raise FormatError(lineno, f"expected 'gamma A B G = value', got {raw.strip()!r}")
        try:
            idx = tuple(int(p) for p in parts[1:])
        except ValueError:
            raise FormatError(lineno, f"gamma indices must be integers, got {key!r}") from None
        if not all(1 <= i <= 3 for i in idx):
            raise FormatError(lineno, f"gamma indices must be in 1..3, got {key!r}")
        try:
            val = float(value)
        except ValueError:
            raise FormatError(lineno, f"gamma value must be a number, got {value!r}") from None
        if idx in entries:
            raise FormatError(lineno, f"duplicate gamma entry {key!r}")
        entries[idx] = val
    if flat and entries:
        raise FormatError(0, "'flat = true' excludes explicit gamma entries")
    if flat or not entries:
        return Connection.flat()
    return Connection.from_entries(entries)
