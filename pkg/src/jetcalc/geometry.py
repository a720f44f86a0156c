"""Metrics, nonlinear connections and h-normal Gamma-linear connections.

Array layouts (0-based, upper indices first as written):

========================  ===============================  =================
family                    math                             axes
========================  ===============================  =================
Christoffel of h          H^c_{ab}                         ``[c, a, b]``
nonlinear, temporal       M^{(j)}_{(b)a}                   ``[j, b, a]``
nonlinear, spatial        N^{(j)}_{(b)i}                   ``[j, b, i]``
``Gbar``                  Gbar^a_{bc}                      ``[a, b, c]``
``G``                     G^k_{ic}                         ``[k, i, c]``
``GB``                    G^{(k)(b)}_{(a)(i)c}             ``[k, a, i, b, c]``
``Lbar``                  Lbar^a_{bj}                      ``[a, b, j]``
``L``                     L^k_{ij}                         ``[k, i, j]``
``LB``                    L^{(k)(b)}_{(a)(i)j}             ``[k, a, i, b, j]``
``Cbar``                  Cbar^{a(c)}_{b(k)}               ``[a, b, k, c]``
``C``                     C^{k(c)}_{i(j)}                  ``[k, i, j, c]``
``CB``                    C^{(k)(b)(c)}_{(a)(i)(j)}        ``[k, a, i, b, j, c]``
========================  ===============================  =================

Block families map the fibre pair ``(i, b)`` to the pair ``(k, a)``; the
vertical direction label ``(j, c)`` is stored spatial index first, the
same way fibre slots are stored in :class:`~jetcalc.dtensor.DTensor`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .dtensor import expr_array
from .expr import (
    FIBER,
    ONE,
    SPATIAL,
    TEMPORAL,
    ZERO,
    Coord,
    Expr,
    PointBatch,
    const,
    differentiate,
    evaluate_batch,
    parse,
    t,
    v,
    x,
)

__all__ = [
    "Metric",
    "SingularMetricError",
    "NonlinearConnection",
    "HNormalSpec",
    "GammaConnection",
    "christoffel",
    "metric_curvature",
    "canonical_nonlinear",
    "adapted_derivative",
    "build_hnormal",
    "berwald",
    "is_cartan_type",
    "random_cartan_spec",
    "random_polynomial",
]

MAX_METRIC_DIM = 4


class SingularMetricError(ArithmeticError):
    pass


def _coord(kind: str, k: int) -> Coord:
    return Coord(TEMPORAL, a=k + 1) if kind == TEMPORAL else Coord(SPATIAL, i=k + 1)


def _det(m: list[list[Expr]]) -> Expr:
    size = len(m)
    if size == 1:
        return m[0][0]
    if size == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = ZERO
    for col in range(size):
        if m[0][col].is_number(0.0):
            continue
        minor = [row[:col] + row[col + 1 :] for row in m[1:]]
        term = m[0][col] * _det(minor)
        total = total + term if col % 2 == 0 else total - term
    return total


class Metric:
    """A semi-Riemannian metric on the temporal or the spatial factor.

    ``g`` is a symmetric object array of expressions; the inverse is built
    symbolically from the adjugate.  Temporal metrics may depend on the
    t-variables only, spatial ones on the x-variables only.
    """

    def __init__(self, kind: str, g, dims: tuple[int, int]):
        if kind not in (TEMPORAL, SPATIAL):
            raise ValueError(f"metric kind must be temporal or spatial, got {kind!r}")
        p, n = dims
        dim = p if kind == TEMPORAL else n
        g = np.asarray(g, dtype=object)
        if g.shape != (dim, dim):
            raise ValueError(f"{kind} metric must be {dim}x{dim}, got {g.shape}")
        if dim > MAX_METRIC_DIM:
            raise ValueError(f"metric dimension {dim} exceeds {MAX_METRIC_DIM}")
        g = np.vectorize(lambda e: e if isinstance(e, Expr) else const(e), otypes=[object])(g)
        for a, b in itertools.product(range(dim), repeat=2):
            if g[a, b] is not g[b, a]:
                raise ValueError(f"metric is not symmetric at ({a + 1}, {b + 1})")
            bad = [c for c in g[a, b].free if c.kind != kind]
            if bad:
                raise ValueError(f"{kind} metric depends on {bad[0].name}")
        self.kind = kind
        self.dims = (int(p), int(n))
        self.dim = dim
        self.g = g
        self.g.setflags(write=False)
        rows = [list(r) for r in g]
        self.det = _det(rows)
        adj = expr_array((dim, dim))
        for a, b in itertools.product(range(dim), repeat=2):
            if dim == 1:
                cof = ONE
            else:
                minor = [r[:a] + r[a + 1 :] for k, r in enumerate(rows) if k != b]
                cof = _det(minor)
            adj[a, b] = cof if (a + b) % 2 == 0 else -cof
        self.g_inv = np.vectorize(lambda e: e / self.det, otypes=[object])(adj)
        self.g_inv.setflags(write=False)

    @classmethod
    def from_strings(cls, kind: str, rows, dims) -> "Metric":
        g = np.array([[parse(str(s), dims) for s in row] for row in rows], dtype=object)
        return cls(kind, g, dims)

    @classmethod
    def identity(cls, kind: str, dims) -> "Metric":
        dim = dims[0] if kind == TEMPORAL else dims[1]
        g = expr_array((dim, dim))
        for a in range(dim):
            g[a, a] = ONE
        return cls(kind, g, dims)

    def coord(self, k: int) -> Coord:
        return _coord(self.kind, k)

    def check(self, points, tol: float = 1e-9, det_min: float = 1e-12) -> None:
        """Raise :class:`SingularMetricError` unless invertible at every point."""
        det = evaluate_batch(np.array([self.det], dtype=object), points)[:, 0]
        bad = np.flatnonzero(~(np.abs(det) > det_min))
        if bad.size:
            raise SingularMetricError(
                f"{self.kind} metric is singular at sample {int(bad[0])} (det = {det[bad[0]]:.3g})"
            )
        g = evaluate_batch(self.g, points)
        gi = evaluate_batch(self.g_inv, points)
        resid = np.abs(np.einsum("zab,zbc->zac", gi, g) - np.eye(self.dim)).max()
        if resid >= tol:
            raise SingularMetricError(f"{self.kind} metric inverse residual {resid:.3g}")


def christoffel(m: Metric) -> np.ndarray:
    """Christoffel symbols ``H[c, a, b]`` = H^c_{ab}, symmetric in ``a, b``."""
    dim = m.dim
    dg = [[[differentiate(m.g[a, b], m.coord(k)) for k in range(dim)] for b in range(dim)] for a in range(dim)]
    H = expr_array((dim, dim, dim))
    for c in range(dim):
        for a in range(dim):
            for b in range(a, dim):
                total = ZERO
                for mu in range(dim):
                    if m.g_inv[c, mu].is_number(0.0):
                        continue
                    inner = dg[mu][b][a] + dg[a][mu][b] - dg[a][b][mu]
                    total = total + m.g_inv[c, mu] * inner
                H[c, a, b] = H[c, b, a] = total * 0.5
    H.setflags(write=False)
    return H


def metric_curvature(m: Metric, H: np.ndarray | None = None) -> np.ndarray:
    """``R[a, e, b, c] = d_c H^a_{eb} - d_b H^a_{ec} + H^u_{eb} H^a_{uc} - H^u_{ec} H^a_{ub}``.

    Antisymmetric in the last two axes by construction.
    """
    if H is None:
        H = christoffel(m)
    dim = m.dim
    R = expr_array((dim,) * 4)
    for a, e in itertools.product(range(dim), repeat=2):
        for b in range(dim):
            for c in range(b + 1, dim):
                total = differentiate(H[a, e, b], m.coord(c)) - differentiate(H[a, e, c], m.coord(b))
                for u in range(dim):
                    total = total + H[u, e, b] * H[a, u, c] - H[u, e, c] * H[a, u, b]
                R[a, e, b, c] = total
                R[a, e, c, b] = -total
    R.setflags(write=False)
    return R


# ---------------------------------------------------------------------------
# Nonlinear connections and adapted derivatives
# ---------------------------------------------------------------------------


class NonlinearConnection:
    """Temporal components ``M[j, b, a]`` and spatial components ``N[j, b, i]``."""

    def __init__(self, M, N, dims):
        p, n = dims
        M = np.asarray(M, dtype=object)
        N = np.asarray(N, dtype=object)
        if M.shape != (n, p, p) or N.shape != (n, p, n):
            raise ValueError(f"nonlinear connection grids must be {(n, p, p)} and {(n, p, n)}")
        self.dims = (int(p), int(n))
        self.M = np.vectorize(lambda e: e if isinstance(e, Expr) else const(e), otypes=[object])(M)
        self.N = np.vectorize(lambda e: e if isinstance(e, Expr) else const(e), otypes=[object])(N)
        self.M.setflags(write=False)
        self.N.setflags(write=False)
        self._cache: dict = {}

    @classmethod
    def zero(cls, dims) -> "NonlinearConnection":
        p, n = dims
        return cls(expr_array((n, p, p)), expr_array((n, p, n)), dims)

    def _fiber_terms(self, e: Expr, coeffs: np.ndarray) -> Expr:
        total = ZERO
        for c in e.free:
            if c.kind == FIBER:
                k, g = c.i - 1, c.a - 1
                if not coeffs[k, g].is_number(0.0):
                    total = total + coeffs[k, g] * differentiate(e, c)
        return total

    def delta_t(self, e: Expr, a: int) -> Expr:
        """delta e / delta t^a for 0-based ``a``."""
        key = (e, "t", a)
        out = self._cache.get(key)
        if out is None:
            out = differentiate(e, Coord(TEMPORAL, a=a + 1)) - self._fiber_terms(e, self.M[:, :, a])
            self._cache[key] = out
        return out

    def delta_x(self, e: Expr, i: int) -> Expr:
        """delta e / delta x^i for 0-based ``i``."""
        key = (e, "x", i)
        out = self._cache.get(key)
        if out is None:
            out = differentiate(e, Coord(SPATIAL, i=i + 1)) - self._fiber_terms(e, self.N[:, :, i])
            self._cache[key] = out
        return out

    def partial_v(self, e: Expr, i: int, a: int) -> Expr:
        """d e / d x^i_a for 0-based ``(i, a)``."""
        return differentiate(e, Coord(FIBER, a=a + 1, i=i + 1))


def canonical_nonlinear(h: Metric, phi: Metric) -> NonlinearConnection:
    """``M^{(j)}_{(b)a} = -H^c_{ab} x^j_c`` and ``N^{(j)}_{(b)i} = gamma^j_{ik} x^k_b``."""
    if h.kind != TEMPORAL or phi.kind != SPATIAL:
        raise ValueError("canonical_nonlinear expects (temporal, spatial) metrics")
    if h.dims != phi.dims:
        raise ValueError("metric dims disagree")
    p, n = h.dims
    H = christoffel(h)
    gam = christoffel(phi)
    M = expr_array((n, p, p))
    N = expr_array((n, p, n))
    for j, b in itertools.product(range(n), range(p)):
        for a in range(p):
            total = ZERO
            for c in range(p):
                total = total + H[c, a, b] * v(j + 1, c + 1)
            M[j, b, a] = -total
        for i in range(n):
            total = ZERO
            for k in range(n):
                total = total + gam[j, i, k] * v(k + 1, b + 1)
            N[j, b, i] = total
    return NonlinearConnection(M, N, h.dims)


def adapted_derivative(nc: NonlinearConnection, e: Expr, which: Coord) -> Expr:
    """Derivative of ``e`` along an adapted frame field.

    A temporal coordinate selects delta/delta t^a, a spatial one
    delta/delta x^i and a fibre coordinate the plain d/dx^i_a.
    """
    which.check(nc.dims)
    if which.kind == TEMPORAL:
        return nc.delta_t(e, which.a - 1)
    if which.kind == SPATIAL:
        return nc.delta_x(e, which.i - 1)
    return nc.partial_v(e, which.i - 1, which.a - 1)


# ---------------------------------------------------------------------------
# Gamma-linear connections
# ---------------------------------------------------------------------------


def _as_exprs(arr, shape, name) -> np.ndarray:
    arr = np.asarray(arr, dtype=object)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    out = np.vectorize(lambda e: e if isinstance(e, Expr) else const(e), otypes=[object])(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class HNormalSpec:
    """The four effective coefficients ``(H, G, L, C)`` of an h-normal connection."""

    H: np.ndarray
    G: np.ndarray
    L: np.ndarray
    C: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        p, n = self.dims
        object.__setattr__(self, "H", _as_exprs(self.H, (p, p, p), "H"))
        object.__setattr__(self, "G", _as_exprs(self.G, (n, n, p), "G"))
        object.__setattr__(self, "L", _as_exprs(self.L, (n, n, n), "L"))
        object.__setattr__(self, "C", _as_exprs(self.C, (n, n, n, p), "C"))


@dataclass(eq=False)
class GammaConnection:
    """The nine coefficient families of a Gamma-linear connection over ``nc``."""

    Gbar: np.ndarray
    G: np.ndarray
    GB: np.ndarray
    Lbar: np.ndarray
    L: np.ndarray
    LB: np.ndarray
    Cbar: np.ndarray
    C: np.ndarray
    CB: np.ndarray
    nc: NonlinearConnection
    h: Metric | None = None
    spec: HNormalSpec | None = None
    name: str = "h-normal"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dims(self) -> tuple[int, int]:
        return self.nc.dims


def build_hnormal(
    spec: HNormalSpec, nc: NonlinearConnection, h: Metric | None = None, name: str = "h-normal"
) -> GammaConnection:
    """Assemble the nine families of the h-normal connection determined by ``spec``."""
    if spec.dims != nc.dims:
        raise ValueError(f"spec dims {spec.dims} do not match connection dims {nc.dims}")
    p, n = spec.dims
    H, G, L, C = spec.H, spec.G, spec.L, spec.C
    GB = expr_array((n, p, n, p, p))
    LB = expr_array((n, p, n, p, n))
    CB = expr_array((n, p, n, p, n, p))
    for k, a, i, b in itertools.product(range(n), range(p), range(n), range(p)):
        for c in range(p):
            term = G[k, i, c] if a == b else ZERO
            if k == i:
                term = term - H[b, a, c]
            GB[k, a, i, b, c] = term
        if a == b:
            LB[k, a, i, b, :] = L[k, i, :]
            CB[k, a, i, b, :, :] = C[k, i, :, :]
    families = dict(
        Gbar=H,
        G=G,
        GB=GB,
        Lbar=expr_array((p, p, n)),
        L=L,
        LB=LB,
        Cbar=expr_array((p, p, n, p)),
        C=C,
        CB=CB,
    )
    for arr in families.values():
        arr.setflags(write=False)
    return GammaConnection(**families, nc=nc, h=h, spec=spec, name=name)


def berwald(h: Metric, phi: Metric) -> tuple[GammaConnection, NonlinearConnection]:
    """Berwald connection ``(H, 0, gamma, 0)`` over the canonical nonlinear connection."""
    nc = canonical_nonlinear(h, phi)
    p, n = h.dims
    spec = HNormalSpec(
        H=christoffel(h),
        G=expr_array((n, n, p)),
        L=christoffel(phi),
        C=expr_array((n, n, n, p)),
        dims=h.dims,
    )
    return build_hnormal(spec, nc, h=h, name="berwald"), nc


def is_cartan_type(spec: HNormalSpec, points, tol: float = 1e-10) -> bool:
    """True iff ``L^i_{jk} = L^i_{kj}`` and ``C^{i(c)}_{j(k)} = C^{i(c)}_{k(j)}`` at all points."""
    L = evaluate_batch(spec.L, points)
    C = evaluate_batch(spec.C, points)
    resid_L = np.abs(L - L.transpose(0, 1, 3, 2)).max(initial=0.0)
    resid_C = np.abs(C - C.transpose(0, 1, 3, 2, 4)).max(initial=0.0)
    return bool(resid_L < tol and resid_C < tol)


def cartan_residuals(spec: HNormalSpec, points) -> dict[str, float]:
    L = evaluate_batch(spec.L, points)
    C = evaluate_batch(spec.C, points)
    return {
        "L": float(np.abs(L - L.transpose(0, 1, 3, 2)).max(initial=0.0)),
        "C": float(np.abs(C - C.transpose(0, 1, 3, 2, 4)).max(initial=0.0)),
    }


# ---------------------------------------------------------------------------
# Random connections for property tests
# ---------------------------------------------------------------------------


def _jet_variables(dims) -> list[Expr]:
    p, n = dims
    out = [t(a + 1) for a in range(p)] + [x(i + 1) for i in range(n)]
    out += [v(i + 1, a + 1) for i in range(n) for a in range(p)]
    return out


def random_polynomial(rng: np.random.Generator, dims, degree: int = 2, variables=None) -> Expr:
    """Dense polynomial of total degree <= ``degree`` with coefficients uniform in [-1, 1]."""
    variables = _jet_variables(dims) if variables is None else list(variables)
    total = ZERO
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(variables, d):
            term = const(rng.uniform(-1.0, 1.0))
            for factor in combo:
                term = term * factor
            total = total + term
    return total


def random_cartan_spec(
    h: Metric, rng: np.random.Generator, degree: int = 2, variables=None
) -> HNormalSpec:
    """Random h-normal coefficients of Cartan type.

    ``G``, ``L`` and ``C`` entries are random polynomials; ``L`` and ``C``
    are symmetrised in their lower spatial pair.
    """
    p, n = h.dims
    poly = lambda: random_polynomial(rng, h.dims, degree, variables)  # noqa: E731
    G = expr_array((n, n, p))
    for idx in np.ndindex(G.shape):
        G[idx] = poly()
    L = expr_array((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                L[k, i, j] = L[k, j, i] = poly()
    C = expr_array((n, n, n, p))
    for k, c in itertools.product(range(n), range(p)):
        for i in range(n):
            for j in range(i, n):
                C[k, i, j, c] = C[k, j, i, c] = poly()
    return HNormalSpec(H=christoffel(h), G=G, L=L, C=C, dims=h.dims)
