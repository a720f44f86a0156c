"""Independent oracles used by the test-suite.

``FrameOracle`` computes torsion and curvature of a Gamma-linear
connection straight from the definitions

    T(X, Y)    = nabla_X Y - nabla_Y X - [X, Y]
    R(X, Y) Z  = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X, Y] Z

in the adapted frame of the whole jet space, with Lie brackets taken
from the coordinate expressions of the frame fields.  It never touches
the closed-form families in :mod:`jetcalc.tensors`.  Components follow
T(X_A, X_B) = T^D_{BA} X_D and R(X_A, X_B) X_C = R^D_{CBA} X_D.
"""

from __future__ import annotations

import numpy as np

from jetcalc.expr import ONE, ZERO, Coord, differentiate

__all__ = ["FrameOracle", "fd_christoffel", "fd_curvature", "fd_partial"]


class FrameOracle:
    def __init__(self, conn):
        self.conn = conn
        self.nc = conn.nc
        self.p, self.n = conn.dims
        p, n = self.p, self.n
        self.size = p + n + n * p
        self._gamma = {}
        self._bracket = {}
        self._torsion = {}
        self._curv = {}
        # coordinate components of each frame field: dict coord -> Expr
        self.frame = []
        M, N = self.nc.M, self.nc.N
        for a in range(p):
            comps = {Coord("temporal", a=a + 1): ONE}
            for j in range(n):
                for b in range(p):
                    if not M[j, b, a].is_number(0.0):
                        comps[Coord("fiber", a=b + 1, i=j + 1)] = -M[j, b, a]
            self.frame.append(comps)
        for i in range(n):
            comps = {Coord("spatial", i=i + 1): ONE}
            for j in range(n):
                for b in range(p):
                    if not N[j, b, i].is_number(0.0):
                        comps[Coord("fiber", a=b + 1, i=j + 1)] = -N[j, b, i]
            self.frame.append(comps)
        for i in range(n):
            for a in range(p):
                self.frame.append({Coord("fiber", a=a + 1, i=i + 1): ONE})

    # frame index helpers
    def t(self, a):
        return a

    def s(self, i):
        return self.p + i

    def f(self, i, a):
        return self.p + self.n + i * self.p + a

    def apply(self, A: int, e):
        """X_A(e) from the coordinate components of the frame field."""
        total = ZERO
        for c, comp in self.frame[A].items():
            total = total + comp * differentiate(e, c)
        return total

    def _to_adapted(self, coord_comps: dict) -> list:
        p, n = self.p, self.n
        M, N = self.nc.M, self.nc.N
        out = [ZERO] * self.size
        for c, val in coord_comps.items():
            if c.kind == "temporal":
                out[self.t(c.a - 1)] = out[self.t(c.a - 1)] + val
                for j in range(n):
                    for b in range(p):
                        out[self.f(j, b)] = out[self.f(j, b)] + M[j, b, c.a - 1] * val
            elif c.kind == "spatial":
                out[self.s(c.i - 1)] = out[self.s(c.i - 1)] + val
                for j in range(n):
                    for b in range(p):
                        out[self.f(j, b)] = out[self.f(j, b)] + N[j, b, c.i - 1] * val
            else:
                k = self.f(c.i - 1, c.a - 1)
                out[k] = out[k] + val
        return out

    def bracket(self, A: int, B: int) -> list:
        key = (A, B)
        if key not in self._bracket:
            coords = set(self.frame[A]) | set(self.frame[B])
            comps = {}
            for c in coords:
                comps[c] = self.apply(A, self.frame[B].get(c, ZERO)) - self.apply(
                    B, self.frame[A].get(c, ZERO)
                )
            self._bracket[key] = self._to_adapted(comps)
        return self._bracket[key]

    def block(self, A: int) -> tuple[str, tuple]:
        p, n = self.p, self.n
        if A < p:
            return "t", (A,)
        if A < p + n:
            return "s", (A - p,)
        k = A - p - n
        return "f", (k // p, k % p)

    def gamma(self, D: int, C: int, B: int):
        """Coefficient of X_D in nabla_{X_B} X_C."""
        key = (D, C, B)
        if key in self._gamma:
            return self._gamma[key]
        conn = self.conn
        kd, d = self.block(D)
        kc, c = self.block(C)
        kb, b = self.block(B)
        val = ZERO
        if kd == kc:
            fam = {"t": ("Gbar", "Lbar", "Cbar"), "s": ("G", "L", "C"), "f": ("GB", "LB", "CB")}[kd]
            name = fam[{"t": 0, "s": 1, "f": 2}[kb]]
            val = getattr(conn, name)[d + c + b]
        self._gamma[key] = val
        return val

    def torsion(self, D: int, B: int, A: int):
        key = (D, B, A)
        if key not in self._torsion:
            self._torsion[key] = self.gamma(D, B, A) - self.gamma(D, A, B) - self.bracket(A, B)[D]
        return self._torsion[key]

    def curvature(self, D: int, C: int, B: int, A: int):
        key = (D, C, B, A)
        if key not in self._curv:
            val = self.apply(A, self.gamma(D, C, B)) - self.apply(B, self.gamma(D, C, A))
            for E in range(self.size):
                val = val + self.gamma(E, C, B) * self.gamma(D, E, A) - self.gamma(E, C, A) * self.gamma(D, E, B)
            br = self.bracket(A, B)
            for G in range(self.size):
                if not br[G].is_number(0.0):
                    val = val - br[G] * self.gamma(D, C, G)
            self._curv[key] = val
        return self._curv[key]


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------


def fd_partial(fn, point: np.ndarray, k: int, h: float = 1e-5) -> float:
    e = np.zeros_like(point)
    e[k] = h
    return (fn(point + e) - fn(point - e)) / (2 * h)


def fd_christoffel(metric_fn, q: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Christoffel symbols of the numeric metric ``metric_fn(q)`` by central differences."""
    dim = q.size
    g = metric_fn(q)
    gi = np.linalg.inv(g)
    dg = np.empty((dim, dim, dim))  # dg[a, b, k] = d_k g_ab
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = h
        dg[:, :, k] = (metric_fn(q + e) - metric_fn(q - e)) / (2 * h)
    H = np.empty((dim, dim, dim))
    for c in range(dim):
        for a in range(dim):
            for b in range(dim):
                H[c, a, b] = 0.5 * sum(
                    gi[c, m] * (dg[m, b, a] + dg[a, m, b] - dg[a, b, m]) for m in range(dim)
                )
    return H


def fd_curvature(metric_fn, q: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Curvature ``d_c H^a_eb - d_b H^a_ec + H H - H H`` with FD derivatives of FD Christoffels."""
    dim = q.size
    H = fd_christoffel(metric_fn, q)
    dH = np.empty((dim,) * 4)  # dH[a, e, b, k]
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = h
        dH[..., k] = (fd_christoffel(metric_fn, q + e) - fd_christoffel(metric_fn, q - e)) / (2 * h)
    R = (
        np.einsum("aebc->aebc", dH)
        - np.einsum("aecb->aebc", dH)
        + np.einsum("ueb,auc->aebc", H, H)
        - np.einsum("uec,aub->aebc", H, H)
    )
    return R
