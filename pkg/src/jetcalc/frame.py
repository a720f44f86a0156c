"""Torsion and curvature straight from their definitions in the adapted frame.

    T(X, Y)   = nabla_X Y - nabla_Y X - [X, Y]
    R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X, Y] Z

The frame ``(d/dt^a - M d/dv, d/dx^i - N d/dv, d/dv)`` is indexed
temporal first, then spatial, then fibre pairs ``(i, a)`` flattened to
``i * p + a``.  Only plain partial derivatives are formed symbolically;
brackets, contractions and frame changes are done on numbers.  This path
shares nothing with the closed-form families of :mod:`jetcalc.tensors`
and serves as their cross-check.

Index conventions: ``torsion[z, D, B, A]`` is the X_D component of
T(X_A, X_B), ``curvature[z, D, C, B, A]`` the X_D component of
R(X_A, X_B) X_C.
"""

from __future__ import annotations

import numpy as np

from .expr import ZERO, Coord, EvalCache, PointBatch, differentiate, evaluate_batch
from .geometry import GammaConnection

__all__ = ["FrameGeometry"]

# family names per (output block, direction block)
_GAMMA = {
    ("t", "t"): "Gbar",
    ("t", "s"): "Lbar",
    ("t", "f"): "Cbar",
    ("s", "t"): "G",
    ("s", "s"): "L",
    ("s", "f"): "C",
    ("f", "t"): "GB",
    ("f", "s"): "LB",
    ("f", "f"): "CB",
}


class FrameGeometry:
    """Frame-level torsion and curvature of ``conn`` at a batch of points."""

    def __init__(self, conn: GammaConnection, points, cache: EvalCache | None = None):
        self.conn = conn
        self.batch = points if isinstance(points, PointBatch) else PointBatch.from_points(points)
        self.cache = cache if cache is not None else EvalCache(self.batch)
        p, n = conn.dims
        self.p, self.n = p, n
        self.size = p + n + n * p
        self.coords = (
            [Coord("temporal", a=a + 1) for a in range(p)]
            + [Coord("spatial", i=i + 1) for i in range(n)]
            + [Coord("fiber", a=a + 1, i=i + 1) for i in range(n) for a in range(p)]
        )
        self._torsion = None
        self._curvature = None

    # -- index blocks --------------------------------------------------------

    def block(self, kind: str) -> slice:
        p, n = self.p, self.n
        return {"t": slice(0, p), "s": slice(p, p + n), "f": slice(p + n, p + n + n * p)}[kind]

    # -- numeric building blocks ---------------------------------------------

    def _eval(self, exprs: np.ndarray) -> np.ndarray:
        return evaluate_batch(exprs, None, self.cache)

    def _partials(self, exprs: np.ndarray) -> np.ndarray:
        """``[z, ..., mu]`` partial derivatives along every coordinate."""
        out = np.empty(exprs.shape + (self.size,), dtype=object)
        for idx in np.ndindex(exprs.shape):
            e = exprs[idx]
            for k, c in enumerate(self.coords):
                out[idx + (k,)] = differentiate(e, c)
        return self._eval(out)

    def _frame_components(self) -> np.ndarray:
        """Symbolic ``c[A, mu]``: X_A = sum_mu c[A, mu] d/du^mu."""
        p, n = self.p, self.n
        M, N = self.conn.nc.M, self.conn.nc.N
        c = np.full((self.size, self.size), ZERO, dtype=object)
        for A in range(self.size):
            c[A, A] = c[A, A] + 1
        f0 = p + n
        for j in range(n):
            for b in range(p):
                for a in range(p):
                    c[a, f0 + j * p + b] = -M[j, b, a]
                for i in range(n):
                    c[p + i, f0 + j * p + b] = -N[j, b, i]
        return c

    def _gamma(self) -> np.ndarray:
        """Symbolic ``Gamma[D, C, B]``: X_D component of nabla_{X_B} X_C."""
        p, n = self.p, self.n
        conn = self.conn
        g = np.full((self.size,) * 3, ZERO, dtype=object)
        shapes = {"t": (p,), "s": (n,), "f": (n, p)}
        for (out, direction), name in _GAMMA.items():
            fam = getattr(conn, name)
            so, sd = self.block(out), self.block(direction)
            width = int(np.prod(shapes[out]))
            dwidth = int(np.prod(shapes[direction]))
            g[so, so, sd] = fam.reshape(width, width, dwidth)
        return g

    # -- definitions ----------------------------------------------------------

    def _prepare(self):
        if hasattr(self, "_c"):
            return
        c_sym = self._frame_components()
        self._c = self._eval(c_sym)  # [z, A, mu]
        dc = self._partials(c_sym)  # [z, A, nu, mu]
        # coordinate components of [X_A, X_B]
        coord_br = np.einsum("zAm,zBnm->zABn", self._c, dc) - np.einsum("zBm,zAnm->zABn", self._c, dc)
        # back to adapted components: beta = b c^{-1}
        cinv = np.linalg.inv(self._c)
        self._bracket = np.einsum("zABn,znG->zABG", coord_br, cinv)
        g_sym = self._gamma()
        self._g = self._eval(g_sym)
        self._dg = self._partials(g_sym)  # [z, D, C, B, mu]

    def bracket(self) -> np.ndarray:
        """``[z, A, B, G]``: X_G component of [X_A, X_B]."""
        self._prepare()
        return self._bracket

    def torsion(self) -> np.ndarray:
        if self._torsion is None:
            self._prepare()
            g, br = self._g, self._bracket
            self._torsion = g - np.swapaxes(g, 2, 3) - np.einsum("zABD->zDBA", br)
        return self._torsion

    def curvature(self) -> np.ndarray:
        if self._curvature is None:
            self._prepare()
            g, br = self._g, self._bracket
            xg = np.einsum("zAm,zDCBm->zDCBA", self._c, self._dg)  # X_A(Gamma^D_CB)
            R = (
                xg
                - np.swapaxes(xg, 3, 4)
                + np.einsum("zECB,zDEA->zDCBA", g, g)
                - np.einsum("zECA,zDEB->zDCBA", g, g)
                - np.einsum("zABG,zDCG->zDCBA", br, g)
            )
            self._curvature = R
        return self._curvature

    def torsion_block(self, out: str, second: str, first: str) -> np.ndarray:
        """Torsion slice T^out_{second first} (flat fibre indices)."""
        T = self.torsion()
        return T[:, self.block(out)][:, :, self.block(second)][:, :, :, self.block(first)]

    def curvature_block(self, out: str, acted: str, second: str, first: str) -> np.ndarray:
        R = self.curvature()
        return R[:, self.block(out)][:, :, self.block(acted)][:, :, :, self.block(second)][
            :, :, :, :, self.block(first)
        ]
