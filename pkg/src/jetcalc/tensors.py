"""Torsion, curvature and deflection d-tensors of an h-normal connection.

Every family is a :class:`~jetcalc.dtensor.DTensor`.  Index layouts follow
the written index order, fibre pairs stored spatial index first; e.g.
``P^{(m)(b)}_{(u)a(j)}`` has signature ``[FU, TL, FC]`` and axes
``[m, u, a, j, b]``.

Results are cached on the connection object.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, fields

import numpy as np

from .covderiv import cd_spatial, cd_temporal, cd_vertical
from .dtensor import FC, FU, SL, SU, TL, TU, DTensor, Signature, expr_array, liouville
from .expr import ONE, ZERO, Coord, TEMPORAL, differentiate, v
from .geometry import GammaConnection, NonlinearConnection

__all__ = [
    "TorsionSet",
    "CurvatureSet",
    "DeflectionSet",
    "torsion_set",
    "curvature_set",
    "deflection_closed",
    "deflection_direct",
    "c_tensor",
]


class _FamilySet:
    def families(self) -> dict[str, DTensor]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class TorsionSet(_FamilySet):
    """The nine effective torsion families.

    ========  ==============================  ==================
    field     family                          signature
    ========  ==============================  ==================
    T_tx      T^m_{aj}                        SU TL SL
    T_xx      T^m_{ij}                        SU SL SL
    P_vx      P^{m(b)}_{i(j)}                 SU SL FC
    R_tt      R^{(m)}_{(u)ab}                 FU TL TL
    R_tx      R^{(m)}_{(u)aj}                 FU TL SL
    R_xx      R^{(m)}_{(u)ij}                 FU SL SL
    P_t       P^{(m)(b)}_{(u)a(j)}            FU TL FC
    P_x       P^{(m)(b)}_{(u)i(j)}            FU SL FC
    S         S^{(m)(a)(b)}_{(u)(i)(j)}       FU FC FC
    ========  ==============================  ==================
    """

    T_tx: DTensor
    T_xx: DTensor
    P_vx: DTensor
    R_tt: DTensor
    R_tx: DTensor
    R_xx: DTensor
    P_t: DTensor
    P_x: DTensor
    S: DTensor


@dataclass(frozen=True)
class CurvatureSet(_FamilySet):
    """Seven effective curvature families plus the fibre blocks.

    ``H`` is H^a_{ebc}; ``R_tt``, ``R_tx``, ``R_xx`` are R^l_{ibc},
    R^l_{ibk}, R^l_{ijk}; ``P_t``, ``P_x`` are P^{l(c)}_{ib(k)},
    P^{l(c)}_{ij(k)}; ``S`` is S^{l(b)(c)}_{i(j)(k)}.  The ``V_*`` fields
    are the fibre blocks, e.g. ``V_R_tt`` = R^{(l)(a)}_{(e)(i)bc} with
    signature ``[FU, FC, TL, TL]`` and axes ``[l, e, i, a, b, c]``.
    """

    H: DTensor
    R_tt: DTensor
    R_tx: DTensor
    R_xx: DTensor
    P_t: DTensor
    P_x: DTensor
    S: DTensor
    V_R_tt: DTensor
    V_R_tx: DTensor
    V_R_xx: DTensor
    V_P_t: DTensor
    V_P_x: DTensor
    V_S: DTensor

    def primary(self) -> dict[str, DTensor]:
        return {k: t for k, t in self.families().items() if not k.startswith("V_")}


@dataclass(frozen=True)
class DeflectionSet(_FamilySet):
    """``Dbar`` [FU, TL], ``D`` [FU, SL] and ``d`` [FU, FC]."""

    Dbar: DTensor
    D: DTensor
    d: DTensor


def _fill(shape, fn) -> np.ndarray:
    out = expr_array(shape)
    for idx in np.ndindex(shape):
        out[idx] = fn(*idx)
    return out


def _delta(a: int, b: int):
    return ONE if a == b else ZERO


def _check(conn: GammaConnection, nc: NonlinearConnection | None) -> NonlinearConnection:
    if nc is None:
        return conn.nc
    if nc is not conn.nc:
        raise ValueError("connection does not live over the given nonlinear connection")
    return nc


def c_tensor(conn: GammaConnection) -> DTensor:
    """The coefficient family C^{l(c)}_{i(k)} as a ``[SU, SL, FC]`` tensor."""
    return DTensor(Signature([SU, SL, FC], conn.dims), conn.C)


def torsion_set(conn: GammaConnection, nc: NonlinearConnection | None = None) -> TorsionSet:
    nc = _check(conn, nc)
    cached = conn._cache.get("torsion")
    if cached is not None:
        return cached
    p, n = conn.dims
    dims = conn.dims
    M, N, H, G, L, C = nc.M, nc.N, conn.Gbar, conn.G, conn.L, conn.C

    def sig(*slots):
        return Signature(slots, dims)

    T_tx = _fill((n, p, n), lambda m, a, j: -G[m, j, a])
    T_xx = _fill((n, n, n), lambda m, i, j: L[m, i, j] - L[m, j, i])
    R_tt = _fill(
        (n, p, p, p), lambda m, u, a, b: nc.delta_t(M[m, u, a], b) - nc.delta_t(M[m, u, b], a)
    )
    R_tx = _fill(
        (n, p, p, n), lambda m, u, a, j: nc.delta_x(M[m, u, a], j) - nc.delta_t(N[m, u, j], a)
    )
    R_xx = _fill(
        (n, p, n, n), lambda m, u, i, j: nc.delta_x(N[m, u, i], j) - nc.delta_x(N[m, u, j], i)
    )
    P_t = _fill(
        (n, p, p, n, p),
        lambda m, u, a, j, b: nc.partial_v(M[m, u, a], j, b)
        - _delta(b, u) * G[m, j, a]
        + _delta(m, j) * H[b, u, a],
    )
    P_x = _fill(
        (n, p, n, n, p),
        lambda m, u, i, j, b: nc.partial_v(N[m, u, i], j, b) - _delta(b, u) * L[m, j, i],
    )
    S = _fill(
        (n, p, n, p, n, p),
        lambda m, u, i, a, j, b: _delta(a, u) * C[m, i, j, b] - _delta(b, u) * C[m, j, i, a],
    )
    out = TorsionSet(
        T_tx=DTensor(sig(SU, TL, SL), T_tx),
        T_xx=DTensor(sig(SU, SL, SL), T_xx),
        P_vx=DTensor(sig(SU, SL, FC), C),
        R_tt=DTensor(sig(FU, TL, TL), R_tt),
        R_tx=DTensor(sig(FU, TL, SL), R_tx),
        R_xx=DTensor(sig(FU, SL, SL), R_xx),
        P_t=DTensor(sig(FU, TL, FC), P_t),
        P_x=DTensor(sig(FU, SL, FC), P_x),
        S=DTensor(sig(FU, FC, FC), S),
    )
    conn._cache["torsion"] = out
    return out


def _fiber_block(core: np.ndarray, dims, extra=None) -> np.ndarray:
    """``delta^a_e core[l, i, ...] - delta^l_i extra[a, e, ...]`` laid out ``[l, e, i, a, ...]``.

    The fibre pair carries a lower temporal index, so the temporal curvature
    enters with the sign of a covector action.
    """
    p, n = dims
    rest = core.shape[2:]
    out = expr_array((n, p, n, p) + rest)
    for l, e, i, a in itertools.product(range(n), range(p), range(n), range(p)):
        for r in np.ndindex(rest):
            term = core[(l, i) + r] if a == e else ZERO
            if extra is not None and l == i:
                term = term - extra[(a, e) + r]
            out[(l, e, i, a) + r] = term
    return out


def curvature_set(
    conn: GammaConnection,
    nc: NonlinearConnection | None = None,
    tor: TorsionSet | None = None,
) -> CurvatureSet:
    nc = _check(conn, nc)
    cached = conn._cache.get("curvature")
    if cached is not None:
        return cached
    if tor is None:
        tor = torsion_set(conn, nc)
    p, n = conn.dims
    dims = conn.dims
    H, G, L, C = conn.Gbar, conn.G, conn.L, conn.C

    def sig(*slots):
        return Signature(slots, dims)

    def dt(e, a):
        return differentiate(e, Coord(TEMPORAL, a=a + 1))

    Hc = _fill(
        (p, p, p, p),
        lambda a, e, b, c: dt(H[a, e, b], c)
        - dt(H[a, e, c], b)
        + sum((H[u, e, b] * H[a, u, c] - H[u, e, c] * H[a, u, b] for u in range(p)), ZERO),
    )

    def cr(R: np.ndarray) -> np.ndarray:
        # C^{l(u)}_{i(m)} R^{(m)}_{(u)..}
        return np.tensordot(C, R, axes=([2, 3], [0, 1]))

    CR_tt = cr(tor.R_tt.components)
    CR_tx = cr(tor.R_tx.components)
    CR_xx = cr(tor.R_xx.components)

    def ssum(fn, rng):
        return sum((fn(m) for m in range(rng)), ZERO)

    R_itt = _fill(
        (n, n, p, p),
        lambda l, i, b, c: nc.delta_t(G[l, i, b], c)
        - nc.delta_t(G[l, i, c], b)
        + ssum(lambda m: G[m, i, b] * G[l, m, c] - G[m, i, c] * G[l, m, b], n)
        + CR_tt[l, i, b, c],
    )
    R_itx = _fill(
        (n, n, p, n),
        lambda l, i, b, k: nc.delta_x(G[l, i, b], k)
        - nc.delta_t(L[l, i, k], b)
        + ssum(lambda m: G[m, i, b] * L[l, m, k] - L[m, i, k] * G[l, m, b], n)
        + CR_tx[l, i, b, k],
    )
    R_ixx = _fill(
        (n, n, n, n),
        lambda l, i, j, k: nc.delta_x(L[l, i, j], k)
        - nc.delta_x(L[l, i, k], j)
        + ssum(lambda m: L[m, i, j] * L[l, m, k] - L[m, i, k] * L[l, m, j], n)
        + CR_xx[l, i, j, k],
    )
    Ct = c_tensor(conn)
    C_t = cd_temporal(Ct, conn).components  # [l, i, k, c, b]
    C_x = cd_spatial(Ct, conn).components  # [l, i, k, c, j]
    CP_t = cr(tor.P_t.components)  # [l, i, b, k, c]
    CP_x = cr(tor.P_x.components)  # [l, i, j, k, c]
    P_ct = _fill(
        (n, n, p, n, p),
        lambda l, i, b, k, c: nc.partial_v(G[l, i, b], k, c) - C_t[l, i, k, c, b] + CP_t[l, i, b, k, c],
    )
    P_cx = _fill(
        (n, n, n, n, p),
        lambda l, i, j, k, c: nc.partial_v(L[l, i, j], k, c) - C_x[l, i, k, c, j] + CP_x[l, i, j, k, c],
    )
    S_c = _fill(
        (n, n, n, p, n, p),
        lambda l, i, j, b, k, c: nc.partial_v(C[l, i, j, b], k, c)
        - nc.partial_v(C[l, i, k, c], j, b)
        + ssum(lambda m: C[m, i, j, b] * C[l, m, k, c] - C[m, i, k, c] * C[l, m, j, b], n),
    )
    out = CurvatureSet(
        H=DTensor(sig(TU, TL, TL, TL), Hc),
        R_tt=DTensor(sig(SU, SL, TL, TL), R_itt),
        R_tx=DTensor(sig(SU, SL, TL, SL), R_itx),
        R_xx=DTensor(sig(SU, SL, SL, SL), R_ixx),
        P_t=DTensor(sig(SU, SL, TL, FC), P_ct),
        P_x=DTensor(sig(SU, SL, SL, FC), P_cx),
        S=DTensor(sig(SU, SL, FC, FC), S_c),
        V_R_tt=DTensor(sig(FU, FC, TL, TL), _fiber_block(R_itt, dims, Hc)),
        V_R_tx=DTensor(sig(FU, FC, TL, SL), _fiber_block(R_itx, dims)),
        V_R_xx=DTensor(sig(FU, FC, SL, SL), _fiber_block(R_ixx, dims)),
        V_P_t=DTensor(sig(FU, FC, TL, FC), _fiber_block(P_ct, dims)),
        V_P_x=DTensor(sig(FU, FC, SL, FC), _fiber_block(P_cx, dims)),
        V_S=DTensor(sig(FU, FC, FC, FC), _fiber_block(S_c, dims)),
    )
    conn._cache["curvature"] = out
    return out


def deflection_closed(conn: GammaConnection, nc: NonlinearConnection | None = None) -> DeflectionSet:
    """Deflection tensors from their closed forms in the connection coefficients."""
    nc = _check(conn, nc)
    cached = conn._cache.get("deflection")
    if cached is not None:
        return cached
    p, n = conn.dims
    M, N, H, G, L, C = nc.M, nc.N, conn.Gbar, conn.G, conn.L, conn.C
    Dbar = _fill(
        (n, p, p),
        lambda i, a, b: -M[i, a, b]
        + sum((G[i, m, b] * v(m + 1, a + 1) for m in range(n)), ZERO)
        - sum((H[u, a, b] * v(i + 1, u + 1) for u in range(p)), ZERO),
    )
    D = _fill(
        (n, p, n),
        lambda i, a, j: -N[i, a, j] + sum((L[i, m, j] * v(m + 1, a + 1) for m in range(n)), ZERO),
    )
    d = _fill(
        (n, p, n, p),
        lambda i, a, j, b: _delta(i, j) * _delta(a, b)
        + sum((C[i, m, j, b] * v(m + 1, a + 1) for m in range(n)), ZERO),
    )
    dims = conn.dims
    out = DeflectionSet(
        Dbar=DTensor(Signature([FU, TL], dims), Dbar),
        D=DTensor(Signature([FU, SL], dims), D),
        d=DTensor(Signature([FU, FC], dims), d),
    )
    conn._cache["deflection"] = out
    return out


def deflection_direct(conn: GammaConnection, nc: NonlinearConnection | None = None) -> DeflectionSet:
    """Deflection tensors as the three covariant derivatives of the Liouville field."""
    _check(conn, nc)
    C = liouville(conn.dims)
    return DeflectionSet(
        Dbar=cd_temporal(C, conn),
        D=cd_spatial(C, conn),
        d=cd_vertical(C, conn),
    )
