"""T-horizontal, M-horizontal and vertical covariant derivatives of d-tensors.

Each derivative appends one slot to the signature (``TL``, ``SL`` or
``FC``) and adds one connection term per existing slot: upper slots
contract with ``+`` the matching coefficient family, lower slots with
``-`` the same family on its input side.  Fibre slots contract as a pair
through the block families.
"""

from __future__ import annotations

import numpy as np

from .dtensor import FC, FU, SL, SU, TL, TU, DTensor
from .expr import Coord, EvalCache, PointBatch, differentiate, evaluate_batch
from .geometry import GammaConnection

__all__ = [
    "cd_temporal",
    "cd_spatial",
    "cd_vertical",
    "covariant_derivative",
    "covariant_derivative_values",
]

# direction -> (bar family, spatial family, block family, appended slot)
_FAMILIES = {
    "t": ("Gbar", "G", "GB", TL),
    "x": ("Lbar", "L", "LB", SL),
    "v": ("Cbar", "C", "CB", FC),
}


def _is_zero(arr: np.ndarray) -> bool:
    return all(e.is_number(0.0) for e in arr.flat)


def _base(D: DTensor, conn: GammaConnection, direction: str) -> np.ndarray:
    nc = conn.nc
    p, n = conn.dims
    comps = D.components
    if direction == "t":
        dshape = (p,)
        fn = lambda e, d: nc.delta_t(e, d[0])  # noqa: E731
    elif direction == "x":
        dshape = (n,)
        fn = lambda e, d: nc.delta_x(e, d[0])  # noqa: E731
    else:
        dshape = (n, p)
        fn = lambda e, d: nc.partial_v(e, d[0], d[1])  # noqa: E731
    out = np.empty(comps.shape + dshape, dtype=object)
    for idx in np.ndindex(comps.shape):
        e = comps[idx]
        for d in np.ndindex(dshape):
            out[idx + d] = fn(e, d)
    return out


def _contract(comps: np.ndarray, coeff: np.ndarray, ax: int, width: int, upper: bool) -> np.ndarray:
    """Connection term for one slot occupying axes ``ax .. ax+width-1``.

    ``coeff`` is laid out ``[out..., in..., direction...]``.  An upper slot
    sums the tensor index against ``in``; a lower slot against ``out``.
    """
    tensor_axes = list(range(ax, ax + width))
    coeff_axes = list(range(width, 2 * width)) if upper else list(range(width))
    term = np.tensordot(comps, coeff, axes=(tensor_axes, coeff_axes))
    rest = comps.ndim - width
    # the surviving slot axes sit right after the tensor's remaining axes
    term = np.moveaxis(term, list(range(rest, rest + width)), tensor_axes)
    return term if upper else -term


def covariant_derivative(D: DTensor, conn: GammaConnection, direction: str) -> DTensor:
    """Covariant derivative along ``direction`` in ``{"t", "x", "v"}``."""
    if D.dims != conn.dims:
        raise ValueError(f"tensor dims {D.dims} do not match connection dims {conn.dims}")
    if direction not in _FAMILIES:
        raise ValueError(f"direction must be one of t, x, v; got {direction!r}")
    bar, plain, block, new_slot = _FAMILIES[direction]
    out = _base(D, conn, direction)
    sig = D.signature
    for s, kind in enumerate(sig.slots):
        ax = sig.axis_of(s)
        if kind in (TU, TL):
            coeff, width = getattr(conn, bar), 1
        elif kind in (SU, SL):
            coeff, width = getattr(conn, plain), 1
        else:
            coeff, width = getattr(conn, block), 2
        if _is_zero(coeff):
            continue
        upper = kind in (TU, SU, FU)
        out = out + _contract(D.components, coeff, ax, width, upper)
    return DTensor(sig + [new_slot], out)


def cd_temporal(D: DTensor, conn: GammaConnection) -> DTensor:
    """``D_{/e}``: appends a ``TL`` slot."""
    return covariant_derivative(D, conn, "t")


def cd_spatial(D: DTensor, conn: GammaConnection) -> DTensor:
    """``D_{|p}``: appends an ``SL`` slot."""
    return covariant_derivative(D, conn, "x")


def cd_vertical(D: DTensor, conn: GammaConnection) -> DTensor:
    """``D|^{(e)}_{(p)}``: appends an ``FC`` slot stored as ``(p, e)``."""
    return covariant_derivative(D, conn, "v")



def _evaluator(batch: PointBatch, cache: dict) -> EvalCache:
    ev = cache.get("eval")
    if ev is None or ev.batch is not batch:
        ev = cache["eval"] = EvalCache(batch)
    return ev


def _coeff_values(conn: GammaConnection, name: str, batch: PointBatch, cache: dict) -> np.ndarray:
    key = (name, id(conn), id(batch))
    if key not in cache:
        src = conn.nc if name in ("M", "N") else conn
        cache[key] = evaluate_batch(getattr(src, name), None, _evaluator(batch, cache))
    return cache[key]


def covariant_derivative_values(
    D: DTensor,
    conn: GammaConnection,
    direction: str,
    points,
    cache: dict | None = None,
) -> np.ndarray:
    """Values of ``covariant_derivative(D, conn, direction)`` at ``points``.

    Same result as evaluating the symbolic derivative, but only the plain
    partial derivatives of the components are formed symbolically; the
    adapted-frame corrections and connection terms are applied to numbers.
    Returns shape ``(N,) + signature shape + direction axes``.
    """
    if D.dims != conn.dims:
        raise ValueError(f"tensor dims {D.dims} do not match connection dims {conn.dims}")
    batch = points if isinstance(points, PointBatch) else PointBatch.from_points(points)
    cache = {} if cache is None else cache
    p, n = conn.dims
    comps = D.components
    fibers = [Coord("fiber", a=b + 1, i=j + 1) for j in range(n) for b in range(p)]
    if direction == "t":
        own = [Coord("temporal", a=a + 1) for a in range(p)]
    elif direction == "x":
        own = [Coord("spatial", i=i + 1) for i in range(n)]
    elif direction == "v":
        own = []
    else:
        raise ValueError(f"unknown direction {direction!r}")
    coords = own + fibers
    parts = np.empty(comps.shape + (len(coords),), dtype=object)
    for idx in np.ndindex(comps.shape):
        e = comps[idx]
        for k, c in enumerate(coords):
            parts[idx + (k,)] = differentiate(e, c)
    vals = evaluate_batch(parts, None, _evaluator(batch, cache))
    N = len(batch)
    dv = vals[..., len(own):].reshape((N,) + comps.shape + (n, p))
    if direction == "v":
        out = dv
    else:
        nl = _coeff_values(conn, "M" if direction == "t" else "N", batch, cache)  # [z, j, b, a]
        out = vals[..., : len(own)] - np.einsum("z...jb,zjba->z...a", dv, nl)

    bar, plain, block, _ = _FAMILIES[direction]
    sig = D.signature
    nd = 1 if direction != "v" else 2
    for s, kind in enumerate(sig.slots):
        ax = sig.axis_of(s)
        if kind in (TU, TL):
            name, width = bar, 1
        elif kind in (SU, SL):
            name, width = plain, 1
        else:
            name, width = block, 2
        if _is_zero(getattr(conn, name)):
            continue
        coeff = _coeff_values(conn, name, batch, cache)
        upper = kind in (TU, SU, FU)
        out = out + _slot_term(_values(D, batch, cache), coeff, ax, width, nd, upper)
    return out


def _values(D: DTensor, batch: PointBatch, cache: dict) -> np.ndarray:
    key = ("tensor", id(D), id(batch))
    if key not in cache:
        cache[key] = (D, evaluate_batch(D.components, None, _evaluator(batch, cache)))
    return cache[key][1]


_LETTERS = "abcdefghijklmnopqrstuvwxy"


def _slot_term(vals: np.ndarray, coeff: np.ndarray, ax: int, width: int, nd: int, upper: bool) -> np.ndarray:
    """Numeric connection term for one slot; ``vals`` carries a leading point axis."""
    rank = vals.ndim - 1
    t_idx = list(_LETTERS[:rank])
    fresh = iter(_LETTERS[rank:])
    summed = [next(fresh) for _ in range(width)]
    kept = t_idx[ax : ax + width]
    dirs = [next(fresh) for _ in range(nd)]
    t_in = t_idx.copy()
    t_in[ax : ax + width] = summed
    c_idx = (kept + summed if upper else summed + kept) + dirs
    spec = f"z{''.join(t_in)},z{''.join(c_idx)}->z{''.join(t_idx + dirs)}"
    term = np.einsum(spec, vals, coeff)
    return term if upper else -term
