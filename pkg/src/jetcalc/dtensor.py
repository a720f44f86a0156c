"""Dense d-tensors with mixed temporal, spatial and fibre index slots.

Components live in a numpy object array of :class:`~jetcalc.expr.Expr`.
Temporal and spatial slots occupy one axis each.  A fibre slot occupies
two consecutive axes ``(i, a)``, spatial index first, so the pair behaves
as one contraction unit:

* ``FU`` is the block of d/dx^i_a (upper spatial i, lower temporal a),
* ``FC`` is the block of the dual coframe (lower spatial i, upper temporal a).

Arrays are 0-based; :meth:`DTensor.component` takes 1-based indices.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .expr import ZERO, Expr, evaluate_batch, v

__all__ = [
    "SlotKind",
    "Signature",
    "DTensor",
    "zero_tensor",
    "liouville",
    "normalization_tensor",
    "expr_array",
]


class SlotKind(enum.Enum):
    TU = "TU"  # temporal upper
    TL = "TL"  # temporal lower
    SU = "SU"  # spatial upper
    SL = "SL"  # spatial lower
    FU = "FU"  # fibre pair, spatial upper / temporal lower
    FC = "FC"  # fibre pair, temporal upper / spatial lower

    @property
    def is_fiber(self) -> bool:
        return self in (SlotKind.FU, SlotKind.FC)

    def axes(self, dims: tuple[int, int]) -> tuple[int, ...]:
        p, n = dims
        if self in (SlotKind.TU, SlotKind.TL):
            return (p,)
        if self in (SlotKind.SU, SlotKind.SL):
            return (n,)
        return (n, p)

    def range(self, dims: tuple[int, int]) -> int:
        return int(np.prod(self.axes(dims)))


TU, TL, SU, SL, FU, FC = SlotKind


@dataclass(frozen=True)
class Signature:
    slots: tuple[SlotKind, ...]
    dims: tuple[int, int]

    def __init__(self, slots, dims):
        slots = tuple(SlotKind(s) if not isinstance(s, SlotKind) else s for s in slots)
        p, n = (int(d) for d in dims)
        if p < 1 or n < 1:
            raise ValueError(f"invalid dims {dims}")
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "dims", (p, n))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax for s in self.slots for ax in s.axes(self.dims))

    @property
    def flat_shape(self) -> tuple[int, ...]:
        """One axis per slot, fibre pairs flattened to ``i * p + a``."""
        return tuple(s.range(self.dims) for s in self.slots)

    def axis_of(self, slot: int) -> int:
        """First array axis of slot number ``slot``."""
        return sum(len(s.axes(self.dims)) for s in self.slots[:slot])

    @property
    def size(self) -> int:
        return int(np.prod(self.flat_shape)) if self.slots else 1

    def __add__(self, more) -> "Signature":
        return Signature(self.slots + tuple(more), self.dims)

    def __len__(self) -> int:
        return len(self.slots)


def expr_array(shape, fill=ZERO) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(fill)
    return arr


class DTensor:
    """A d-tensor field: a signature plus a dense grid of expressions."""

    __slots__ = ("signature", "components")

    def __init__(self, signature: Signature, components):
        comps = np.asarray(components, dtype=object)
        if comps.shape != signature.shape:
            comps = comps.reshape(signature.shape) if comps.size == signature.size else None
        if comps is None:
            raise ValueError(f"components do not match signature shape {signature.shape}")
        comps = comps.copy()
        for idx in np.ndindex(comps.shape):
            if not isinstance(comps[idx], Expr):
                comps[idx] = ZERO + comps[idx]
        comps.setflags(write=False)
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("DTensor is immutable")

    @property
    def dims(self) -> tuple[int, int]:
        return self.signature.dims

    @property
    def slots(self) -> tuple[SlotKind, ...]:
        return self.signature.slots

    @property
    def shape(self) -> tuple[int, ...]:
        return self.components.shape

    def component(self, *index) -> Expr:
        """Component at 1-based indices; fibre slots take an ``(i, a)`` pair."""
        if len(index) != len(self.slots):
            raise IndexError(f"expected {len(self.slots)} indices, got {len(index)}")
        flat = []
        for slot, idx in zip(self.slots, index):
            if slot.is_fiber and not isinstance(idx, (tuple, list)):
                raise IndexError(f"fibre slot {slot.value} needs an (i, a) pair, got {idx!r}")
            parts = tuple(idx) if slot.is_fiber else (idx,)
            bounds = slot.axes(self.dims)
            if len(parts) != len(bounds) or not all(1 <= k <= b for k, b in zip(parts, bounds)):
                raise IndexError(f"index {idx} out of range for slot {slot.value}")
            flat.extend(k - 1 for k in parts)
        return self.components[tuple(flat)]

    def evaluate(self, points) -> np.ndarray:
        """Float array of shape ``(N,) + shape``."""
        return evaluate_batch(self.components, points)

    def evaluate_flat(self, points) -> np.ndarray:
        """Like :meth:`evaluate` but with fibre pairs merged into one axis."""
        vals = self.evaluate(points)
        return vals.reshape((vals.shape[0],) + self.signature.flat_shape)

    def map(self, fn) -> "DTensor":
        out = np.empty(self.shape, dtype=object)
        for idx in np.ndindex(self.shape):
            out[idx] = fn(self.components[idx])
        return DTensor(self.signature, out)

    def indices(self):
        return np.ndindex(self.shape)

    def __repr__(self) -> str:
        sig = ",".join(s.value for s in self.slots)
        return f"DTensor([{sig}], dims={self.dims})"


def zero_tensor(signature: Signature) -> DTensor:
    return DTensor(signature, expr_array(signature.shape))


def liouville(dims) -> DTensor:
    """The canonical Liouville field x^i_a d/dx^i_a as an ``[FU]`` tensor."""
    sig = Signature([FU], dims)
    p, n = sig.dims
    comps = expr_array((n, p))
    for i, a in itertools.product(range(n), range(p)):
        comps[i, a] = v(i + 1, a + 1)
    return DTensor(sig, comps)


def normalization_tensor(h) -> DTensor:
    """``J^{(i)}_{(a)bj} = h_ab delta^i_j`` with signature ``[FU, TL, SL]``.

    ``h`` is a temporal :class:`~jetcalc.geometry.Metric`; ``n`` is taken
    from ``h.dims``.
    """
    sig = Signature([FU, TL, SL], h.dims)
    p, n = sig.dims
    comps = expr_array(sig.shape)
    for i, a, b in itertools.product(range(n), range(p), range(p)):
        comps[i, a, b, i] = h.g[a, b]
    return DTensor(sig, comps)
