"""
Dense tensors with reverse-mode gradients.

A ``Tensor`` is an immutable, finite, row-major array (float64 by default,
float32 accepted for fast runs). Operations build new tensors; when any input
was created with ``requires_grad=True`` the result remembers its parents and a
vector-Jacobian product so that ``gradients()`` can walk the graph backwards.

Feature maps are C x H x W. Channel vectors are 1-D, MLP weights 2-D and
convolution kernels Cout x Cin x k x k. There is no batch axis: a map with a
leading batch dimension is rejected with ShapeError, and callers run one image
at a time.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import EvaluationError, ParameterError, ShapeError
from ..utils.validation import validate_odd_kernel

DEFAULT_DTYPE = np.float64
_ALLOWED_DTYPES = (np.dtype(np.float64), np.dtype(np.float32))

Vjp = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]
PoolMode = Literal["avg", "max"]
PoolScope = Literal["global-spatial", "per-pixel-over-channels", "window"]
CombineOp = Literal["mul", "add", "concat-channels"]


class Tensor:
    """Immutable dense array node. Map operations take a single C x H x W image."""

    __slots__ = ("_data", "requires_grad", "_parents", "_vjp")

    def __init__(self, data, *, requires_grad: bool = False, dtype=None):
        arr = np.array(data, dtype=dtype or DEFAULT_DTYPE)
        if arr.dtype not in _ALLOWED_DTYPES:
            raise ParameterError(f"Unsupported tensor dtype: {arr.dtype}")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("Tensor values must be finite (NaN/Inf rejected)")
        arr.flags.writeable = False
        self._data = arr
        self.requires_grad = requires_grad
        self._parents: Tuple[Tensor, ...] = ()
        self._vjp: Optional[Vjp] = None

    @classmethod
    def from_op(cls, data: np.ndarray, parents: Sequence["Tensor"], vjp: Vjp) -> "Tensor":
        """Wrap the result of an operation, recording the graph edge when needed."""
        if not np.all(np.isfinite(data)):
            raise EvaluationError("Operation produced non-finite values")
        out = cls.__new__(cls)
        arr = np.ascontiguousarray(data)
        arr.flags.writeable = False
        out._data = arr
        track = any(p.requires_grad for p in parents)
        out.requires_grad = track
        out._parents = tuple(parents) if track else ()
        out._vjp = vjp if track else None
        return out

    # *** properties ***
    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> Tuple[int, ...]:
        return self._data.shape

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return int(self._data.size)

    @property
    def dtype(self) -> np.dtype:
        return self._data.dtype

    def numpy(self) -> np.ndarray:
        return self._data.copy()

    def detach(self) -> "Tensor":
        return Tensor(self._data, dtype=self._data.dtype)

    def item(self) -> float:
        if self.size != 1:
            raise ShapeError(f"item() needs a single element, tensor has shape {self.shape}")
        return float(self._data.reshape(()))

    def __float__(self) -> float:
        return self.item()

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"


def as_tensor(value, dtype=None) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value, dtype=dtype)


# *** backward pass ***

def _topological(root: Tensor) -> List[Tensor]:
    """Post-order walk (parents first), iterative to survive deep graphs."""
    order: List[Tensor] = []
    seen = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    return order


def gradients(
    output: Tensor,
    inputs: Sequence[Tensor],
    seed: Optional[np.ndarray] = None,
) -> List[np.ndarray]:
    """
    Gradient of ``output`` with respect to each of ``inputs``.

    Args:
        output: Scalar tensor (or any tensor together with ``seed``)
        inputs: Tensors created with ``requires_grad=True``
        seed: Upstream gradient, defaults to 1 for scalar outputs

    Returns:
        One array per input, shaped like the input (zeros when unreachable)
    """
    if seed is None:
        if output.size != 1:
            raise ShapeError(f"gradients() needs a scalar output or a seed, got {output.shape}")
        seed = np.ones_like(output.data)
    elif seed.shape != output.shape:
        raise ShapeError(f"Seed shape {seed.shape} does not match output {output.shape}")

    grads: Dict[int, np.ndarray] = {id(output): np.asarray(seed, dtype=output.dtype)}
    for node in reversed(_topological(output)):
        g = grads.get(id(node))
        if g is None or node._vjp is None:
            continue
        for parent, pg in zip(node._parents, node._vjp(g)):
            if pg is None or not parent.requires_grad:
                continue
            key = id(parent)
            grads[key] = grads[key] + pg if key in grads else pg

    return [grads.get(id(x), np.zeros_like(x.data)) for x in inputs]


# *** shape helpers ***

def _require_map(x: Tensor, name: str = "input") -> Tuple[int, int, int]:
    if x.ndim != 3:
        raise ShapeError(f"{name} must be C x H x W, got shape {x.shape}")
    if x.size == 0:
        raise ShapeError(f"{name} is empty: {x.shape}")
    return x.shape  # type: ignore[return-value]


def _reduce_to(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back onto the operand's shape."""
    if grad.shape == shape:
        return grad
    if len(shape) == 1:
        # channel vector broadcast over H x W
        return grad.sum(axis=(1, 2))
    return grad.sum(axis=0, keepdims=True)


def _broadcast_operand(b: np.ndarray, target: Tuple[int, ...]) -> np.ndarray:
    return b[:, None, None] if b.ndim == 1 and len(target) == 3 else b


def _broadcast_shape(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
    """Equal shapes, C-vector over C x H x W, or 1 x H x W over C x H x W."""
    if a == b:
        return a
    for big, small in ((a, b), (b, a)):
        if len(big) != 3:
            continue
        if len(small) == 1 and small[0] == big[0]:
            return big
        if len(small) == 3 and small[0] == 1 and small[1:] == big[1:]:
            return big
    raise ShapeError(f"Shapes {a} and {b} are not broadcast-compatible")


# *** primitives ***

def conv2d(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None, padding: int = 0) -> Tensor:
    """
    2-D cross-correlation with zero padding, stride 1.

    Args:
        x: Cin x H x W input
        weight: Cout x Cin x k x k kernel (k odd)
        bias: Cout vector (optional)
        padding: Zero padding on every side

    Returns:
        Cout x (H + 2p - k + 1) x (W + 2p - k + 1) tensor
    """
    cin, h, w = _require_map(x)
    if weight.ndim != 4:
        raise ShapeError(f"Kernel must be Cout x Cin x k x k, got {weight.shape}")
    cout, wcin, kh, kw = weight.shape
    if kh != kw:
        raise ShapeError(f"Kernel must be square, got {kh}x{kw}")
    validate_odd_kernel(kh, "conv kernel")
    if wcin != cin:
        raise ShapeError(f"Kernel expects {wcin} input channels, input has {cin}")
    if padding < 0:
        raise ParameterError(f"padding must be >= 0, got {padding}")
    if bias is not None and bias.shape != (cout,):
        raise ShapeError(f"Bias must have shape ({cout},), got {bias.shape}")
    k = kh
    ho, wo = h + 2 * padding - k + 1, w + 2 * padding - k + 1
    if ho < 1 or wo < 1:
        raise ShapeError(f"Kernel {k} larger than padded input {h}x{w} (padding {padding})")

    xp = np.pad(x.data, ((0, 0), (padding, padding), (padding, padding)))
    windows = sliding_window_view(xp, (k, k), axis=(1, 2))
    wd = weight.data
    out = np.einsum("chwij,ocij->ohw", windows, wd, optimize=True)
    if bias is not None:
        out = out + bias.data[:, None, None]

    def vjp(g: np.ndarray):
        gw = np.einsum("chwij,ohw->ocij", windows, g, optimize=True)
        gb = g.sum(axis=(1, 2)) if bias is not None else None
        gxp = np.zeros_like(xp)
        for i in range(k):
            for j in range(k):
                gxp[:, i:i + ho, j:j + wo] += np.einsum("oc,ohw->chw", wd[:, :, i, j], g)
        gx = gxp[:, padding:padding + h, padding:padding + w]
        return (gx, gw, gb) if bias is not None else (gx, gw)

    parents = (x, weight, bias) if bias is not None else (x, weight)
    return Tensor.from_op(out, parents, vjp)


def global_pool(x: Tensor, mode: PoolMode) -> Tensor:
    """Spatial summary per channel: C x H x W -> C."""
    c, h, w = _require_map(x)
    flat = x.data.reshape(c, h * w)
    if mode == "avg":
        out = flat.mean(axis=1)

        def vjp(g: np.ndarray):
            return (np.broadcast_to((g / (h * w))[:, None, None], (c, h, w)).copy(),)

    elif mode == "max":
        idx = flat.argmax(axis=1)
        out = flat[np.arange(c), idx]

        def vjp(g: np.ndarray):
            gx = np.zeros((c, h * w), dtype=g.dtype)
            gx[np.arange(c), idx] = g
            return (gx.reshape(c, h, w),)

    else:
        raise ParameterError(f"Unknown pooling mode: {mode}")
    return Tensor.from_op(out, (x,), vjp)


def channel_pool(x: Tensor, mode: PoolMode) -> Tensor:
    """Per-pixel summary over channels: C x H x W -> 1 x H x W."""
    c, h, w = _require_map(x)
    if mode == "avg":
        out = x.data.mean(axis=0, keepdims=True)

        def vjp(g: np.ndarray):
            return (np.broadcast_to(g / c, (c, h, w)).copy(),)

    elif mode == "max":
        idx = x.data.argmax(axis=0)[None]
        out = np.take_along_axis(x.data, idx, axis=0)

        def vjp(g: np.ndarray):
            gx = np.zeros((c, h, w), dtype=g.dtype)
            np.put_along_axis(gx, idx, g, axis=0)
            return (gx,)

    else:
        raise ParameterError(f"Unknown pooling mode: {mode}")
    return Tensor.from_op(out, (x,), vjp)


def _window_sum(a: np.ndarray, k: int) -> np.ndarray:
    p = k // 2
    padded = np.pad(a, ((0, 0), (p, p), (p, p)))
    return sliding_window_view(padded, (k, k), axis=(1, 2)).sum(axis=(-2, -1))


def window_pool(x: Tensor, mode: PoolMode, kernel: int) -> Tensor:
    """
    Stride-1 window pooling with padding k//2 (shape preserving).

    Padded cells never win a max and are not counted in an average.
    """
    validate_odd_kernel(kernel, "pool kernel")
    c, h, w = _require_map(x)
    p = kernel // 2

    if mode == "max":
        xp = np.pad(x.data, ((0, 0), (p, p), (p, p)), constant_values=-np.inf)
        windows = sliding_window_view(xp, (kernel, kernel), axis=(1, 2)).reshape(
            c, h, w, kernel * kernel
        )
        idx = windows.argmax(axis=-1)
        out = np.take_along_axis(windows, idx[..., None], axis=-1)[..., 0]

        def vjp(g: np.ndarray):
            di, dj = np.divmod(idx, kernel)
            cc, hh, ww = np.indices((c, h, w))
            gx = np.zeros((c, h, w), dtype=g.dtype)
            np.add.at(gx, (cc, hh + di - p, ww + dj - p), g)
            return (gx,)

    elif mode == "avg":
        counts = _window_sum(np.ones((1, h, w), dtype=x.dtype), kernel)
        out = _window_sum(x.data, kernel) / counts

        def vjp(g: np.ndarray):
            # symmetric window: the adjoint of a window sum is a window sum
            return (_window_sum(g / counts, kernel),)

    else:
        raise ParameterError(f"Unknown pooling mode: {mode}")
    return Tensor.from_op(out, (x,), vjp)


def pool(x: Tensor, mode: PoolMode, scope: PoolScope, kernel: Optional[int] = None) -> Tensor:
    """Dispatch to the three pooling scopes used by the attention and SPPF blocks."""
    if x.size == 0:
        raise ShapeError("Cannot pool an empty tensor")
    if scope == "global-spatial":
        return global_pool(x, mode)
    if scope == "per-pixel-over-channels":
        return channel_pool(x, mode)
    if scope == "window":
        if kernel is None:
            raise ParameterError("Window pooling needs a kernel size")
        return window_pool(x, mode, kernel)
    raise ParameterError(f"Unknown pooling scope: {scope}")


def sigmoid_map(x: Tensor) -> Tensor:
    """
    Elementwise logistic function, evaluated without overflow.

    Results are clipped one ulp inside (0, 1) in the tensor's dtype.
    """
    xd = x.data
    one = xd.dtype.type(1)
    e = np.exp(-np.abs(xd))
    out = np.where(xd >= 0, one / (one + e), e / (one + e)).astype(xd.dtype, copy=False)
    out = np.clip(out, np.nextafter(xd.dtype.type(0), one), np.nextafter(one, xd.dtype.type(0)))

    def vjp(g: np.ndarray):
        return (g * out * (1.0 - out),)

    return Tensor.from_op(out, (x,), vjp)


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    out = np.where(mask, x.data, 0.0).astype(x.dtype)

    def vjp(g: np.ndarray):
        return (g * mask,)

    return Tensor.from_op(out, (x,), vjp)


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """Matrix-vector product ``W x + b`` for 1-D ``x``."""
    if x.ndim != 1 or weight.ndim != 2 or weight.shape[1] != x.shape[0]:
        raise ShapeError(f"Cannot apply weight {weight.shape} to vector {x.shape}")
    if bias is not None and bias.shape != (weight.shape[0],):
        raise ShapeError(f"Bias must have shape ({weight.shape[0]},), got {bias.shape}")
    out = weight.data @ x.data
    if bias is not None:
        out = out + bias.data

    def vjp(g: np.ndarray):
        gx = weight.data.T @ g
        gw = np.outer(g, x.data)
        return (gx, gw, g) if bias is not None else (gx, gw)

    parents = (x, weight, bias) if bias is not None else (x, weight)
    return Tensor.from_op(out, parents, vjp)


def combine(a: Tensor, b: Tensor, op: CombineOp) -> Tensor:
    """
    Elementwise multiply/add with the two supported broadcasts, or channel concat.

    Broadcasts: a C-vector over C x H x W, and a 1 x H x W map over C x H x W.
    """
    if op == "concat-channels":
        _require_map(a, "a")
        _require_map(b, "b")
        if a.shape[1:] != b.shape[1:]:
            raise ShapeError(f"Cannot concat maps of spatial size {a.shape[1:]} and {b.shape[1:]}")
        ca = a.shape[0]
        out = np.concatenate([a.data, b.data], axis=0)

        def vjp_cat(g: np.ndarray):
            return (g[:ca], g[ca:])

        return Tensor.from_op(out, (a, b), vjp_cat)

    target = _broadcast_shape(a.shape, b.shape)
    ad = _broadcast_operand(a.data, target)
    bd = _broadcast_operand(b.data, target)

    if op == "mul":
        out = ad * bd

        def vjp(g: np.ndarray):
            return (_reduce_to(g * bd, a.shape), _reduce_to(g * ad, b.shape))

    elif op == "add":
        out = ad + bd

        def vjp(g: np.ndarray):
            return (_reduce_to(g, a.shape), _reduce_to(g, b.shape))

    else:
        raise ParameterError(f"Unknown combine op: {op}")
    return Tensor.from_op(np.broadcast_to(out, target), (a, b), vjp)


def tensor_sum(x: Tensor) -> Tensor:
    """Sum of all elements as a 0-d tensor."""
    shape = x.shape

    def vjp(g: np.ndarray):
        return (np.broadcast_to(g, shape).copy(),)

    return Tensor.from_op(np.asarray(x.data.sum()), (x,), vjp)


def tensor_mean(x: Tensor) -> Tensor:
    if x.size == 0:
        raise ShapeError("Cannot average an empty tensor")
    shape, n = x.shape, x.size

    def vjp(g: np.ndarray):
        return (np.broadcast_to(g / n, shape).copy(),)

    return Tensor.from_op(np.asarray(x.data.mean()), (x,), vjp)
