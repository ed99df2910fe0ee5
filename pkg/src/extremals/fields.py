"""Evaluable smooth vector fields on a single coordinate chart.

Field components are written in a small expression language over the chart
variables x1..xn: arithmetic, parentheses, numeric literals, nonnegative
integer powers, and exp/sin/cos. Restricting the grammar to these primitives
keeps every parsed field twice continuously differentiable wherever its
denominators do not vanish. Jacobians are central finite differences and Lie
brackets use the coordinate formula [f, g] = Dg f - Df g.
"""

from __future__ import annotations

import ast

import numpy as np

from .errors import (
    DimensionError,
    EvaluationError,
    FieldSyntaxError,
    FrameError,
)

__all__ = [
    "DEFAULT_FD_STEP",
    "DEFAULT_RANK_TOL",
    "VectorField",
    "AffineSystem",
    "parse_field",
    "jacobian",
    "lie_bracket",
    "complete_frame",
]

DEFAULT_FD_STEP = 1e-6
DEFAULT_RANK_TOL = 1e-10

_FUNCTIONS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.UAdd, ast.USub)


def _validate_component(tree, dim, component):
    """Walk one parsed component and reject anything outside the grammar."""
    names = {f"x{i + 1}" for i in range(dim)}
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load)):
            continue
        if isinstance(node, ast.BinOp):
            if not isinstance(node.op, _ALLOWED_BINOPS):
                raise FieldSyntaxError(
                    f"component {component}, column {node.col_offset + 1}: "
                    f"operator {type(node.op).__name__} not allowed"
                )
            if isinstance(node.op, ast.Pow):
                exp = node.right
                ok = isinstance(exp, ast.Constant) and isinstance(exp.value, int) and exp.value >= 0
                if not ok:
                    raise FieldSyntaxError(
                        f"component {component}, column {node.col_offset + 1}: "
                        "exponent must be a nonnegative integer literal"
                    )
            continue
        if isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, _ALLOWED_UNARY):
                raise FieldSyntaxError(
                    f"component {component}, column {node.col_offset + 1}: "
                    f"operator {type(node.op).__name__} not allowed"
                )
            continue
        if isinstance(node, (ast.UAdd, ast.USub)) or isinstance(node, _ALLOWED_BINOPS):
            continue
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)):
                raise FieldSyntaxError(
                    f"component {component}: literal {node.value!r} is not a real number"
                )
            continue
        if isinstance(node, ast.Name):
            if node.id in names or node.id in _FUNCTIONS:
                continue
            raise FieldSyntaxError(
                f"component {component}, column {node.col_offset + 1}: "
                f"unknown identifier '{node.id}'"
            )
        if isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id in _FUNCTIONS):
                raise FieldSyntaxError(
                    f"component {component}, column {node.col_offset + 1}: "
                    "only exp/sin/cos calls are allowed"
                )
            if len(node.args) != 1 or node.keywords:
                raise FieldSyntaxError(
                    f"component {component}, column {node.col_offset + 1}: "
                    f"{node.func.id} takes exactly one argument"
                )
            continue
        raise FieldSyntaxError(
            f"component {component}: construct {type(node).__name__} not allowed"
        )


def parse_field(source, dim):
    """Parse ``dim`` semicolon-separated expressions into a VectorField.

    The grammar supports standard arithmetic precedence, parentheses, numeric
    literals, the variables x1..x<dim>, nonnegative integer powers, and the
    functions exp, sin, cos. Parsing is deterministic; errors carry the
    component index and column of the offending token.
    """
    dim = int(dim)
    if dim <= 0:
        raise DimensionError(f"field dimension must be positive, got {dim}")
    parts = source.split(";")
    if len(parts) != dim:
        raise DimensionError(
            f"expected {dim} semicolon-separated components, got {len(parts)}"
        )
    items = []
    for idx, part in enumerate(parts, start=1):
        text = part.strip()
        if not text:
            raise FieldSyntaxError(f"component {idx} is empty")
        try:
            tree = ast.parse(text, mode="eval")
        except SyntaxError as exc:
            raise FieldSyntaxError(
                f"component {idx}, column {exc.offset}: {exc.msg}"
            ) from None
        _validate_component(tree, dim, idx)
        body = tree.body
        if isinstance(body, ast.Constant):
            items.append(float(body.value))
        elif (
            isinstance(body, ast.UnaryOp)
            and isinstance(body.op, ast.USub)
            and isinstance(body.operand, ast.Constant)
        ):
            items.append(-float(body.operand.value))
        else:
            items.append(compile(tree, f"<component {idx}>", "eval"))
    return VectorField(dim, items, source)


def _eval_fields_batch(fields, pts):
    """Evaluate several same-dimension fields on a batch of column points."""
    dim, m = pts.shape
    ns = {"__builtins__": {}}
    ns.update(_FUNCTIONS)
    for i in range(dim):
        ns[f"x{i + 1}"] = pts[i]
    out = np.empty((len(fields), dim, m))
    with np.errstate(all="ignore"):
        for a, field in enumerate(fields):
            for i, item in enumerate(field._items):
                if isinstance(item, float):
                    out[a, i] = item
                else:
                    out[a, i] = eval(item, ns)
    if not np.isfinite(out).all():
        bad = [f.source for f in fields]
        raise EvaluationError(f"non-finite field value among {bad}")
    return out


class VectorField:
    """A field on the n-dimensional chart, evaluable at points and batches."""

    __slots__ = ("dim", "source", "_items")

    def __init__(self, dim, items, source=""):
        self.dim = int(dim)
        self._items = tuple(items)
        self.source = source

    @classmethod
    def constant(cls, values):
        values = np.asarray(values, dtype=float)
        source = "; ".join(repr(float(v)) for v in values)
        return cls(values.size, tuple(float(v) for v in values), source)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionError(
                f"expected a point of dimension {self.dim}, got shape {x.shape}"
            )
        return _eval_fields_batch((self,), x[:, None])[0, :, 0]

    def eval_batch(self, pts):
        """Evaluate on points given as columns of ``pts`` (dim x m)."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[0] != self.dim:
            raise DimensionError(
                f"expected batch of shape ({self.dim}, m), got {pts.shape}"
            )
        return _eval_fields_batch((self,), pts)[0]

    def __repr__(self):
        return f"VectorField(dim={self.dim}, {self.source!r})"


def jacobian(f, x, step=DEFAULT_FD_STEP):
    """Central-difference Jacobian of ``f`` at ``x``; entry (i, j) is df_i/dx_j.

    The step for coordinate j is step * max(1, |x_j|), which keeps the
    relative truncation error O(step^2) for the grammar's smooth functions.
    """
    x = np.asarray(x, dtype=float)
    if not np.isfinite(x).all():
        raise EvaluationError(f"non-finite evaluation point {x!r}")
    n = f.dim
    if x.shape != (n,):
        raise DimensionError(f"expected point of dimension {n}, got shape {x.shape}")
    h = step * np.maximum(1.0, np.abs(x))
    pts = np.repeat(x[:, None], 2 * n, axis=1)
    idx = np.arange(n)
    pts[idx, 2 * idx] += h
    pts[idx, 2 * idx + 1] -= h
    vals = f.eval_batch(pts)
    return (vals[:, 0::2] - vals[:, 1::2]) / (2.0 * h)[None, :]


def lie_bracket(f, g, x, step=DEFAULT_FD_STEP):
    """Lie bracket [f, g](x) = (Dg f - Df g)(x) by finite-difference Jacobians."""
    if f.dim != g.dim:
        raise DimensionError(f"bracket of fields with dims {f.dim} and {g.dim}")
    x = np.asarray(x, dtype=float)
    return jacobian(g, x, step) @ f(x) - jacobian(f, x, step) @ g(x)


class AffineSystem:
    """System q' = f0(q) + sum_i u_i f_i(q) together with a completed frame.

    Holds the drift f0, the k controlled fields f1..fk, and n-k frame-tail
    fields f_{k+1}..f_n so that f1..fn form a basis near the working chart.
    Instances are immutable after construction and all operations are pure.
    """

    def __init__(self, drift, controlled, frame_tail, *, fd_step=DEFAULT_FD_STEP,
                 rank_tol=DEFAULT_RANK_TOL):
        controlled = tuple(controlled)
        frame_tail = tuple(frame_tail)
        n = drift.dim
        k = len(controlled)
        if k == 0:
            raise DimensionError("at least one controlled field is required")
        if k >= n:
            raise DimensionError(f"need k < n, got k={k}, n={n}")
        if len(frame_tail) != n - k:
            raise DimensionError(
                f"frame tail must have {n - k} fields, got {len(frame_tail)}"
            )
        for f in (drift,) + controlled + frame_tail:
            if f.dim != n:
                raise DimensionError("all fields must share the state dimension")
        self.n = n
        self.k = k
        self.fields = (drift,) + controlled + frame_tail
        self.fd_step = float(fd_step)
        self.rank_tol = float(rank_tol)

    @property
    def drift(self):
        return self.fields[0]

    @property
    def controlled(self):
        return self.fields[1:self.k + 1]

    @property
    def frame_tail(self):
        return self.fields[self.k + 1:]

    def field(self, i):
        """Field f_i for i in 0..n (0 is the drift)."""
        if not 0 <= i <= self.n:
            raise DimensionError(f"field index {i} outside 0..{self.n}")
        return self.fields[i]

    def all_values(self, x):
        """Stacked values, row a is f_a(x) for a = 0..n."""
        x = np.asarray(x, dtype=float)
        return _eval_fields_batch(self.fields, x[:, None])[:, :, 0]

    def frame_matrix(self, x):
        """Matrix with columns f_1(x)..f_n(x)."""
        return self.all_values(x)[1:].T

    def values_and_jacobians(self, x, step=None):
        """All field values and central-difference Jacobians at ``x``.

        Returns (V, J) with V[a] = f_a(x) and J[a] the Jacobian of f_a,
        sharing a single batched evaluation across all n+1 fields.
        """
        if step is None:
            step = self.fd_step
        x = np.asarray(x, dtype=float)
        n = self.n
        h = step * np.maximum(1.0, np.abs(x))
        pts = np.repeat(x[:, None], 2 * n + 1, axis=1)
        idx = np.arange(n)
        pts[idx, 2 * idx + 1] += h
        pts[idx, 2 * idx + 2] -= h
        vals = _eval_fields_batch(self.fields, pts)
        values = np.ascontiguousarray(vals[:, :, 0])
        jacobians = (vals[:, :, 1::2] - vals[:, :, 2::2]) / (2.0 * h)[None, None, :]
        return values, jacobians

    def check_point(self, x):
        """Validate frame invariants at ``x``: controlled independence, full basis."""
        frame = self.frame_matrix(x)
        sv = np.linalg.svd(frame[:, :self.k], compute_uv=False)
        if sv[-1] <= self.rank_tol * max(1.0, sv[0]):
            raise FrameError(
                f"controlled fields dependent at {np.asarray(x).tolist()} "
                f"(smallest singular value {sv[-1]:.3e})"
            )
        det = np.linalg.det(frame)
        scale = np.prod(np.linalg.norm(frame, axis=0))
        if abs(det) <= self.rank_tol * max(1.0, scale):
            raise FrameError(
                f"frame degenerate at {np.asarray(x).tolist()} (|det| = {abs(det):.3e})"
            )

    def __repr__(self):
        return f"AffineSystem(n={self.n}, k={self.k})"


def complete_frame(drift, controlled, anchor, *, fd_step=DEFAULT_FD_STEP,
                   rank_tol=DEFAULT_RANK_TOL):
    """Complete f1..fk to a full frame with coordinate basis fields.

    Greedy pivoted selection: among the remaining coordinate vectors, pick at
    each stage the one with the largest component orthogonal to the span built
    so far, which maximizes |det| of the final frame at ``anchor``.
    """
    anchor = np.asarray(anchor, dtype=float)
    controlled = tuple(controlled)
    n = drift.dim
    k = len(controlled)
    cols = np.column_stack([f(anchor) for f in controlled])
    sv = np.linalg.svd(cols, compute_uv=False)
    if sv[-1] <= rank_tol * max(1.0, sv[0]):
        raise FrameError(
            f"controlled fields dependent at anchor {anchor.tolist()} "
            f"(smallest singular value {sv[-1]:.3e})"
        )
    chosen = []
    eye = np.eye(n)
    for _ in range(n - k):
        q, _ = np.linalg.qr(cols)
        resid = eye - q @ q.T
        scores = np.linalg.norm(resid, axis=0)
        for j in chosen:
            scores[j] = -1.0
        j = int(np.argmax(scores))
        chosen.append(j)
        cols = np.column_stack([cols, eye[:, j]])
    det = np.linalg.det(cols)
    if abs(det) <= rank_tol:
        raise FrameError(f"frame completion failed at anchor (|det| = {abs(det):.3e})")
    tail = [VectorField.constant(eye[:, j]) for j in chosen]
    return AffineSystem(drift, controlled, tail, fd_step=fd_step, rank_tol=rank_tol)
