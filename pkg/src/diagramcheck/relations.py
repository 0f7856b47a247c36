"""Minimal symbolic grammar for plotted relations, plus robust curve fitting.

Supported forms: polynomials up to degree 3, reciprocal expressions with x in
a denominator, absolute-value expressions, and piecewise definitions of up to
three linear pieces. Anything else raises UnsupportedRelation; this is a tiny
evaluator on purpose, not a CAS.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedRelation

_TOKEN_RE = re.compile(r"""
    \s*(?:
        (?P<num>\d+\.\d*|\.\d+|\d+)
      | (?P<name>[A-Za-z_]+)
      | (?P<op>\*\*|<=|>=|[+\-*/^(),<>])
    )""", re.VERBOSE)


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise UnsupportedRelation(f"cannot tokenize {text[pos:]!r}")
        tokens.append(m.group().strip())
        pos = m.end()
    return [t for t in tokens if t]


class _Node:
    def __call__(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def degree(self):
        """Polynomial degree, or None when not a polynomial."""
        return None


@dataclass
class _Num(_Node):
    value: float

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=np.float64), self.value)

    def degree(self):
        return 0


class _Var(_Node):
    def __call__(self, x):
        return np.asarray(x, dtype=np.float64)

    def degree(self):
        return 1


@dataclass
class _BinOp(_Node):
    op: str
    left: _Node
    right: _Node

    def __call__(self, x):
        a = self.left(x)
        b = self.right(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.op == "+":
                return a + b
            if self.op == "-":
                return a - b
            if self.op == "*":
                return a * b
            if self.op == "/":
                out = a / b
                return np.where(np.isfinite(out), out, np.nan)
            return np.power(a, b)

    def degree(self):
        dl, dr = self.left.degree(), self.right.degree()
        if self.op in ("+", "-"):
            if dl is None or dr is None:
                return None
            return max(dl, dr)
        if self.op == "*":
            if dl is None or dr is None:
                return None
            return dl + dr
        if self.op == "/":
            if dl is not None and dr == 0:
                return dl
            return None
        if self.op == "^":
            if dl is None or not isinstance(self.right, _Num):
                return None
            exp = self.right.value
            if exp != int(exp) or exp < 0:
                return None
            return dl * int(exp)
        return None


@dataclass
class _Neg(_Node):
    inner: _Node

    def __call__(self, x):
        return -self.inner(x)

    def degree(self):
        return self.inner.degree()


@dataclass
class _Abs(_Node):
    inner: _Node

    def __call__(self, x):
        return np.abs(self.inner(x))


@dataclass
class _Piece:
    expr: _Node
    op: str | None  # "<", "<=", ">", ">=" against bound; None = else
    bound: float | None

    def matches(self, x):
        if self.op is None:
            return np.ones_like(np.asarray(x, dtype=np.float64), dtype=bool)
        if self.op == "<":
            return x < self.bound
        if self.op == "<=":
            return x <= self.bound
        if self.op == ">":
            return x > self.bound
        return x >= self.bound


@dataclass
class _Piecewise(_Node):
    pieces: list[_Piece]

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.full(x.shape, np.nan)
        unset = np.ones(x.shape, dtype=bool)
        for piece in self.pieces:
            take = unset & piece.matches(x)
            if take.any():
                out[take] = piece.expr(x)[take]
                unset &= ~take
        return out


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise UnsupportedRelation(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def parse_expr(self) -> _Node:
        node = self.parse_term()
        while self.peek() in ("+", "-"):
            op = self.take()
            node = _BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> _Node:
        node = self.parse_factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            node = _BinOp(op, node, self.parse_factor())
        return node

    def parse_factor(self) -> _Node:
        node = self.parse_unary()
        if self.peek() in ("^", "**"):
            self.take()
            node = _BinOp("^", node, self.parse_factor())
        return node

    def parse_unary(self) -> _Node:
        if self.peek() == "-":
            self.take()
            return _Neg(self.parse_unary())
        if self.peek() == "+":
            self.take()
            return self.parse_unary()
        return self.parse_atom()

    def parse_atom(self) -> _Node:
        tok = self.peek()
        if tok is None:
            raise UnsupportedRelation("unexpected end of expression")
        if re.fullmatch(r"\d+\.\d*|\.\d+|\d+", tok):
            self.take()
            return _Num(float(tok))
        if tok == "x":
            self.take()
            return _Var()
        if tok == "(":
            self.take()
            node = self.parse_expr()
            self.take(")")
            return node
        if tok == "abs":
            self.take()
            self.take("(")
            node = _Abs(self.parse_expr())
            self.take(")")
            return node
        if tok == "piecewise":
            return self.parse_piecewise()
        raise UnsupportedRelation(f"unexpected token {tok!r}")

    def parse_piecewise(self) -> _Node:
        self.take("piecewise")
        self.take("(")
        pieces = []
        while True:
            pieces.append(self.parse_piece())
            if self.peek() == ",":
                self.take()
                continue
            break
        self.take(")")
        if not 1 <= len(pieces) <= 3:
            raise UnsupportedRelation("piecewise supports at most 3 pieces")
        for piece in pieces:
            deg = piece.expr.degree()
            if deg is None or deg > 1:
                raise UnsupportedRelation("piecewise pieces must be linear")
        return _Piecewise(pieces)

    def parse_piece(self) -> _Piece:
        self.take("(")
        expr = self.parse_expr()
        op = None
        bound = None
        if self.peek() == ",":
            self.take()
            self.take("x")
            op = self.take()
            if op not in ("<", "<=", ">", ">="):
                raise UnsupportedRelation(f"bad piecewise condition op {op!r}")
            sign = 1.0
            if self.peek() == "-":
                self.take()
                sign = -1.0
            bound = sign * float(self.take())
        self.take(")")
        return _Piece(expr, op, bound)


@dataclass
class Relation:
    """Parsed plotted relation y = f(x)."""

    source: str
    root: _Node
    family: str  # poly0..poly3 | reciprocal | abs | piecewise

    def __call__(self, x) -> np.ndarray:
        return self.root(np.asarray(x, dtype=np.float64))


def _contains(node: _Node, kind) -> bool:
    if isinstance(node, kind):
        return True
    for attr in ("left", "right", "inner"):
        child = getattr(node, attr, None)
        if child is not None and _contains(child, kind):
            return True
    if isinstance(node, _Piecewise):
        return any(_contains(p.expr, kind) for p in node.pieces)
    return False


def _has_x_denominator(node: _Node) -> bool:
    if isinstance(node, _BinOp):
        if node.op == "/" and node.right.degree() != 0:
            return True
        return _has_x_denominator(node.left) or _has_x_denominator(node.right)
    for attr in ("inner",):
        child = getattr(node, attr, None)
        if child is not None and _has_x_denominator(child):
            return True
    if isinstance(node, _Piecewise):
        return any(_has_x_denominator(p.expr) for p in node.pieces)
    return False


def parse_relation(text: str) -> Relation:
    """Parse and classify a relation; rejects anything outside the grammar."""
    parser = _Parser(_tokenize(text))
    root = parser.parse_expr()
    if parser.peek() is not None:
        raise UnsupportedRelation(f"trailing tokens at {parser.peek()!r}")

    if isinstance(root, _Piecewise) or _contains(root, _Piecewise):
        family = "piecewise"
    elif _has_x_denominator(root):
        family = "reciprocal"
    elif _contains(root, _Abs):
        family = "abs"
    else:
        deg = root.degree()
        if deg is None or deg > 3:
            raise UnsupportedRelation(f"{text!r} is not a supported relation")
        family = f"poly{deg}"
    return Relation(text, root, family)


# --- robust fitting ---

_MINIMAL_SAMPLES = {"poly0": 1, "poly1": 2, "poly2": 3, "poly3": 4,
                    "reciprocal": 3}


def curve_inliers(points: np.ndarray, fn, tol_x: float, tol_y: float) -> np.ndarray:
    """Box inlier test: a point is an inlier when the curve passes within
    tol_y vertically of some x within tol_x horizontally."""
    x = points[:, 0]
    y = points[:, 1]
    offsets = np.linspace(-tol_x, tol_x, 7)
    ys = fn(x[:, None] + offsets[None, :])
    dy = np.abs(ys - y[:, None])
    dy = np.where(np.isnan(dy), np.inf, dy)
    return dy.min(axis=1) <= tol_y


def _fit_poly(points: np.ndarray, degree: int):
    if len(points) < degree + 1:
        return None
    x, y = points[:, 0], points[:, 1]
    if float(np.ptp(x)) < 1e-9:
        return None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", np.exceptions.RankWarning)
            coeffs = np.polyfit(x, y, degree)
    except (np.linalg.LinAlgError, ValueError):
        return None
    if not np.all(np.isfinite(coeffs)):
        return None
    return tuple(float(c) for c in coeffs)


def _fit_reciprocal(points: np.ndarray):
    """Fit y = a/(x - h) + k via the linearization x*y = u + k*x + h*y."""
    if len(points) < 3:
        return None
    x, y = points[:, 0], points[:, 1]
    design = np.column_stack([np.ones_like(x), x, y])
    target = x * y
    try:
        (u, k, h), *_ = np.linalg.lstsq(design, target, rcond=None)
    except np.linalg.LinAlgError:
        return None
    a = u + k * h
    if not all(map(math.isfinite, (a, h, k))) or abs(a) < 1e-9:
        return None
    return (float(a), float(h), float(k))


def _model_fn(family: str, params):
    if family.startswith("poly"):
        return lambda x: np.polyval(params, x)
    a, h, k = params

    def reciprocal(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = a / (x - h) + k
        return np.where(np.isfinite(out), out, np.nan)

    return reciprocal


@dataclass
class RansacFit:
    """Best robust model found for one point cloud."""

    family: str
    params: tuple
    inlier_mask: np.ndarray
    iterations: int

    @property
    def inlier_fraction(self) -> float:
        return float(self.inlier_mask.mean()) if self.inlier_mask.size else 0.0

    def predict(self, x):
        return _model_fn(self.family, self.params)(x)


def ransac_fit(points: np.ndarray, family: str, *, iterations: int = 250,
               tol_x: float = 0.35, tol_y: float = 0.75,
               seed: int = 42) -> RansacFit | None:
    """Seeded random-sample consensus for one model family.

    Fits minimal subsets, keeps the model with most box-inliers, then refits
    on the winning inlier set. Returns None when no sample produced a model.
    """
    if family not in _MINIMAL_SAMPLES:
        raise UnsupportedRelation(f"no RANSAC family for {family!r}")
    points = np.asarray(points, dtype=np.float64)
    k = _MINIMAL_SAMPLES[family]
    if len(points) < k:
        return None
    rng = np.random.default_rng(seed)

    def fit(sample):
        if family.startswith("poly"):
            return _fit_poly(sample, int(family[4]))
        return _fit_reciprocal(sample)

    best_params = None
    best_mask = None
    best_count = -1
    for _ in range(iterations):
        sample = points[rng.choice(len(points), size=k, replace=False)]
        params = fit(sample)
        if params is None:
            continue
        mask = curve_inliers(points, _model_fn(family, params), tol_x, tol_y)
        count = int(mask.sum())
        if count > best_count:
            best_count = count
            best_params = params
            best_mask = mask
    if best_params is None:
        return None

    # local refinement: refit on inliers with a shrinking tolerance so stray
    # clutter inside the wide box cannot bias the final parameters
    params = best_params
    for scale in (1.0, 0.5, 0.25):
        mask = curve_inliers(points, _model_fn(family, params),
                             tol_x * scale, tol_y * scale)
        if int(mask.sum()) < max(k, 8):
            break
        refined = fit(points[mask])
        if refined is None:
            break
        params = refined
    final_mask = curve_inliers(points, _model_fn(family, params), tol_x, tol_y)
    # a tight refit may shed a few clutter points the lucky winner caught;
    # only a collapse in support means the refinement went wrong
    if int(final_mask.sum()) >= 0.9 * best_count:
        best_params = params
        best_mask = final_mask
    return RansacFit(family, best_params, best_mask, iterations)
