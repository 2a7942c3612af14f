"""Shared types: function oracles, gradient bundles, parameters and traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np


class InvalidArgument(ValueError):
    """Raised when an input violates an operation's precondition."""


class SolverFailure(RuntimeError):
    """Raised when the min-norm solver does not reach its tolerance."""


class AlgorithmFailure(RuntimeError):
    """Raised when a descent routine cannot complete (e.g. bundle overflow).

    ``state`` carries whatever diagnostic data the raising routine had.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


def as_vector(x, name="x"):
    """Return ``x`` as a 1-D float array, rejecting non-finite entries."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise InvalidArgument(f"{name} must be a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True)
class FunctionOracle:
    """Black box for a locally Lipschitz ``f``.

    ``value(x)`` returns f(x); ``grad(x)`` returns a single element of the
    Clarke subdifferential at x. Both must be pure functions of x. A value
    function may return ``fractions.Fraction`` to keep function values
    exact; it is passed through unchanged.
    """

    value: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    name: str = "f"
    dim: Optional[int] = None

    def eval(self, x):
        fx = self.value(as_vector(x))
        return fx if isinstance(fx, Fraction) else float(fx)

    def subgrad(self, x):
        x = as_vector(x)
        g = np.array(self.grad(x), dtype=float).reshape(-1)
        if g.shape != x.shape:
            raise InvalidArgument(
                f"oracle {self.name!r} returned subgradient of shape {g.shape} for x of shape {x.shape}"
            )
        return g


class CountingOracle:
    """Wraps an oracle and counts value / subgradient calls.

    The counters are the only mutable state; create one per run.
    """

    def __init__(self, oracle):
        self.oracle = oracle
        self.n_eval = 0
        self.n_subgrad = 0

    @property
    def name(self):
        return self.oracle.name

    def eval(self, x):
        self.n_eval += 1
        return self.oracle.eval(x)

    def subgrad(self, x):
        self.n_subgrad += 1
        return self.oracle.subgrad(x)


class GradientBundle:
    """Finite set W of subgradients, deduplicated by exact equality."""

    def __init__(self, elements=(), max_size=None):
        self._elements = []
        self.max_size = max_size
        for e in elements:
            self.insert(e)

    @property
    def dim(self):
        return self._elements[0].shape[0] if self._elements else None

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    def __contains__(self, xi):
        xi = np.asarray(xi, dtype=float).reshape(-1)
        return any(_same_bits(e, xi) for e in self._elements)

    def as_array(self):
        """Elements stacked row-wise, shape ``(len(W), n)``."""
        return np.vstack(self._elements)

    def insert(self, xi):
        """Add ``xi`` unless a bitwise-identical element is present.

        Returns True if the bundle grew.
        """
        xi = as_vector(xi, "xi").copy()
        if self._elements and xi.shape[0] != self.dim:
            raise InvalidArgument(f"dimension mismatch: bundle has n={self.dim}, got {xi.shape[0]}")
        if xi in self:
            return False
        if self.max_size is not None and len(self._elements) >= self.max_size:
            raise AlgorithmFailure(
                f"bundle overflow: more than {self.max_size} subgradients needed",
                state={"bundle": self.as_array(), "rejected": xi},
            )
        xi.flags.writeable = False
        self._elements.append(xi)
        return True

    def __repr__(self):
        return f"GradientBundle({[e.tolist() for e in self._elements]})"


def _same_bits(a, b):
    return a.shape == b.shape and a.tobytes() == b.tobytes()


def bundle_insert(bundle, xi):
    """Insert ``xi`` into ``bundle`` in place and return the bundle."""
    bundle.insert(xi)
    return bundle


@dataclass(frozen=True)
class DescentParams:
    """Parameters of the deterministic descent method.

    ``delta=None`` means 1e-6 * max(1, |f(x0)|), resolved at the starting point.
    ``max_bundle=None`` means 2(n + 1).
    """

    eps: float = 1.0
    c: float = 0.5
    delta: Optional[float] = None
    eps_min: float = 1e-6
    delta_min: float = 1e-14
    shrink: float = 0.5
    max_outer: int = 10_000
    max_bundle: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise InvalidArgument(f"c must lie in (0, 1), got {self.c}")
        if not self.eps_min > 0.0:
            raise InvalidArgument("eps_min must be positive")
        if not self.eps > 0.0:
            raise InvalidArgument("eps must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise InvalidArgument(f"shrink must lie in (0, 1), got {self.shrink}")
        if self.delta is not None and not self.delta > 0.0:
            raise InvalidArgument("delta must be positive")
        if not self.delta_min > 0.0:
            raise InvalidArgument("delta_min must be positive")
        if self.max_outer < 1:
            raise InvalidArgument("max_outer must be >= 1")
        if self.max_bundle is not None and self.max_bundle < 1:
            raise InvalidArgument("max_bundle must be >= 1")

    def bundle_cap(self, n):
        return self.max_bundle if self.max_bundle is not None else 2 * (n + 1)


@dataclass(frozen=True)
class EpsCritical:
    """0 is (numerically) in conv(W): ``v_norm <= delta``."""

    v_norm: float
    v: np.ndarray
    bundle: GradientBundle


@dataclass(frozen=True)
class Descent:
    """Direction ``v`` certified to give sufficient descent.

    ``certificate`` is f(x0 + eps/|v| v) - f(x0), which is <= -c eps |v|;
    ``x_new`` is that step point and ``f_new`` its value.
    """

    v: np.ndarray
    bundle: GradientBundle
    certificate: float
    x_new: Optional[np.ndarray] = None
    f_new: Optional[float] = None

    @property
    def v_norm(self):
        return float(np.linalg.norm(self.v))


@dataclass
class TraceRow:
    iter: int
    x: np.ndarray
    fx: float
    eps: float
    vnorm: float
    oracle_evals: int
    oracle_subgrads: int
    bundle_size: int
    bisect_iters: int
    step: bool


@dataclass
class DescentTrace:
    """Per-iteration record of an outer descent loop."""

    rows: list = field(default_factory=list)
    x: Optional[np.ndarray] = None
    fx: Optional[float] = None
    complete: bool = True

    @property
    def n_steps(self):
        return sum(1 for r in self.rows if r.step)

    def accepted_f(self):
        """f before each accepted step, followed by the final f."""
        out = [r.fx for r in self.rows if r.step]
        if self.fx is not None:
            out.append(self.fx)
        return out
