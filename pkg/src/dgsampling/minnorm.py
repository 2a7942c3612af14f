"""Minimum-norm point of the convex hull of finitely many vectors.

Wolfe's algorithm: keep a corral S of affinely independent points, step to
the min-norm point of aff(S), and walk back into conv(S) whenever that point
leaves the simplex (minor cycle). A major cycle adds the point most
violating Wolfe's criterion ``<w, x> >= |x|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GradientBundle, InvalidArgument, SolverFailure

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class MinNormSolution:
    xi_star: np.ndarray
    lambdas: np.ndarray
    norm: float
    residual: float
    iterations: int


def _points(W):
    if isinstance(W, GradientBundle):
        if len(W) == 0:
            raise InvalidArgument("empty bundle")
        P = W.as_array()
    else:
        P = np.asarray(W, dtype=float)
        if P.ndim == 1:
            P = P[:, None] if P.size else P.reshape(0, 1)
        if P.ndim != 2 or P.shape[0] == 0:
            raise InvalidArgument("need a non-empty (m, n) array of points")
    if not np.all(np.isfinite(P)):
        raise InvalidArgument("non-finite coordinates in bundle")
    return P


def _affine_minimizer(Q):
    # min |Q^T mu| s.t. sum(mu) = 1, via least squares on [1^T; Q^T] mu = [1; 0]
    k, n = Q.shape
    A = np.vstack([np.ones((1, k)), Q.T])
    rhs = np.zeros(n + 1)
    rhs[0] = 1.0
    mu, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    return mu / mu.sum()


def wolfe_residual(P, x):
    """max over rows w of ``|x|^2 - <w, x>``; zero at the optimum."""
    return float(np.max(x @ x - P @ x))


def min_norm_point(W, tol=DEFAULT_TOL, max_iter=None):
    """Return the point of smallest Euclidean norm in conv(W).

    ``tol`` bounds the Wolfe-criterion residual ``|x|^2 - min_w <w, x>`` of the
    returned point, not its distance to the exact minimizer. For data with
    ``max |w|^2 > 1`` the bound is ``tol * max |w|^2``. Ties in the
    selection steps go to the lowest index, so results are deterministic for
    a fixed input order.
    """
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    P = _points(W)
    m, n = P.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 100

    sq = np.einsum("ij,ij->i", P, P)
    # residuals are quadratic in the data; scale the threshold with it
    thresh = tol * max(1.0, float(sq.max()))
    S = [int(np.argmin(sq))]
    lam = np.array([1.0])
    x = P[S[0]].copy()

    it = 0
    while True:
        it += 1
        if it > max_iter:
            raise SolverFailure(f"min-norm solver did not converge in {max_iter} iterations")
        xx = x @ x
        if xx == 0.0:
            break
        dots = P @ x
        j = int(np.argmin(dots))
        if xx - dots[j] <= thresh:
            break
        if j in S:
            # numerically stalled: the corral already holds the best candidate
            break
        S.append(j)
        lam = np.append(lam, 0.0)

        # minor cycles
        while True:
            it += 1
            if it > max_iter:
                raise SolverFailure(f"min-norm solver did not converge in {max_iter} iterations")
            mu = _affine_minimizer(P[S])
            if np.all(mu > 0):
                lam = mu
                break
            neg = mu <= 0
            ratios = lam[neg] / (lam[neg] - mu[neg])
            theta = float(np.min(ratios))
            lam = lam + theta * (mu - lam)
            keep = lam > 1e-15
            # ensure the blocking index is dropped even with rounding
            blocking = np.flatnonzero(neg)[int(np.argmin(ratios))]
            keep[blocking] = False
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ P[S]

    lambdas = np.zeros(m)
    lambdas[S] = lam
    residual = wolfe_residual(P, x)
    if residual > thresh:
        raise SolverFailure(f"min-norm solver stalled with Wolfe residual {residual:.3e} > {thresh:.1e}")
    return MinNormSolution(
        xi_star=x, lambdas=lambdas, norm=float(np.sqrt(x @ x)), residual=residual, iterations=it
    )


def steepest_direction(W, tol=DEFAULT_TOL):
    """Negative min-norm point of conv(W): the approximate steepest descent direction."""
    sol = min_norm_point(W, tol)
    if sol.norm == 0.0:
        return np.zeros_like(sol.xi_star)
    return -sol.xi_star
