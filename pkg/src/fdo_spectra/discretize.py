"""Finite-dimensional models of W_V(b) and eigenvalue location below the edge.

Two independent computational routes are provided and kept deliberately
separate so they can cross-check each other:

* a dense position-space matrix whose free part is the circulant generated
  by the Fourier symbol on the grid frequencies (periodic model), solved by
  a full symmetric eigendecomposition, and
* Nystrom matrices of the Birman-Schwinger kernel
  sqrt(V) G_lambda sqrt(V) built from the exact full-line resolvent, with
  eigenvalues of W_V located by bisection on the crossing mu_j(K_lambda) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import core
from .core import PI_SQ, Scale, SpectralPoint
from .errors import GridResolutionError, NumericError, ParameterError

# factor applied to the free symbol before assembly; see assemble_operator
DEFAULT_SYMBOL_CAP = 1e6
# free_symbol(k_max) must reach at least this for the grid to resolve the edge
DEFAULT_CEILING = 1e4
DEFAULT_EDGE_MARGIN = 1e-6


@dataclass(frozen=True)
class Grid:
    """Uniform symmetric grid x_i = -L + i*h, i = 0..N-1, h = 2L/N.

    The conjugate frequencies are k_m = m/(2L), m = -N/2..N/2-1; `k` lists
    them in that order while `k_fft` matches numpy's FFT layout.
    """

    L: float
    N: int

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.N // 2, self.N // 2) / (2.0 * self.L)

    @property
    def k_fft(self) -> np.ndarray:
        return np.fft.fftfreq(self.N, d=self.h)

    @property
    def k_max(self) -> float:
        return self.N / (4.0 * self.L)


def make_grid(L: float, N: int) -> Grid:
    if not (isinstance(L, (int, float)) and math.isfinite(L) and L > 0):
        raise ParameterError(f"half length L must be positive, got {L!r}")
    if not (isinstance(N, (int, np.integer)) and N >= 16 and N % 2 == 0):
        raise ParameterError(f"N must be an even integer >= 16, got {N!r}")
    return Grid(L=float(L), N=int(N))


BOX = "box"
GAUSSIAN = "gaussian"
SECH2 = "sech2"
BUMP_SUM = "bump_sum"
SAMPLED = "sampled"
DELTA = "delta"


@dataclass(frozen=True, eq=False)
class Potential:
    """Nonnegative integrable potential from a small tagged family.

    kind/geometry:
      box       c on [-w/2, w/2]
      gaussian  c * exp(-x^2 / (2 s^2))
      sech2     c / cosh(x/w)^2
      bump_sum  c * sum of Gaussian bumps (center, height, width)
      sampled   c * linear interpolation of a table, zero outside
      delta     point mass of weight c; no pointwise values
    """

    kind: str
    c: float = 1.0
    width: float | None = None
    std: float | None = None
    bumps: tuple[tuple[float, float, float], ...] | None = None
    table_x: tuple[float, ...] | None = None
    table_v: tuple[float, ...] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c >= 0.0):
            raise ParameterError(f"coupling must be >= 0, got {self.c!r}")
        if self.kind in (BOX, SECH2):
            if not (self.width and self.width > 0):
                raise ParameterError(f"{self.kind} potential needs a positive width")
        elif self.kind == GAUSSIAN:
            if not (self.std and self.std > 0):
                raise ParameterError("gaussian potential needs a positive std")
        elif self.kind == BUMP_SUM:
            if not self.bumps:
                raise ParameterError("bump_sum potential needs at least one bump")
            for center, height, width in self.bumps:
                if height < 0 or width <= 0 or not math.isfinite(center):
                    raise ParameterError(
                        f"bad bump (center={center}, height={height}, width={width}): "
                        "heights must be >= 0 and widths positive"
                    )
        elif self.kind == SAMPLED:
            xs = np.asarray(self.table_x, dtype=float)
            vs = np.asarray(self.table_v, dtype=float)
            if xs.ndim != 1 or xs.size < 2 or xs.shape != vs.shape:
                raise ParameterError("sampled potential needs matching x/V columns, >= 2 rows")
            if not np.all(np.diff(xs) > 0):
                raise ParameterError("sampled potential x column must be strictly increasing")
            if np.any(vs < 0):
                raise ParameterError("sampled potential values must be nonnegative")
        elif self.kind != DELTA:
            raise ParameterError(f"unknown potential kind {self.kind!r}")

    @classmethod
    def box(cls, c: float, w: float) -> "Potential":
        return cls(kind=BOX, c=c, width=w)

    @classmethod
    def gaussian(cls, c: float, s: float) -> "Potential":
        return cls(kind=GAUSSIAN, c=c, std=s)

    @classmethod
    def sech2(cls, c: float, w: float) -> "Potential":
        return cls(kind=SECH2, c=c, width=w)

    @classmethod
    def bump_sum(cls, bumps, c: float = 1.0) -> "Potential":
        return cls(kind=BUMP_SUM, c=c, bumps=tuple(tuple(map(float, t)) for t in bumps))

    @classmethod
    def sampled(cls, xs, vs, c: float = 1.0) -> "Potential":
        return cls(
            kind=SAMPLED,
            c=c,
            table_x=tuple(float(v) for v in xs),
            table_v=tuple(float(v) for v in vs),
        )

    @classmethod
    def delta(cls, c: float) -> "Potential":
        return cls(kind=DELTA, c=c)

    def with_coupling(self, c: float) -> "Potential":
        return Potential(
            kind=self.kind,
            c=c,
            width=self.width,
            std=self.std,
            bumps=self.bumps,
            table_x=self.table_x,
            table_v=self.table_v,
        )

    def values(self, x) -> np.ndarray:
        """Pointwise samples V(x); rejected for the delta kind."""
        xx = np.asarray(x, dtype=float)
        if self.kind == BOX:
            return np.where(np.abs(xx) <= self.width / 2.0, self.c, 0.0)
        if self.kind == GAUSSIAN:
            return self.c * np.exp(-(xx**2) / (2.0 * self.std**2))
        if self.kind == SECH2:
            return self.c / np.cosh(xx / self.width) ** 2
        if self.kind == BUMP_SUM:
            out = np.zeros_like(xx)
            for center, height, width in self.bumps:
                out += height * np.exp(-((xx - center) ** 2) / (2.0 * width**2))
            return self.c * out
        if self.kind == SAMPLED:
            return self.c * np.interp(xx, self.table_x, self.table_v, left=0.0, right=0.0)
        raise ParameterError(
            "a delta potential has no pointwise values; use the closed-form "
            "delta path (delta_solve / rank-one Birman-Schwinger)"
        )

    def integral(self) -> float:
        """int V dx in closed form (trapezoid for sampled tables)."""
        if self.kind == BOX:
            return self.c * self.width
        if self.kind == GAUSSIAN:
            return self.c * self.std * math.sqrt(2.0 * math.pi)
        if self.kind == SECH2:
            return 2.0 * self.c * self.width
        if self.kind == BUMP_SUM:
            return self.c * sum(
                height * width * math.sqrt(2.0 * math.pi) for _, height, width in self.bumps
            )
        if self.kind == SAMPLED:
            return self.c * float(np.trapezoid(self.table_v, self.table_x))
        return self.c  # delta


def potential_values(V: Potential, grid: Grid) -> np.ndarray:
    """Samples V(x_i) on the grid nodes."""
    return V.values(grid.x)


def load_sampled_potential(path, c: float = 1.0) -> Potential:
    """Read a two-column (x, V) text table into a sampled potential."""
    data = np.loadtxt(path, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ParameterError(f"{path}: expected two numeric columns (x, V)")
    return Potential.sampled(data[:, 0], data[:, 1], c=c)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense symmetric model of W_V(b) with its provenance."""

    matrix: np.ndarray
    grid: Grid
    scale: Scale
    potential: Potential
    symbol_cap: float | None


def assemble_operator(
    V: Potential,
    grid: Grid,
    scale: Scale,
    ceiling: float = DEFAULT_CEILING,
    symbol_cap: float | None = DEFAULT_SYMBOL_CAP,
) -> OperatorMatrix:
    """Position-space matrix Phi* diag(2cosh(2 pi b k_m)) Phi - diag(V_i).

    Phi is the unitary DFT on the grid, so the free part is the circulant
    generated by the inverse FFT of the symbol.  The symbol is clipped at
    `symbol_cap` before assembly: values beyond the cap only model the far
    continuum, and leaving them at ~e^(2 pi b k_max) would put the whole
    eigenproblem at the mercy of eps*||A|| roundoff.  `ceiling` is the
    resolution floor the uncapped symbol must reach at k_max.
    """
    if V.kind == DELTA:
        raise ParameterError("delta potentials are never discretized pointwise")
    b = scale.b
    arg_max = 2.0 * math.pi * b * grid.k_max
    if arg_max > core._MAX_EXP_ARG:
        raise GridResolutionError(
            f"free symbol overflows at k_max = {grid.k_max:.6g} (2 pi b k_max = "
            f"{arg_max:.4g}); reduce N or increase L"
        )
    if 2.0 * math.cosh(arg_max) < ceiling:
        raise GridResolutionError(
            f"grid does not resolve the symbol: free_symbol(k_max) = "
            f"{2.0 * math.cosh(arg_max):.6g} < ceiling {ceiling:.6g}; "
            "increase N or reduce L"
        )
    if symbol_cap is not None and symbol_cap < ceiling:
        raise ParameterError(f"symbol_cap {symbol_cap!r} must be >= ceiling {ceiling!r}")
    symbol = 2.0 * np.cosh(2.0 * math.pi * b * grid.k_fft)
    if symbol_cap is not None:
        np.minimum(symbol, symbol_cap, out=symbol)
    first_col = np.fft.ifft(symbol).real
    A = scipy.linalg.circulant(first_col)
    A = 0.5 * (A + A.T)
    idx = np.arange(grid.N)
    A[idx, idx] -= potential_values(V, grid)
    return OperatorMatrix(matrix=A, grid=grid, scale=scale, potential=V, symbol_cap=symbol_cap)


@dataclass(frozen=True, eq=False)
class EigenReport:
    """Discrete eigenvalues below 2 - edge_margin, sorted ascending."""

    lambdas: np.ndarray
    points: tuple[SpectralPoint, ...]
    vectors: np.ndarray | None
    method: str
    edge_margin: float

    def __len__(self) -> int:
        return len(self.lambdas)


def eigens_below(op: OperatorMatrix, edge_margin: float = DEFAULT_EDGE_MARGIN) -> EigenReport:
    """All eigenpairs with lambda < 2 - edge_margin by a full symmetric solve."""
    if not edge_margin > 0:
        raise ParameterError(f"edge_margin must be positive, got {edge_margin!r}")
    try:
        w, vecs = scipy.linalg.eigh(op.matrix)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(
            f"symmetric eigensolve failed on a {op.grid.N}x{op.grid.N} matrix: {exc}"
        ) from exc
    sel = w < 2.0 - edge_margin
    lambdas = w[sel]
    points = tuple(core.spectral_point_from_lambda(float(lam)) for lam in lambdas)
    return EigenReport(
        lambdas=lambdas,
        points=points,
        vectors=vecs[:, sel],
        method="direct",
        edge_margin=edge_margin,
    )


def wv_lower_bound_certificate(op: OperatorMatrix, tol: float = 1e-9) -> tuple[bool, float]:
    """True iff the smallest eigenvalue is >= -2 - tol; the value comes along."""
    try:
        smallest = float(scipy.linalg.eigvalsh(op.matrix, subset_by_index=[0, 0])[0])
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"eigensolve failed while certifying W_V >= -2: {exc}") from exc
    return smallest >= -2.0 - tol, smallest


@dataclass(frozen=True, eq=False)
class BSMatrix:
    """Nystrom matrix of sqrt(V) G_lambda sqrt(V) on the support of V."""

    matrix: np.ndarray
    support: np.ndarray
    point: SpectralPoint
    grid: Grid
    scale: Scale
    potential: Potential

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def _kernel_matrix(kernel_1d, x: np.ndarray, sqrt_v: np.ndarray, h: float) -> np.ndarray:
    diffs = x[:, None] - x[None, :]
    K = kernel_1d(diffs) * (sqrt_v[:, None] * sqrt_v[None, :]) * h
    return 0.5 * (K + K.T)


def bs_matrix(V: Potential, grid: Grid, point: SpectralPoint, scale: Scale) -> BSMatrix:
    """Entries sqrt(V_i) G_lambda(x_i - x_j) sqrt(V_j) h on {i : V(x_i) > 0}.

    The kernel is even and analytic in x, so the x = 0 diagonal is the exact
    diagonal resolvent value.
    """
    v = potential_values(V, grid)
    support = np.flatnonzero(v > 0.0)
    if support.size == 0:
        K = np.zeros((0, 0))
    else:
        x = grid.x[support]
        K = _kernel_matrix(
            lambda d: core.resolvent_kernel(d, point, scale), x, np.sqrt(v[support]), grid.h
        )
    return BSMatrix(matrix=K, support=support, point=point, grid=grid, scale=scale, potential=V)


def bs_eigenvalues(K: BSMatrix, n: int | None = None) -> np.ndarray:
    """Largest eigenvalues of the Birman-Schwinger matrix, decreasing."""
    if K.size == 0:
        return np.zeros(0)
    try:
        mu = scipy.linalg.eigvalsh(K.matrix)[::-1]
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"eigensolve failed on a {K.size}x{K.size} kernel matrix: {exc}") from exc
    return mu if n is None else mu[:n]


# bracket expansion for bs_locate never doubles past this many times
_MAX_DOUBLINGS = 60
_EDGE_DELTA = 1e-9  # bisection approaches the edge up to omega = pi - _EDGE_DELTA


def bs_locate(
    V: Potential,
    grid: Grid,
    scale: Scale,
    n_max: int = 4,
    tol: float = 1e-10,
) -> EigenReport:
    """Locate eigenvalues of W_V(b) where mu_j(K_lambda) crosses 1.

    mu_j(K_lambda) is nondecreasing in lambda (exactly so for lambda in
    [-2, 2), where the kernel is a positive-density average of rank-one
    conjugates), so each crossing is found by bisection in theta = omega^2.
    The lower bracket expands by doubling its depth below the edge, at most
    60 times; j values whose curve never reaches 1 simply end the list.
    """
    if V.kind == DELTA:
        raise ParameterError("delta potentials use the closed-form path, not bs_locate")
    if V.integral() <= 0.0:
        raise ParameterError("bs_locate needs a nonzero potential")
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol!r}")

    theta_hi = (math.pi - _EDGE_DELTA) ** 2

    def mu_at(theta: float) -> np.ndarray:
        point = core.spectral_point_from_theta(theta)
        return bs_eigenvalues(bs_matrix(V, grid, point, scale))

    mu_edge = mu_at(theta_hi)
    found: list[float] = []
    for j in range(1, n_max + 1):
        if len(mu_edge) < j or mu_edge[j - 1] < 1.0:
            break
        lo = -1.0
        doublings = 0
        while mu_at(lo)[j - 1] >= 1.0:
            doublings += 1
            if doublings > _MAX_DOUBLINGS:
                raise NumericError(
                    f"no lower bracket for eigenvalue {j} after {_MAX_DOUBLINGS} doublings"
                )
            lo = PI_SQ - 2.0 * (PI_SQ - lo)
        hi = theta_hi
        lam_lo = core.lambda_from_theta(lo)
        lam_hi = core.lambda_from_theta(hi)
        while abs(lam_hi - lam_lo) > tol * max(1.0, abs(lam_lo)):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if mu_at(mid)[j - 1] >= 1.0:
                hi = mid
                lam_hi = core.lambda_from_theta(hi)
            else:
                lo = mid
                lam_lo = core.lambda_from_theta(lo)
        found.append(0.5 * (lo + hi))

    lambdas = np.array([core.lambda_from_theta(t) for t in found])
    points = tuple(core.spectral_point_from_theta(t) for t in found)
    vectors = _bs_vectors(V, grid, scale, points) if found else None
    return EigenReport(
        lambdas=lambdas,
        points=points,
        vectors=vectors,
        method="birman_schwinger",
        edge_margin=0.0,
    )


def _bs_vectors(V, grid, scale, points) -> np.ndarray:
    """Position-space eigenvectors psi = G_lambda sqrt(V) phi from the BS pairs."""
    v = potential_values(V, grid)
    support = np.flatnonzero(v > 0.0)
    sq = np.sqrt(v[support])
    xs = grid.x[support]
    out = np.empty((grid.N, len(points)))
    for col, point in enumerate(points):
        K = bs_matrix(V, grid, point, scale)
        w, phi = scipy.linalg.eigh(K.matrix)
        # the crossing eigenvector is the one with mu closest to 1
        phi_j = phi[:, int(np.argmin(np.abs(w - 1.0)))]
        G = core.resolvent_kernel(grid.x[:, None] - xs[None, :], point, scale)
        psi = grid.h * (G @ (sq * phi_j))
        psi /= np.linalg.norm(psi)
        if psi[int(np.argmax(np.abs(psi)))] < 0:
            psi = -psi
        out[:, col] = psi
    return out
