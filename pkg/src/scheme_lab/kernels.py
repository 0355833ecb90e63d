"""Cost kernels: joint laws of the two period costs on [0,1]^2 with uniform
marginals, exposed through the conditional law of the period-2 cost B given
the period-1 cost A = c.

Every operational formula in the model is conditional (decision margins,
scheme quadrature, sampling), so the conditional view is primary and joint
CDFs are derived.  Conditional laws may contain atoms: the CDF evaluators
are right-continuous and surpluses E[(t - B_c)+] treat atoms exactly.

Shipped kernels:

* ``IidKernel``              -- independent uniform costs.
* ``FgmKernel(theta)``       -- FGM dependence G(a,b) = ab(1 + theta(1-a)(1-b)).
* ``make_purely_sufficient_kernel(w)`` -- low period-1 types face high period-2
  cost with certainty, so nobody can afford both performances (needs w <= 1/2).
* ``make_purely_sustained_kernel(w)``  -- types below w face B = w - c exactly,
  so the two-period cost of performing twice is exactly the budget.
* ``GridDensityKernel``      -- piecewise-constant density on an N x N grid,
  renormalized to uniform marginals; loadable from a CSV matrix.
"""

from __future__ import annotations

import abc
import csv
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from ._rng import chunks, draw_uniforms
from .errors import DomainError, InfeasibilityError, KernelError, ParameterError

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(16)


class CostKernel(abc.ABC):
    """Conditional view of a joint cost law with uniform marginals."""

    kind: str = "abstract"
    #: budget the construction targets, when the kernel has one
    w: float | None = None

    @abc.abstractmethod
    def conditional_cdf(self, c, t: float):
        """P(B <= t | A = c); vectorized over c, right-continuous in t."""

    @abc.abstractmethod
    def conditional_surplus(self, c, t: float):
        """E[(t - B)+ | A = c]; vectorized over c."""

    @abc.abstractmethod
    def sample_conditional(self, c, u):
        """Conditional quantile transform of uniforms u given A = c."""

    def breakpoints(self, thresholds: Sequence[float] = ()) -> tuple[float, ...]:
        """Interior c at which the conditional evaluators may be non-smooth,
        given the reward thresholds they will be evaluated at."""
        return ()

    @property
    def description(self) -> str:
        return self.kind


# ---------------------------------------------------------------------------
# uniform building blocks
# ---------------------------------------------------------------------------


def _clamp01(t):
    return min(max(t, 0.0), 1.0)


def _uniform_interval_cdf(t: float, lo: float, hi: float) -> float:
    if t <= lo:
        return 0.0
    if t >= hi:
        return 1.0
    return (t - lo) / (hi - lo)


def _uniform_interval_surplus(t: float, lo: float, hi: float) -> float:
    """E[(t - U)+] for U uniform on (lo, hi]."""
    if t <= lo:
        return 0.0
    if t >= hi:
        return t - 0.5 * (lo + hi)
    return (t - lo) ** 2 / (2.0 * (hi - lo))


class IidKernel(CostKernel):
    """Independent uniform period costs."""

    kind = "iid"

    def conditional_cdf(self, c, t):
        return np.full_like(np.asarray(c, dtype=float), _clamp01(t))

    def conditional_surplus(self, c, t):
        s = 0.5 * t * t if t <= 1.0 else t - 0.5
        return np.full_like(np.asarray(c, dtype=float), s)

    def sample_conditional(self, c, u):
        return np.asarray(u, dtype=float)

    @property
    def description(self) -> str:
        return "independent uniform costs"


# ---------------------------------------------------------------------------
# FGM family
# ---------------------------------------------------------------------------


def _check_unit(name: str, v: float):
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {v}")


def _check_theta(theta: float):
    if not -1.0 <= theta <= 1.0:
        raise DomainError(f"dependence parameter must lie in [-1, 1], got {theta}")


def fgm_cdf(a: float, b: float, theta: float) -> float:
    """Joint CDF a*b*(1 + theta*(1-a)*(1-b)) on the unit square."""
    _check_unit("a", a)
    _check_unit("b", b)
    _check_theta(theta)
    return a * b * (1.0 + theta * (1.0 - a) * (1.0 - b))


def fgm_conditional_cdf(c: float, b: float, theta: float) -> float:
    """CDF of B given A = c: b + theta*(1 - 2c)*b*(1 - b)."""
    _check_unit("c", c)
    _check_unit("b", b)
    _check_theta(theta)
    return b + theta * (1.0 - 2.0 * c) * b * (1.0 - b)


def fgm_conditional_quantile(c: float, u: float, theta: float) -> float:
    """Exact inverse of :func:`fgm_conditional_cdf` in b.

    The conditional CDF is the quadratic m*b^2 - (1+m)*b + u = 0 with
    m = theta*(1 - 2c); the root in [0, 1] is returned in the cancellation-
    free form 2u / (1 + m + sqrt((1+m)^2 - 4mu)).
    """
    _check_unit("c", c)
    _check_unit("u", u)
    _check_theta(theta)
    m = theta * (1.0 - 2.0 * c)
    if abs(m) < 1e-14:
        return u
    if u == 0.0:
        return 0.0
    disc = (1.0 + m) ** 2 - 4.0 * m * u
    return 2.0 * u / (1.0 + m + np.sqrt(disc))


def fgm_conditional_mean(c: float, theta: float) -> float:
    """E[B | A = c] = 1/2 + (2c - 1)*theta/6."""
    _check_unit("c", c)
    _check_theta(theta)
    return 0.5 + (2.0 * c - 1.0) * theta / 6.0


class FgmKernel(CostKernel):
    """FGM dependence; theta in [-1, 1] tilts costs toward positive or
    negative association while both marginals stay uniform."""

    kind = "fgm"

    def __init__(self, theta: float):
        _check_theta(theta)
        self.theta = float(theta)

    def _m(self, c):
        return self.theta * (1.0 - 2.0 * np.asarray(c, dtype=float))

    def conditional_cdf(self, c, t):
        T = _clamp01(t)
        return T + self._m(c) * T * (1.0 - T)

    def conditional_surplus(self, c, t):
        if t <= 0.0:
            return np.zeros_like(np.asarray(c, dtype=float))
        T = min(t, 1.0)
        phi = 0.5 * t * t if t <= 1.0 else t - 0.5
        psi = 0.5 * T * T - T ** 3 / 3.0
        return phi + self._m(c) * psi

    def sample_conditional(self, c, u):
        u = np.asarray(u, dtype=float)
        m = self._m(c)
        disc = (1.0 + m) ** 2 - 4.0 * m * u
        den = 1.0 + m + np.sqrt(np.maximum(disc, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            b = np.where(np.abs(m) < 1e-14, u, 2.0 * u / den)
        return np.where(u == 0.0, 0.0, b)

    @property
    def description(self) -> str:
        return f"FGM dependence (theta={self.theta:g})"


# ---------------------------------------------------------------------------
# constructed kernels attaining the 2w performance bound
# ---------------------------------------------------------------------------


class PurelySufficientKernel(CostKernel):
    """Types below w never see an affordable period-2 cost and vice versa.

    For c in [0, w] the period-2 cost is uniform on (w, 1]; above w it is a
    mixture putting weight w/(1-w) on uniform [0, w].  Uniform marginals
    force w <= 1/2.
    """

    kind = "purely_sufficient"

    def __init__(self, w: float):
        if not 0.0 < w <= 0.5:
            raise InfeasibilityError(
                f"a purely sufficient kernel needs 0 < w <= 1/2 to keep the "
                f"period-2 marginal uniform, got w={w}"
            )
        self.w = float(w)
        self.mix_low = w / (1.0 - w)

    def conditional_cdf(self, c, t):
        c = np.asarray(c, dtype=float)
        high = _uniform_interval_cdf(t, self.w, 1.0)
        low = _uniform_interval_cdf(t, 0.0, self.w)
        mixed = self.mix_low * low + (1.0 - self.mix_low) * high
        return np.where(c <= self.w, high, mixed)

    def conditional_surplus(self, c, t):
        c = np.asarray(c, dtype=float)
        high = _uniform_interval_surplus(t, self.w, 1.0)
        low = _uniform_interval_surplus(t, 0.0, self.w)
        mixed = self.mix_low * low + (1.0 - self.mix_low) * high
        return np.where(c <= self.w, high, mixed)

    def sample_conditional(self, c, u):
        c = np.asarray(c, dtype=float)
        u = np.asarray(u, dtype=float)
        from_high = self.w + u * (1.0 - self.w)
        p = self.mix_low
        in_low = u < p
        with np.errstate(invalid="ignore", divide="ignore"):
            mixed = np.where(
                in_low,
                (u / p) * self.w,
                self.w + ((u - p) / (1.0 - p)) * (1.0 - self.w),
            )
        return np.where(c <= self.w, from_high, mixed)

    def breakpoints(self, thresholds: Sequence[float] = ()):
        return (self.w,)

    @property
    def description(self) -> str:
        return f"purely sufficient construction (w={self.w:g})"


class PurelySustainedKernel(CostKernel):
    """Types below w face the deterministic complement B = w - c, so a double
    performance costs exactly the budget; types above w stay above w."""

    kind = "purely_sustained"

    def __init__(self, w: float):
        if not 0.0 < w <= 1.0:
            raise DomainError(
                f"a purely sustained kernel needs 0 < w <= 1 (above-w tail "
                f"empty otherwise), got w={w}"
            )
        self.w = float(w)

    def conditional_cdf(self, c, t):
        c = np.asarray(c, dtype=float)
        atom = (t >= self.w - c).astype(float)
        if self.w == 1.0:
            return atom
        high = _uniform_interval_cdf(t, self.w, 1.0)
        return np.where(c <= self.w, atom, high)

    def conditional_surplus(self, c, t):
        c = np.asarray(c, dtype=float)
        atom = np.maximum(t - (self.w - c), 0.0)
        if self.w == 1.0:
            return atom
        high = _uniform_interval_surplus(t, self.w, 1.0)
        return np.where(c <= self.w, atom, high)

    def sample_conditional(self, c, u):
        c = np.asarray(c, dtype=float)
        u = np.asarray(u, dtype=float)
        if self.w == 1.0:
            return self.w - c
        high = self.w + u * (1.0 - self.w)
        return np.where(c <= self.w, self.w - c, high)

    def breakpoints(self, thresholds: Sequence[float] = ()):
        pts = {self.w}
        # the atom w - c crosses a reward threshold t at c = w - t
        for t in thresholds:
            pts.add(self.w - t)
        return tuple(p for p in sorted(pts) if 0.0 < p < 1.0)

    @property
    def description(self) -> str:
        return f"purely sustained construction (w={self.w:g})"


def make_purely_sufficient_kernel(w: float) -> PurelySufficientKernel:
    """Kernel under which the rule (w, w, 0) reaches the 2w bound."""
    return PurelySufficientKernel(w)


def make_purely_sustained_kernel(w: float) -> PurelySustainedKernel:
    """Kernel under which the rule (0, 0, w) reaches the 2w bound."""
    return PurelySustainedKernel(w)


# ---------------------------------------------------------------------------
# grid-density kernels
# ---------------------------------------------------------------------------


class GridDensityKernel(CostKernel):
    """Piecewise-constant joint density on an N x N grid of [0,1]^2.

    Cell masses are renormalized (iterative proportional fitting) so both
    marginals are uniform; the marginal check tolerance is relaxed to 1e-3
    for this family.
    """

    kind = "grid"

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ParameterError(f"grid density must be a square matrix, got {m.shape}")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ParameterError("grid density entries must be finite and non-negative")
        total = m.sum()
        if total <= 0:
            raise ParameterError("grid density has no mass")
        self.n = m.shape[0]
        self.mass = _fit_uniform_marginals(m / total)
        # conditional cell probabilities per row, with cumulative tables
        rows = self.mass.sum(axis=1, keepdims=True)
        self._q = self.mass / rows
        self._cum = np.concatenate(
            [np.zeros((self.n, 1)), np.cumsum(self._q, axis=1)], axis=1
        )
        self._cum[:, -1] = 1.0
        # integral of the conditional CDF up to each cell edge (exact for the
        # piecewise-linear CDF: cell integral = (cum_left + q/2) / N)
        cell_int = (self._cum[:, :-1] + 0.5 * self._q) / self.n
        self._cdf_int = np.concatenate(
            [np.zeros((self.n, 1)), np.cumsum(cell_int, axis=1)], axis=1
        )

    def _row(self, c):
        idx = np.minimum((np.asarray(c, dtype=float) * self.n).astype(int), self.n - 1)
        return idx

    def conditional_cdf(self, c, t):
        rows = self._row(c)
        if t <= 0.0:
            return np.zeros_like(rows, dtype=float)
        if t >= 1.0:
            return np.ones_like(rows, dtype=float)
        j = min(int(t * self.n), self.n - 1)
        frac = t * self.n - j
        return self._cum[rows, j] + self._q[rows, j] * frac

    def conditional_surplus(self, c, t):
        rows = self._row(c)
        if t <= 0.0:
            return np.zeros_like(rows, dtype=float)
        if t >= 1.0:
            return self._cdf_int[rows, self.n] + (t - 1.0)
        j = min(int(t * self.n), self.n - 1)
        frac = t - j / self.n
        return (
            self._cdf_int[rows, j]
            + self._cum[rows, j] * frac
            + 0.5 * self._q[rows, j] * self.n * frac * frac
        )

    def sample_conditional(self, c, u):
        rows = self._row(c)
        u = np.asarray(u, dtype=float)
        b = np.empty_like(u)
        for r in np.unique(rows):
            sel = rows == r
            j = np.searchsorted(self._cum[r], u[sel], side="left")
            j = np.clip(j - 1, 0, self.n - 1)
            q = self._q[r, j]
            with np.errstate(divide="ignore", invalid="ignore"):
                frac = np.where(q > 0, (u[sel] - self._cum[r, j]) / q, 0.0)
            b[sel] = (j + np.clip(frac, 0.0, 1.0)) / self.n
        return b

    def breakpoints(self, thresholds: Sequence[float] = ()):
        return tuple(i / self.n for i in range(1, self.n))

    def marginal_cdf_grid(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized integral over c of the conditional CDF (rows weighted
        1/N because the period-1 marginal is uniform by construction)."""
        out = np.empty_like(ts)
        for k, t in enumerate(ts):
            if t <= 0.0:
                out[k] = 0.0
            elif t >= 1.0:
                out[k] = 1.0
            else:
                j = min(int(t * self.n), self.n - 1)
                frac = t * self.n - j
                out[k] = float(np.mean(self._cum[:, j] + self._q[:, j] * frac))
        return out

    @property
    def description(self) -> str:
        return f"grid density ({self.n}x{self.n} cells)"


def _fit_uniform_marginals(mass: np.ndarray, tol: float = 1e-12,
                           max_iter: int = 500) -> np.ndarray:
    n = mass.shape[0]
    target = 1.0 / n
    m = mass.copy()
    for _ in range(max_iter):
        rows = m.sum(axis=1)
        if np.any(rows <= 0):
            raise ParameterError("grid density has an empty row; marginals cannot be uniform")
        m *= target / rows[:, None]
        cols = m.sum(axis=0)
        if np.any(cols <= 0):
            raise ParameterError("grid density has an empty column; marginals cannot be uniform")
        m *= target / cols[None, :]
        if max(np.abs(m.sum(axis=1) - target).max(),
               np.abs(m.sum(axis=0) - target).max()) < tol:
            break
    return m


def load_grid_kernel(path: str) -> GridDensityKernel:
    """Load an N x N non-negative matrix from CSV and build a grid kernel."""
    rows: list[list[float]] = []
    try:
        with open(path, newline="") as fh:
            for record in csv.reader(fh):
                if not record or all(not cell.strip() for cell in record):
                    continue
                rows.append([float(cell) for cell in record])
    except (OSError, ValueError) as exc:
        raise ParameterError(f"cannot read grid density CSV {path!r}: {exc}") from exc
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ParameterError(
            f"grid density CSV {path!r} must be a square numeric matrix"
        )
    kernel = GridDensityKernel(np.asarray(rows, dtype=float))
    dev = marginal_deviation(kernel)
    if dev > 1e-3:
        raise KernelError(
            f"grid density from {path!r} deviates from uniform marginals by {dev:.2e}"
        )
    return kernel


# ---------------------------------------------------------------------------
# verification helpers
# ---------------------------------------------------------------------------


def marginal_deviation(kernel: CostKernel, grid_points: int = 1001) -> float:
    """Sup over a grid of |integral_0^1 G_c(t) dc - t|.

    Recovers the period-2 marginal from the conditional CDFs and compares it
    to the uniform CDF.  Integration over c is exact per smooth piece
    (Gauss-Legendre; the shipped integrands are piecewise polynomial in c).
    """
    ts = np.linspace(0.0, 1.0, grid_points)
    hook = getattr(kernel, "marginal_cdf_grid", None)
    if hook is not None:
        return float(np.abs(hook(ts) - ts).max())
    worst = 0.0
    for t in ts:
        pts = sorted({0.0, 1.0, *(p for p in kernel.breakpoints((t,)) if 0.0 < p < 1.0)})
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            nodes = 0.5 * (b - a) * _GAUSS_NODES + 0.5 * (a + b)
            vals = np.asarray(kernel.conditional_cdf(nodes, float(t)), dtype=float)
            total += 0.5 * (b - a) * float(_GAUSS_WEIGHTS @ vals)
        worst = max(worst, abs(total - t))
    return worst


def dependence_summary(kernel: CostKernel, n: int, seed: int) -> dict[str, float]:
    """Monte Carlo dependence diagnostics.

    Spearman rank correlation of (A, B), plus the Pearson correlation
    restricted to draws with A <= w (w taken from the kernel when defined,
    else 1).
    """
    if n < 10_000:
        raise ParameterError(f"dependence summary needs n >= 10^4 samples, got {n}")
    a, b = sample_pairs(kernel, n, seed)
    w_eff = kernel.w if kernel.w is not None else 1.0
    sel = a <= w_eff
    if sel.sum() >= 2:
        pearson = float(np.corrcoef(a[sel], b[sel])[0, 1])
    else:
        pearson = float("nan")
    spearman = float(stats.spearmanr(a, b).statistic)
    return {"spearman": spearman, "pearson_conditional_below_w": pearson}


def sample_pairs(kernel: CostKernel, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """n cost pairs from the kernel under the keyed uniform stream."""
    a = np.empty(n)
    b = np.empty(n)
    for start, count in chunks(n):
        u = draw_uniforms(seed, start, count)
        a[start:start + count] = u[:, 0]
        b[start:start + count] = kernel.sample_conditional(u[:, 0], u[:, 1])
    return a, b
