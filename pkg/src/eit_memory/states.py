"""Photon-number density matrices and temporal envelopes of a single pulsed mode.

Time is measured in units of the bare-cavity decay time 1/gamma, and
envelopes are scaled so that a normalized pulse has ``int |h|^2 dt = 1``.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import CutoffError, NormalizationError, TruncationError
from .grid import TimeGrid, as_grid, trapezoid

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_SLACK = 1e-12
# eigensolves above this size are skipped in the constructor; call validate()
PSD_CHECK_MAX_DIM = 400
SQUEEZE_TAIL_TOL = 1e-6


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PulseEnvelope:
    """Complex temporal mode function ``h(t_i)`` sampled on a uniform grid."""

    grid: TimeGrid
    samples: np.ndarray

    def __post_init__(self):
        grid = as_grid(self.grid)
        samples = _frozen(self.samples)
        if samples.ndim != 1 or samples.size != grid.count:
            raise ValueError(f"expected {grid.count} samples, got shape {samples.shape}")
        if grid.count < 8:
            raise ValueError("an envelope needs at least 8 samples")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_function(cls, func, grid):
        grid = as_grid(grid)
        return cls(grid, func(grid.times))

    @property
    def times(self):
        return self.grid.times

    @property
    def intensity(self):
        return np.abs(self.samples) ** 2

    def norm(self):
        """Trapezoid estimate of ``int |h|^2 dt``."""
        return float(trapezoid(self.intensity, self.grid.dt))

    def is_normalized(self, tol=NORM_TOL):
        return abs(self.norm() - 1.0) <= tol

    def require_normalized(self, tol=NORM_TOL):
        if not self.is_normalized(tol):
            raise NormalizationError(f"envelope norm is {self.norm():.12g}, expected 1")

    def is_zero(self):
        return not np.any(self.samples)

    def normalized(self):
        n = self.norm()
        if n == 0:
            raise NormalizationError("cannot normalize an all-zero envelope")
        return PulseEnvelope(self.grid, self.samples / math.sqrt(n))

    def scaled(self, factor):
        return PulseEnvelope(self.grid, self.samples * factor)

    def mirrored(self, t_mirror):
        """The envelope ``t -> h(2*t_mirror - t)``."""
        return PulseEnvelope(self.grid.reversed_about(t_mirror), self.samples[::-1])

    def overlap(self, other):
        """``int conj(h) g dt`` on a shared grid."""
        self.grid.require_same(other.grid, "envelopes")
        return complex(trapezoid(np.conj(self.samples) * other.samples, self.grid.dt))

    def to_csv(self, path):
        write_columns(path, {"t": self.times, "re": self.samples.real, "im": self.samples.imag})

    @classmethod
    def from_csv(cls, path):
        cols = read_columns(path)
        if list(cols) != ["t", "re", "im"]:
            raise ValueError(f"{path}: expected header t,re,im, got {','.join(cols)}")
        grid = grid_from_times(cols["t"])
        return cls(grid, cols["re"] + 1j * cols["im"])


def grid_from_times(t, rtol=1e-9):
    """Recover a ``TimeGrid`` from a column of times, insisting on uniform spacing."""
    t = np.asarray(t, dtype=float)
    if t.size < 2:
        raise ValueError("need at least two time samples")
    steps = np.diff(t)
    dt = (t[-1] - t[0]) / (t.size - 1)
    if dt <= 0 or np.max(np.abs(steps - dt)) > rtol * max(abs(t[0]), abs(t[-1]), 1.0) + 1e-12:
        raise ValueError("time column is not uniformly spaced")
    return TimeGrid(t[0], dt, t.size)


def write_columns(path, columns):
    """Write equal-length numeric columns as CSV with round-trip precision.

    ``None`` or NaN entries are written as empty cells.
    """
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*data):
            w.writerow(["" if (v is None or (isinstance(v, float) and math.isnan(v)))
                        else repr(float(v)) for v in row])


def read_columns(path):
    """Read a numeric CSV written by ``write_columns``; empty cells become NaN."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    cols = {name: np.empty(len(body)) for name in header}
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise ValueError(f"{path}: row {i + 2} has {len(row)} fields, expected {len(header)}")
        for name, cell in zip(header, row):
            cols[name][i] = float(cell) if cell.strip() else np.nan
    return cols


def make_sech_envelope(width, center, grid, tol=1e-6):
    """Hyperbolic-secant pulse ``sech((t - center)/width) / sqrt(2*width)``.

    The analytic form integrates to one over the real line; the sampled
    version is returned as is (not renormalized) so that a grid that cuts
    the tails is reported instead of silently hidden.

    Raises
    ------
    TruncationError
        If the trapezoid norm on ``grid`` differs from 1 by more than ``tol``.
    """
    if width <= 0:
        raise ValueError("sech width must be positive")
    grid = as_grid(grid)
    x = (grid.times - center) / width
    h = PulseEnvelope(grid, 1.0 / np.cosh(x) / math.sqrt(2.0 * width))
    err = abs(h.norm() - 1.0)
    if err > tol:
        raise TruncationError(
            f"sech pulse (width {width}, center {center}) is cut by the grid "
            f"[{grid.t0}, {grid.t_end}]: norm deficit {err:.3g} > {tol:g}; "
            f"span at least center +/- {8 * width:g}")
    return h


def make_gaussian_envelope(sigma, center, grid, normalize=True):
    """Gaussian pulse whose intensity ``|h|^2`` is a normal density of std ``sigma``."""
    grid = as_grid(grid)
    t = grid.times
    h = np.exp(-((t - center) ** 2) / (4.0 * sigma**2)) / (2.0 * math.pi * sigma**2) ** 0.25
    env = PulseEnvelope(grid, h)
    return env.normalized() if normalize else env


@dataclass(frozen=True, eq=False)
class FockStateMatrix:
    """Density matrix in the photon-number basis ``|0>, ..., |dim-1>``.

    Two-mode states use the same class with ``dim = d*d`` and the ordering
    ``|n> (x) |m> -> n*d + m``. Traces below one are allowed because pure-loss
    channels without population recycling remove probability.
    """

    rho: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        object.__setattr__(self, "rho", rho)
        self._check_cheap()
        if self.dim <= PSD_CHECK_MAX_DIM:
            self._check_psd()

    def _check_cheap(self):
        herm = np.max(np.abs(self.rho - self.rho.conj().T))
        if herm > HERMITIAN_TOL:
            raise ValueError(f"density matrix is not Hermitian (max deviation {herm:.3g})")
        tr = self.trace
        if tr < -TRACE_SLACK or tr > 1.0 + TRACE_SLACK:
            raise ValueError(f"trace {tr:.15g} outside [0, 1]")

    def _check_psd(self):
        lam = np.linalg.eigvalsh(self.rho)[0]
        if lam < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lam:.3g}")

    def validate(self):
        self._check_cheap()
        self._check_psd()
        return self

    @classmethod
    def from_ket(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    @property
    def dim(self):
        return self.rho.shape[0]

    @property
    def trace(self):
        return float(np.trace(self.rho).real)

    @property
    def purity(self):
        return float(np.real(np.vdot(self.rho, self.rho)))

    @property
    def populations(self):
        return np.real(np.diag(self.rho)).copy()

    def mean_photon_number(self):
        return float(np.dot(np.arange(self.dim), self.populations))


def make_fock(n, dim):
    """Number state ``|n><n|`` with cutoff ``dim``."""
    if not 0 <= n < dim:
        raise CutoffError(f"photon number {n} needs cutoff > {n}, got dim={dim}",
                          required_dim=n + 1)
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n, n] = 1.0
    return FockStateMatrix(rho)


def squeezed_vacuum_amplitudes(r, dim):
    """Untruncated-normalization amplitudes ``<n|S(r)|0>`` for ``n < dim``.

    Convention ``S(r) = exp(r/2 (a^2 - a^dag^2))`` so that
    ``<2m|S|0> = (-tanh r)^m sqrt((2m)!) / (2^m m! sqrt(cosh r))``.
    """
    c = np.zeros(dim, dtype=float)
    m = np.arange((dim + 1) // 2)
    # log of sqrt((2m)!) / (2^m m!)
    log_mag = 0.5 * gammaln(2 * m + 1) - m * math.log(2.0) - gammaln(m + 1)
    th = math.tanh(r)
    log_pow = np.zeros(m.size)
    log_pow[1:] = m[1:] * math.log(th) if th > 0 else -np.inf
    mag = np.exp(log_mag + log_pow) / math.sqrt(math.cosh(r))
    c[0::2] = mag * np.where(m % 2 == 0, 1.0, -1.0)
    return c


def _squeeze_tail(r, dim):
    return max(0.0, 1.0 - float(np.sum(squeezed_vacuum_amplitudes(r, dim) ** 2)))


def squeezing_for_mean_photons(nbar):
    """Squeeze parameter with ``sinh(r)^2 = nbar``."""
    return math.asinh(math.sqrt(nbar))


def make_squeezed_vacuum(r, dim, tol=SQUEEZE_TAIL_TOL):
    """Squeezed vacuum truncated at ``dim`` photons and renormalized.

    Raises
    ------
    CutoffError
        If the probability beyond the cutoff exceeds ``tol``; the error's
        ``required_dim`` is the smallest cutoff that would pass.
    """
    if r < 0:
        raise ValueError("squeeze parameter must be non-negative")
    deficit = _squeeze_tail(r, dim)
    if deficit > tol:
        need = dim
        while _squeeze_tail(r, need) > tol:
            need += 2
        raise CutoffError(
            f"squeezed vacuum r={r} loses {deficit:.3g} beyond dim={dim}; needs dim >= {need}",
            required_dim=need)
    psi = squeezed_vacuum_amplitudes(r, dim)
    psi /= np.linalg.norm(psi)
    return FockStateMatrix.from_ket(psi)


def make_coherent(alpha, dim, tol=SQUEEZE_TAIL_TOL):
    """Coherent state, truncated and renormalized (same tail rule as squeezing)."""
    n = np.arange(dim)
    amp = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * gammaln(n + 1)) * np.power(complex(alpha), n)
    deficit = 1.0 - float(np.sum(np.abs(amp) ** 2))
    if deficit > tol:
        raise CutoffError(f"coherent state |alpha|={abs(alpha)} loses {deficit:.3g} beyond dim={dim}")
    return FockStateMatrix.from_ket(amp / np.linalg.norm(amp))


def state_fidelity(a, b):
    """Overlap ``Re Tr(a b)``, the memory figure of merit used throughout."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    # Tr(AB) = sum_ij A_ij B_ji
    return float(np.real(np.sum(a.rho * b.rho.T)))
