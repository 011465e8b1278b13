"""Exact Gaussian-state algebra for quadrature fluctuations.

States are described by a mean quadrature vector and a covariance matrix
in the ordering (X1, Y1, X2, Y2, ...), with the vacuum variance of every
quadrature normalized to 1.  Under this normalization the shot-noise
limit for any two-mode sum or difference is 2, and all dB figures reduce
to dimensionless ratios against the matching vacuum reference.

All operations are pure: values are validated and frozen on construction
and can be shared freely across threads.
"""

from dataclasses import dataclass

import numpy as np

# algebraic identities hold to 1e-10, physicality to 1e-9; both sit well
# above double-precision accumulation noise for the matrix sizes used here
SYMPLECTIC_TOL = 1e-10
PHYSICALITY_TOL = 1e-9

_OMEGA_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n_modes: int) -> np.ndarray:
    """Skew form Omega for the (X1, Y1, ...) ordering."""
    return np.kron(np.eye(n_modes), _OMEGA_BLOCK)


def _frozen_array(values, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if shape is not None and arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of ``n_modes`` optical modes.

    Attributes:
        mean: length-2n vector (X1, Y1, ..., Xn, Yn) of mean quadrature
            amplitudes (used here for classical tone amplitudes).
        cov: 2n x 2n covariance matrix, vacuum variance 1 per quadrature.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _frozen_array(self.mean)
        if mean.ndim != 1 or mean.size % 2:
            raise ValueError("mean must be a vector of even length")
        cov = _frozen_array(self.cov, shape=(mean.size, mean.size))
        scale = max(np.abs(cov).max(), 1.0)
        if np.abs(cov - cov.T).max() > SYMPLECTIC_TOL * scale:
            raise ValueError("covariance matrix is not symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        nu_min = symplectic_eigenvalues(cov).min()
        if nu_min < 1.0 - PHYSICALITY_TOL:
            raise ValueError(
                f"unphysical covariance: smallest symplectic eigenvalue {nu_min!r} < 1"
            )

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2


@dataclass(frozen=True)
class SymplecticTransform:
    """Linear-optics or squeezing operation S with S Omega S^T = Omega."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_array(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError("symplectic matrix must be square with even dimension")
        omega = symplectic_form(m.shape[0] // 2)
        defect = np.abs(m @ omega @ m.T - omega).max()
        if defect > SYMPLECTIC_TOL:
            raise ValueError(f"matrix is not symplectic (defect {defect:.3e})")
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def __matmul__(self, other: "SymplecticTransform") -> "SymplecticTransform":
        return SymplecticTransform(self.matrix @ other.matrix)


@dataclass(frozen=True)
class LossChannel:
    """Pure loss of transmissivity eta on one mode (vacuum mixed in)."""

    mode_index: int
    transmissivity: float

    def __post_init__(self):
        if not 0.0 <= self.transmissivity <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {self.transmissivity}")
        if self.mode_index < 0:
            raise ValueError("mode_index must be nonnegative")


def vacuum_state(n_modes: int) -> GaussianState:
    return GaussianState(np.zeros(2 * n_modes), np.eye(2 * n_modes))


def two_mode_squeezer(r: float, mode: str = "deamplify") -> SymplecticTransform:
    """Two-mode squeezing of strength ``r`` on a mode pair.

    In ``deamplify`` mode the sum of amplitude quadratures and the
    difference of phase quadratures are squeezed: acting on vacuum,
    Var(X1+X2) = Var(Y1-Y2) = 2 exp(-2r) while the conjugate
    combinations are antisqueezed to 2 exp(+2r).  ``amplify`` swaps the
    squeezed and antisqueezed combinations.
    """
    if not np.isfinite(r) or r < 0:
        raise ValueError(f"squeezing parameter must be finite and nonnegative, got {r}")
    if mode not in ("amplify", "deamplify"):
        raise ValueError(f"mode must be 'amplify' or 'deamplify', got {mode!r}")
    ch, sh = np.cosh(r), np.sinh(r)
    sign = -1.0 if mode == "deamplify" else 1.0
    m = np.array(
        [
            [ch, 0.0, sign * sh, 0.0],
            [0.0, ch, 0.0, -sign * sh],
            [sign * sh, 0.0, ch, 0.0],
            [0.0, -sign * sh, 0.0, ch],
        ]
    )
    return SymplecticTransform(m)


def beamsplitter(transmissivity: float, modes=(0, 1), n_modes: int | None = None) -> SymplecticTransform:
    """Beamsplitter of power transmissivity T mixing two modes.

    Convention: out_i = sqrt(T) in_i + sqrt(1-T) in_j and
    out_j = -sqrt(1-T) in_i + sqrt(T) in_j, identical on X and Y.
    """
    if not 0.0 <= transmissivity <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {transmissivity}")
    i, j = modes
    if i == j or i < 0 or j < 0:
        raise ValueError(f"beamsplitter needs two distinct modes, got {modes}")
    n = max(i, j) + 1 if n_modes is None else n_modes
    if n <= max(i, j):
        raise ValueError("n_modes too small for the given mode pair")
    t = np.sqrt(transmissivity)
    u = np.sqrt(1.0 - transmissivity)
    m = np.eye(2 * n)
    for q in range(2):  # same 2x2 mixing on X and on Y
        a, b = 2 * i + q, 2 * j + q
        m[a, a] = t
        m[a, b] = u
        m[b, a] = -u
        m[b, b] = t
    return SymplecticTransform(m)


def phase_shift(theta: float, mode: int = 0, n_modes: int | None = None) -> SymplecticTransform:
    """Rotation of one mode's quadratures by ``theta``.

    theta = pi/2 maps X -> -Y and Y -> X (counterclockwise in the
    (X, Y) plane); this convention is used throughout the package.
    """
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    if mode < 0:
        raise ValueError("mode must be nonnegative")
    n = mode + 1 if n_modes is None else n_modes
    if n <= mode:
        raise ValueError("n_modes too small for the given mode")
    c, s = np.cos(theta), np.sin(theta)
    m = np.eye(2 * n)
    a = 2 * mode
    m[a, a] = c
    m[a, a + 1] = -s
    m[a + 1, a] = s
    m[a + 1, a + 1] = c
    return SymplecticTransform(m)


def apply_symplectic(state: GaussianState, transform: SymplecticTransform) -> GaussianState:
    if transform.n_modes != state.n_modes:
        raise ValueError(
            f"dimension mismatch: transform acts on {transform.n_modes} modes, "
            f"state has {state.n_modes}"
        )
    s = transform.matrix
    return GaussianState(s @ state.mean, s @ state.cov @ s.T)


def apply_loss(state: GaussianState, channel: LossChannel) -> GaussianState:
    """Mix vacuum into one mode with power transmissivity eta.

    The affected mean scales by sqrt(eta), the mode's covariance block
    becomes eta * block + (1 - eta) * I and cross blocks scale by
    sqrt(eta).
    """
    if channel.mode_index >= state.n_modes:
        raise ValueError(f"mode {channel.mode_index} out of range for {state.n_modes} modes")
    eta = channel.transmissivity
    n2 = 2 * state.n_modes
    g = np.ones(n2)
    g[2 * channel.mode_index : 2 * channel.mode_index + 2] = np.sqrt(eta)
    add = np.zeros(n2)
    add[2 * channel.mode_index : 2 * channel.mode_index + 2] = 1.0 - eta
    cov = state.cov * np.outer(g, g) + np.diag(add)
    return GaussianState(state.mean * g, cov)


def displace(state: GaussianState, mode: int, dx: float, dy: float) -> GaussianState:
    """Shift one mode's mean by (dx, dy); the covariance is unchanged."""
    if not 0 <= mode < state.n_modes:
        raise ValueError(f"mode {mode} out of range for {state.n_modes} modes")
    mean = state.mean.copy()
    mean[2 * mode] += dx
    mean[2 * mode + 1] += dy
    return GaussianState(mean, state.cov)


def combo_variance(state: GaussianState, coeffs) -> float:
    """Variance c^T cov c of the quadrature combination c.

    Used for the sum/difference correlation variances such as
    Var(X1+X2) with c = (1, 0, 1, 0).
    """
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (2 * state.n_modes,):
        raise ValueError(f"coefficient vector must have length {2 * state.n_modes}")
    return float(c @ state.cov @ c)


def symplectic_eigenvalues(cov) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, descending.

    Returns the n moduli of the eigenvalues of i Omega cov; all values
    are >= 1 exactly when the state is physical.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
        raise ValueError("covariance must be square with even dimension")
    scale = max(np.abs(cov).max(), 1.0)
    if np.abs(cov - cov.T).max() > SYMPLECTIC_TOL * scale:
        raise ValueError("covariance matrix is not symmetric")
    omega = symplectic_form(cov.shape[0] // 2)
    eigs = np.abs(np.linalg.eigvals(1j * omega @ cov))
    return np.sort(eigs)[::-1][::2]  # eigenvalues come in +/- pairs


def two_mode_squeezed_state(r: float, mode: str = "deamplify") -> GaussianState:
    """Vacuum driven through a two-mode squeezer."""
    return apply_symplectic(vacuum_state(2), two_mode_squeezer(r, mode))
