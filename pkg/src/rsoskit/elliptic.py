"""Odd Jacobi theta function, the normalized bracket, and the elliptic
dynamical R-matrix with its special values at z = +-1.

theta(z, tau) = -sum_m exp(i*pi*(m+1/2)^2*tau + 2*pi*i*(m+1/2)*(z+1/2))

[z] = theta(gamma*z, tau) / (gamma * theta'(0, tau)) has derivative 1 at 0
and first-order zeros exactly on Lambda = Z/gamma + Z*tau/gamma.

The R-matrix acts on C^n (x) C^n in the row-major basis e_i (x) e_j:

    R(z,a) = sum_i E_ii (x) E_ii
           - sum_{i!=j} [a_i-a_j+1][z] / ([a_i-a_j][1-z]) E_ij (x) E_ji
           + sum_{i!=j} [a_i-a_j+z][1] / ([a_i-a_j][1-z]) E_ii (x) E_jj.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidTau, NearPole
from .groupoid import WeightPoint, eps

_TAIL_LOG10 = 17.0  # discard terms below 1e-17 relative


def _truncation(z: complex, tau: complex) -> int:
    t = tau.imag
    y = abs(complex(z).imag)
    n = y / t + math.sqrt(_TAIL_LOG10 * math.log(10.0) / (math.pi * t))
    return max(12, int(math.ceil(n)) + 1)


def theta(z: complex, tau: complex, truncation: int | None = None) -> complex:
    """Odd Jacobi theta function, truncated so the tail is below 1e-16 relative."""
    if complex(tau).imag <= 0:
        raise InvalidTau(f"Im tau must be positive, got {tau}")
    N = truncation if truncation is not None else _truncation(z, tau)
    m = np.arange(-N, N + 1)
    half = m + 0.5
    expo = 1j * math.pi * half * half * tau + 2j * math.pi * half * (z + 0.5)
    return complex(-np.exp(expo).sum())


@lru_cache(maxsize=64)
def theta_dz0(tau: complex, truncation: int | None = None) -> complex:
    """theta'(0, tau) from the term-wise differentiated series."""
    if complex(tau).imag <= 0:
        raise InvalidTau(f"Im tau must be positive, got {tau}")
    N = truncation if truncation is not None else _truncation(0.0, tau)
    m = np.arange(-N, N + 1)
    half = m + 0.5
    expo = 1j * math.pi * half * half * tau + 1j * math.pi * half
    return complex(-(2j * math.pi * half * np.exp(expo)).sum())


@dataclass(frozen=True)
class EllipticParams:
    """Fixed modular data: tau in the upper half plane, gamma off Z + tau*Z.

    For the restricted model gamma = 1/r with integer level r > n.
    truncation overrides the automatic series cut; pole_guard is the
    smallest bracket modulus accepted in denominators.
    """

    tau: complex
    gamma: complex
    rank: int
    truncation: int | None = None
    pole_guard: float = 1e-8

    def __post_init__(self):
        if complex(self.tau).imag <= 0:
            raise InvalidTau(f"Im tau must be positive, got {self.tau}")
        if self.rank < 2:
            raise ValueError("rank must be >= 2")
        # gamma on the theta zero lattice Z + tau*Z makes every bracket vanish
        scale = abs(theta_dz0(self.tau, self.truncation))
        if abs(theta(self.gamma, self.tau, self.truncation)) < 1e-10 * scale:
            raise ValueError(f"gamma={self.gamma} lies on Z + tau*Z")

    @classmethod
    def rsos(cls, rank: int, r: int, tau: complex,
             truncation: int | None = None) -> "EllipticParams":
        if r <= rank:
            raise ValueError(f"restricted level must exceed the rank, got r={r}")
        return cls(tau=tau, gamma=1.0 / r, rank=rank, truncation=truncation)

    def bracket(self, z: complex) -> complex:
        return bracket(z, self)


def bracket(z: complex, params: EllipticParams) -> complex:
    """[z] = theta(gamma*z, tau)/(gamma*theta'(0, tau))."""
    num = theta(params.gamma * z, params.tau, params.truncation)
    return num / (params.gamma * theta_dz0(params.tau, params.truncation))


def _guarded(value: complex, params: EllipticParams, what: str) -> complex:
    if abs(value) < params.pole_guard:
        raise NearPole(f"denominator {what} has modulus {abs(value):.2e}")
    return value


@dataclass(frozen=True)
class FlatR:
    """R-matrix value on C^n (x) C^n at spectral parameter z and point a."""

    z: complex
    a: WeightPoint
    matrix: np.ndarray

    def __post_init__(self):
        n2 = self.matrix.shape[0]
        if self.matrix.shape != (n2, n2):
            raise ValueError("R-matrix block must be square")

    @property
    def rank(self) -> int:
        return int(round(math.isqrt(self.matrix.shape[0])))

    def entry(self, out_pair: tuple[int, int], in_pair: tuple[int, int]) -> complex:
        """Matrix element <e_i (x) e_j | R | e_k (x) e_l> with 1-based indices."""
        n = self.rank
        (i, j), (k, l) = out_pair, in_pair
        return complex(self.matrix[(i - 1) * n + (j - 1), (k - 1) * n + (l - 1)])


def r_matrix(z: complex, a: WeightPoint, params: EllipticParams) -> FlatR:
    """The elliptic dynamical R-matrix at (z, a)."""
    n = params.rank
    if a.rank != n:
        raise ValueError("point rank does not match params")
    br = lambda w: bracket(w, params)
    den_z = _guarded(br(1 - z), params, "[1-z]")
    one = br(1)
    m = np.zeros((n * n, n * n), dtype=complex)
    for i in range(1, n + 1):
        m[(i - 1) * n + (i - 1), (i - 1) * n + (i - 1)] = 1.0
    bz = br(z)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            d = a.diff(i, j)
            den = _guarded(br(d), params, f"[a_{i}-a_{j}]")
            row = (i - 1) * n + (j - 1)
            m[row, (j - 1) * n + (i - 1)] = -br(d + 1) * bz / (den * den_z)
            m[row, row] = br(d + z) * one / (den * den_z)
    return FlatR(z=z, a=a, matrix=m)


def r_reg1(a: WeightPoint, params: EllipticParams) -> FlatR:
    """Residue of the R-matrix at its pole z = 1.

    Closed form sum_{i!=j} [a_i-a_j+1][1]/[a_i-a_j] (E_ij(x)E_ji - E_ii(x)E_jj).
    """
    n = params.rank
    br = lambda w: bracket(w, params)
    one = br(1)
    m = np.zeros((n * n, n * n), dtype=complex)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            d = a.diff(i, j)
            den = _guarded(br(d), params, f"[a_{i}-a_{j}]")
            c = br(d + 1) * one / den
            row = (i - 1) * n + (j - 1)
            m[row, (j - 1) * n + (i - 1)] += c
            m[row, row] -= c
    return FlatR(z=1.0, a=a, matrix=m)


def r_minus1(a: WeightPoint, params: EllipticParams) -> FlatR:
    """The R-matrix at z = -1, where it degenerates (closed form).

    Equals r_matrix(-1, a) wherever the latter is defined: identity on the
    diagonal sectors e_i (x) e_i and
    [a_i-a_j+1][1]/([a_i-a_j][2]) (E_ij(x)E_ji) + [a_i-a_j-1][1]/([a_i-a_j][2]) (E_ii(x)E_jj)
    off the diagonal.
    """
    n = params.rank
    br = lambda w: bracket(w, params)
    one = br(1)
    two = _guarded(br(2), params, "[2]")
    m = np.zeros((n * n, n * n), dtype=complex)
    for i in range(1, n + 1):
        m[(i - 1) * n + (i - 1), (i - 1) * n + (i - 1)] = 1.0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            d = a.diff(i, j)
            den = _guarded(br(d), params, f"[a_{i}-a_{j}]")
            row = (i - 1) * n + (j - 1)
            m[row, (j - 1) * n + (i - 1)] = br(d + 1) * one / (den * two)
            m[row, row] = br(d - 1) * one / (den * two)
    return FlatR(z=-1.0, a=a, matrix=m)


def _dynamical_23(z: complex, a: WeightPoint, params: EllipticParams) -> np.ndarray:
    """R^(23)(z, a + h^(1)): the first factor's weight shifts the argument."""
    n = params.rank
    blocks = np.zeros((n ** 3, n ** 3), dtype=complex)
    for i in range(1, n + 1):
        ri = r_matrix(z, a + eps(n, i), params).matrix
        sl = slice((i - 1) * n * n, i * n * n)
        blocks[sl, sl] = ri
    return blocks


def dynamical_ybe_residual(z: complex, w: complex, a: WeightPoint,
                           params: EllipticParams) -> float:
    """Max-norm residual of the dynamical Yang-Baxter equation at (z, w, a).

    R^(23)(z-w, a+h^(1)) R^(12)(z, a) R^(23)(w, a+h^(1))
      = R^(12)(w, a) R^(23)(z, a+h^(1)) R^(12)(z-w, a).
    """
    n = params.rank
    eye = np.eye(n)
    r12 = lambda u: np.kron(r_matrix(u, a, params).matrix, eye)
    r23 = lambda u: _dynamical_23(u, a, params)
    lhs = r23(z - w) @ r12(z) @ r23(w)
    rhs = r12(w) @ r23(z) @ r12(z - w)
    return float(np.abs(lhs - rhs).max())


def unitarity_residual(z: complex, a: WeightPoint, params: EllipticParams) -> float:
    """Max-norm residual of R(z,a) R(-z,a) = Id."""
    m = r_matrix(z, a, params).matrix @ r_matrix(-z, a, params).matrix
    return float(np.abs(m - np.eye(m.shape[0])).max())


def residue_extrapolation(a: WeightPoint, params: EllipticParams,
                          steps=(1e-4, 1e-5, 1e-6)) -> np.ndarray:
    """Numerical residue of the R-matrix at z=1 by Richardson extrapolation
    of eps * R(1 + eps, a); independent oracle for r_reg1."""
    samples = [s * r_matrix(1.0 + s, a, params).matrix for s in steps]
    # Neville extrapolation to eps = 0 through the three sample points
    xs = list(steps)
    table = list(samples)
    for level in range(1, len(xs)):
        nxt = []
        for k in range(len(table) - 1):
            x0, x1 = xs[k], xs[k + level]
            nxt.append((x0 * table[k + 1] - x1 * table[k]) / (x0 - x1))
        table = nxt
    return table[0]
