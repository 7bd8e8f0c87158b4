"""Deterministic machinery for orthogonal polynomials on the unit circle.

A probability measure supported at n points of the circle is encoded by its
monic orthogonal polynomials Phi_0, ..., Phi_n, whose recursion is driven by
n coefficients: alpha_0, ..., alpha_{n-2} in the open unit disk and
alpha_{n-1} on the circle.  This module provides

* the one-step polynomial recursion and its reversed-conjugate companion,
* the bijection between the plain coefficients (alpha_k) and the deformed
  coefficients (gamma_k), which share the same moduli but multiply out the
  characteristic polynomial at 1,
* the coefficient functions z -> gamma_k(z) that factor Phi_k pointwise,
* extraction of coefficients from a discrete measure (monic Gram-Schmidt),
  and the Caratheodory/Schur transforms of a measure.

Everything here is pure and deterministic; randomness lives in `sampling`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import tolerances as tol
from .errors import (
    DegenerateCoefficientError,
    InvariantError,
    NumericDegeneracyError,
    ParameterError,
    PoleError,
)

__all__ = [
    "EnsembleParams",
    "VerblunskyCoeffs",
    "DeformedCoeffs",
    "SpectralMeasure",
    "MonicPolyPair",
    "szego_step",
    "szego_polynomials",
    "gamma_from_alpha",
    "alpha_from_gamma",
    "gamma_functions_at",
    "char_poly_at_one",
    "verblunsky_from_measure",
    "caratheodory_schur",
    "coeffs_to_pairs",
    "coeffs_from_pairs",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class EnsembleParams:
    """Ensemble size n, inverse temperature beta > 0 and tilt exponent delta.

    The tilt rewheights the eigenvalue law by |det(Id - U)|-type factors;
    densities exist for Re(delta) > -1/2, while exact sampling additionally
    requires Re(delta) >= 0 (see `sampling`).
    """

    n: int
    beta: float
    delta: complex = 0j

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        if not self.beta > 0:
            raise ParameterError(f"beta must be > 0, got {self.beta!r}")
        d = complex(self.delta)
        if not d.real > -0.5:
            raise ParameterError(f"Re(delta) must exceed -1/2, got {d}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "delta", d)

    @property
    def beta_half(self) -> float:
        return 0.5 * self.beta


def _coefficient_vector(values, unit_tol: float) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128).reshape(-1).copy()
    if arr.size < 1:
        raise InvariantError("coefficient sequence must have length >= 1")
    mods = np.abs(arr)
    if arr.size > 1 and np.any(mods[:-1] >= 1.0):
        raise InvariantError("interior coefficients must lie strictly inside the unit disk")
    if abs(mods[-1] - 1.0) > unit_tol:
        raise InvariantError(
            f"last coefficient must be unimodular within {unit_tol:g}, "
            f"got modulus {mods[-1]!r}"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class VerblunskyCoeffs:
    """Plain recursion coefficients: (alpha_0,...,alpha_{n-2}) in D, alpha_{n-1} on T."""

    alphas: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "alphas", _coefficient_vector(self.alphas, tol.UNIT_MODULUS_TOL)
        )

    @property
    def n(self) -> int:
        return self.alphas.size


@dataclass(frozen=True, eq=False)
class DeformedCoeffs:
    """Deformed coefficients: same modulus pattern as the plain ones.

    Under the coefficient bijection |gamma_k| == |alpha_k| for every k, and
    prod(1 - gamma_k) is the characteristic polynomial of the associated
    unitary matrix evaluated at 1.
    """

    gammas: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "gammas", _coefficient_vector(self.gammas, tol.UNIT_MODULUS_TOL)
        )

    @property
    def n(self) -> int:
        return self.gammas.size


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Atomic probability measure sum_j weights[j] * delta(theta_j) on the circle."""

    thetas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        th = np.mod(np.asarray(self.thetas, dtype=float).reshape(-1), TWO_PI)
        w = np.asarray(self.weights, dtype=float).reshape(-1).copy()
        if th.size != w.size or th.size < 1:
            raise InvariantError("thetas and weights must have equal positive length")
        if np.any(w <= 0.0):
            raise InvariantError("all weights must be positive")
        s = w.sum()
        if abs(s - 1.0) > tol.STRUCTURAL_TOL:
            raise InvariantError(f"weights must sum to 1 within {tol.STRUCTURAL_TOL:g}, got {s!r}")
        if th.size > 1:
            gaps = np.diff(np.sort(th))
            circular_gap = TWO_PI - (th.max() - th.min())
            if min(gaps.min(), circular_gap) <= tol.ATOM_GAP_TOL:
                raise InvariantError("atoms must be pairwise distinct on the circle")
        th.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.thetas.size

    def atoms(self) -> np.ndarray:
        """Atom positions as points on the unit circle."""
        return np.exp(1j * self.thetas)

    def moment(self, k: int) -> complex:
        """k-th trigonometric moment, integral of z^k against the measure."""
        return complex(np.sum(self.weights * np.exp(1j * k * self.thetas)))


@dataclass(frozen=True, eq=False)
class MonicPolyPair:
    """A monic polynomial Phi and its reversed conjugate Phi*.

    Coefficients are stored ascending; Phi*[j] = conj(Phi[deg - j]), which is
    the coefficient form of Phi*(z) = z^deg * conj(Phi(1/conj(z))).
    """

    phi: np.ndarray
    phi_star: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.phi, dtype=np.complex128).reshape(-1).copy()
        q = np.asarray(self.phi_star, dtype=np.complex128).reshape(-1).copy()
        if p.size != q.size or p.size < 1:
            raise InvariantError("phi and phi_star must have equal positive length")
        if p[-1] != 1.0:
            raise InvariantError("phi must be monic with leading coefficient exactly 1")
        if not np.allclose(q, np.conj(p[::-1]), rtol=0.0, atol=1e-13):
            raise InvariantError("phi_star must be the reversed conjugate of phi")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "phi", p)
        object.__setattr__(self, "phi_star", q)

    @property
    def degree(self) -> int:
        return self.phi.size - 1

    @classmethod
    def one(cls) -> "MonicPolyPair":
        """The degree-zero pair Phi_0 = Phi_0* = 1."""
        return cls(np.ones(1, dtype=np.complex128), np.ones(1, dtype=np.complex128))

    def eval_phi(self, z) -> complex | np.ndarray:
        return npoly.polyval(z, self.phi)

    def eval_phi_star(self, z) -> complex | np.ndarray:
        return npoly.polyval(z, self.phi_star)


def szego_step(pair: MonicPolyPair, alpha: complex) -> MonicPolyPair:
    """Advance the recursion: Phi_{j+1}(z) = z Phi_j(z) - conj(alpha) Phi_j*(z)."""
    alpha = complex(alpha)
    if abs(alpha) > 1.0 + 1e-12:
        raise ParameterError(f"|alpha| must be <= 1, got {abs(alpha)!r}")
    shifted = np.concatenate(([0.0 + 0.0j], pair.phi))
    padded_star = np.concatenate((pair.phi_star, [0.0 + 0.0j]))
    phi_next = shifted - np.conj(alpha) * padded_star
    phi_next[-1] = 1.0  # monic by construction; pin exactly
    return MonicPolyPair(phi_next, np.conj(phi_next[::-1]))


def _alpha_array(coeffs) -> np.ndarray:
    if isinstance(coeffs, VerblunskyCoeffs):
        return coeffs.alphas
    return np.asarray(coeffs, dtype=np.complex128).reshape(-1)


def szego_polynomials(coeffs) -> list[MonicPolyPair]:
    """All pairs (Phi_0, Phi_0*), ..., (Phi_n, Phi_n*) for the given coefficients."""
    alphas = _alpha_array(coeffs)
    chain = [MonicPolyPair.one()]
    for a in alphas:
        chain.append(szego_step(chain[-1], a))
    return chain


def _phase_update(gamma: complex, index: int) -> complex:
    if abs(1.0 - gamma) < tol.DEGENERATE_PHASE_TOL:
        raise DegenerateCoefficientError(
            f"coefficient {index} equals 1; phase factor undefined"
        )
    return (1.0 - np.conj(gamma)) / (1.0 - gamma)


def gamma_from_alpha(coeffs: VerblunskyCoeffs) -> DeformedCoeffs:
    """Map plain coefficients to deformed ones.

    gamma_0 = conj(alpha_0) and for k >= 1
    gamma_k = conj(alpha_k) * prod_{j<k} (1 - conj(gamma_j)) / (1 - gamma_j).
    Moduli are preserved, so validity of the input gives validity of the output.
    """
    alphas = coeffs.alphas
    n = alphas.size
    gammas = np.empty(n, dtype=np.complex128)
    phase = 1.0 + 0.0j
    for k in range(n):
        gammas[k] = np.conj(alphas[k]) * phase
        if k < n - 1:
            phase *= _phase_update(gammas[k], k)
    return DeformedCoeffs(gammas)


def alpha_from_gamma(coeffs: DeformedCoeffs) -> VerblunskyCoeffs:
    """Exact inverse of `gamma_from_alpha` (same cumulative phase, conjugated read-out)."""
    gammas = coeffs.gammas
    n = gammas.size
    alphas = np.empty(n, dtype=np.complex128)
    phase = 1.0 + 0.0j
    for k in range(n):
        alphas[k] = np.conj(gammas[k]) * phase
        if k < n - 1:
            phase *= _phase_update(gammas[k], k)
    return VerblunskyCoeffs(alphas)


def gamma_functions_at(coeffs: VerblunskyCoeffs, z: complex) -> np.ndarray:
    """Coefficient functions gamma_k(z) = z - Phi_{k+1}(z)/Phi_k(z), k = 0..n-1.

    Requires Phi_k(z) != 0 for k < n; at unit modulus |gamma_k(z)| = |alpha_k|,
    and at z = 1 this reduces to `gamma_from_alpha`.
    """
    z = complex(z)
    chain = szego_polynomials(coeffs)
    n = coeffs.n
    values = np.array([pair.eval_phi(z) for pair in chain])
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        if abs(values[k]) < tol.POLE_TOL:
            raise PoleError(f"Phi_{k}(z) vanishes at z={z}; gamma_{k}(z) has a pole")
        out[k] = z - values[k + 1] / values[k]
    return out


def char_poly_at_one(coeffs: DeformedCoeffs) -> complex:
    """det(Id - U) for the unitary matrix built from these coefficients."""
    return complex(np.prod(1.0 - coeffs.gammas))


def _moment_matrix(thetas: np.ndarray, weights: np.ndarray) -> np.ndarray:
    n = thetas.size
    ks = np.arange(-(n - 1), n)
    moments = (weights[None, :] * np.exp(1j * np.outer(ks, thetas))).sum(axis=1)
    idx = np.subtract.outer(np.arange(n), np.arange(n))  # G[i, j] = m_{j-i}
    return moments[-idx + (n - 1)]


def _monic_gs_alphas(thetas, weights, count) -> np.ndarray:
    """First `count` coefficients of the measure via monic Gram-Schmidt.

    Orthogonalizes 1, z, z^2, ... in L2 of the atomic measure with one
    reorthogonalization pass; coefficients are read off from the constant
    terms, conj(alpha_k) = -Phi_{k+1}(0).
    """
    z = np.exp(1j * np.asarray(thetas, dtype=float))
    w = np.asarray(weights, dtype=float)
    basis_vals = [np.ones_like(z)]
    basis_coef = [np.array([1.0 + 0.0j])]
    norms = [w.sum()]
    alphas = np.empty(count, dtype=np.complex128)
    power = np.ones_like(z)
    for k in range(1, count + 1):
        power = power * z
        vals = power.copy()
        coef = np.zeros(k + 1, dtype=np.complex128)
        coef[k] = 1.0
        for _ in range(2):  # reorthogonalize once
            for j in range(k):
                pr = np.sum(w * np.conj(basis_vals[j]) * vals) / norms[j]
                vals = vals - pr * basis_vals[j]
                coef[: j + 1] -= pr * basis_coef[j]
        alphas[k - 1] = -np.conj(coef[0])
        if k < count:
            nrm = float(np.sum(w * np.abs(vals) ** 2))
            if nrm <= 0.0:
                raise NumericDegeneracyError(
                    f"degree-{k} residual norm vanished; atoms too close"
                )
            basis_vals.append(vals)
            basis_coef.append(coef)
            norms.append(nrm)
    return alphas


def verblunsky_from_measure(
    measure: SpectralMeasure, *, cond_limit: float = tol.GRAM_COND_LIMIT
) -> VerblunskyCoeffs:
    """Recover the n recursion coefficients of an n-atom measure.

    Inverse of spectral-measure extraction: building the matrix model from the
    result and re-extracting the measure reproduces atoms and weights.

    Raises
    ------
    NumericDegeneracyError
        If the moment (Gram) matrix conditioning exceeds `cond_limit`,
        which happens for nearly coincident atoms.
    """
    n = measure.n
    if n > 1:
        cond = np.linalg.cond(_moment_matrix(measure.thetas, measure.weights))
        if not cond < cond_limit:
            raise NumericDegeneracyError(
                f"moment matrix conditioning {cond:.3e} exceeds {cond_limit:.1e}"
            )
    alphas = np.empty(n, dtype=np.complex128)
    if n > 1:
        alphas[: n - 1] = _monic_gs_alphas(measure.thetas, measure.weights, n - 1)
    # Phi_n is the node polynomial prod_j (z - z_j), so its constant term is
    # exact: conj(alpha_{n-1}) = -Phi_n(0) = -prod_j(-z_j).
    last = -np.conj(np.prod(-measure.atoms()))
    alphas[n - 1] = last / abs(last)
    return VerblunskyCoeffs(alphas)


def caratheodory_schur(measure: SpectralMeasure, z: complex) -> tuple[complex, complex]:
    """Caratheodory transform F and Schur function f of the measure at |z| < 1.

    F(z) = sum_j w_j (z_j + z)/(z_j - z) and f(z) = (F(z) - 1)/(z (F(z) + 1));
    f maps the disk to its closure and f(0) equals the first recursion
    coefficient alpha_0 (continuity value at the removable point z = 0).
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise ParameterError(f"caratheodory_schur requires |z| < 1, got {abs(z)!r}")
    atoms = measure.atoms()
    if np.min(np.abs(atoms - z)) < tol.POLE_TOL:
        raise PoleError("evaluation point collides with an atom")
    if z == 0:
        # F(0) = 1 exactly; the Schur ratio tends to conj(m_1) = alpha_0.
        return 1.0 + 0.0j, np.conj(measure.moment(1))
    big_f = complex(np.sum(measure.weights * (atoms + z) / (atoms - z)))
    schur = (big_f - 1.0) / (z * (big_f + 1.0))
    return big_f, schur


def coeffs_to_pairs(values) -> list[list[float]]:
    """JSON-friendly [re, im] pairs for a complex coefficient sequence."""
    arr = np.asarray(values, dtype=np.complex128).reshape(-1)
    return [[float(v.real), float(v.imag)] for v in arr]


def coeffs_from_pairs(pairs) -> np.ndarray:
    """Inverse of `coeffs_to_pairs`."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ParameterError("expected a sequence of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]
