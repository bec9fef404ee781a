"""Catalog of analytic n-particle wavefunctions with closed-form derivatives.

Every model bundles the complex wavefunction psi(x, t), its per-particle
gradient and Laplacian, its time derivative, and the potential that makes it
(when stationary) an exact eigenfunction.  All evaluators are vectorized:
positions have shape (..., n, d) and results broadcast over the leading axes.
Atomic units throughout (hbar = m_e = 1 by default), but mass and hbar stay
explicit so tests can vary them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, SingularityError

__all__ = [
    "ParticleConfig",
    "PotentialSpec",
    "WavefunctionModel",
    "make_harmonic_oscillator_1d",
    "make_superposition",
    "make_hydrogenlike",
    "make_free_gaussian_packet",
    "make_hookes_atom",
    "make_product_state",
    "potential_energy",
    "as_positions",
]

HYDROGEN_ORBITALS = ("1s", "2s", "2pz")

MAX_HERMITE_INDEX = 12  # recurrence is comfortably stable this far in doubles


@dataclass(frozen=True)
class ParticleConfig:
    """One spatial configuration of n particles plus fixed spin labels."""

    positions: np.ndarray  # shape (n, d)
    spin_labels: tuple[int, ...] = ()

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2:
            raise DomainError(f"positions must be (n, d), got shape {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise DomainError("positions must be finite")
        spins = self.spin_labels or (1,) * pos.shape[0]
        if len(spins) != pos.shape[0]:
            raise DomainError("spin_labels length must equal particle count")
        if any(s not in (-1, 1) for s in spins):
            raise DomainError("spin labels must be +1 or -1")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "spin_labels", tuple(spins))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    @classmethod
    def from_flat(cls, flat: Sequence[float], n: int, d: int) -> "ParticleConfig":
        return cls(np.asarray(flat, dtype=float).reshape(n, d))


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """External one-body potential V plus the optional pair repulsion.

    ``external`` maps positions of shape (..., d) to values of shape (...).
    ``key`` identifies the potential for compatibility checks (superpositions
    and products must share it).  ``singular_points`` enumerates positions
    where V is undefined; the pair term is singular wherever two particles
    coincide.
    """

    external: Callable[[np.ndarray], np.ndarray]
    pair_interaction: bool
    description: str
    key: tuple = ("custom",)
    singular_points: tuple = ()


@dataclass(frozen=True, eq=False)
class WavefunctionModel:
    """Analytic wavefunction bundle with exact derivative evaluators.

    Evaluator shapes, for positions x of shape (..., n, d) and scalar or
    broadcastable t:

    - value(x, t)            -> complex, shape (...)
    - gradient(x, t)         -> complex, shape (..., n, d)
    - laplacian(x, t)        -> complex, shape (..., n)   (per particle)
    - time_derivative(x, t)  -> complex, shape (...)
    """

    n: int
    d: int
    mass: float
    hbar: float
    is_stationary: bool
    energy: Optional[float]
    value: Callable
    gradient: Callable
    laplacian: Callable
    time_derivative: Callable
    potential: PotentialSpec
    label: str
    normalizable: bool = True
    quad_geometry: str = "box"  # "box" | "spherical" | "pair_radial"

    def gradient_i(self, x, t, i: int) -> np.ndarray:
        """Gradient with respect to particle i, shape (..., d)."""
        return self.gradient(x, t)[..., i, :]

    def laplacian_i(self, x, t, i: int) -> np.ndarray:
        """Laplacian with respect to particle i, shape (...)."""
        return self.laplacian(x, t)[..., i]

    def __repr__(self):  # keep readable in test output
        return f"<WavefunctionModel {self.label!r} n={self.n} d={self.d}>"


def as_positions(config, model: WavefunctionModel | None = None) -> np.ndarray:
    """Coerce a ParticleConfig or array-like into a positions array (..., n, d)."""
    if isinstance(config, ParticleConfig):
        pos = config.positions
    else:
        pos = np.asarray(config, dtype=float)
    if model is not None:
        if pos.ndim == 1:
            pos = pos.reshape(model.n, model.d)
        if pos.shape[-2:] != (model.n, model.d):
            raise DomainError(
                f"positions shape {pos.shape} incompatible with model "
                f"(n={model.n}, d={model.d})"
            )
    return pos


# ---------------------------------------------------------------------------
# 1D harmonic oscillator
# ---------------------------------------------------------------------------

def _hermite_last3(xi: np.ndarray, order: int):
    """Return (H_{order-2}, H_{order-1}, H_order) by the three-term recurrence."""
    h_prev2 = np.zeros_like(xi)
    h_prev = np.zeros_like(xi)
    h = np.ones_like(xi)
    for k in range(order):
        h_prev2, h_prev = h_prev, h
        h = 2.0 * xi * h_prev - 2.0 * k * h_prev2
    return h_prev2, h_prev, h


def make_harmonic_oscillator_1d(
    quantum_number: int, omega: float, mass: float = 1.0, hbar: float = 1.0
) -> WavefunctionModel:
    """Stationary 1D oscillator eigenstate with V(x) = m omega^2 x^2 / 2."""
    if quantum_number < 0 or quantum_number != int(quantum_number):
        raise DomainError("quantum_number must be a nonnegative integer")
    if quantum_number > MAX_HERMITE_INDEX:
        raise DomainError(
            f"quantum_number {quantum_number} exceeds stability limit "
            f"{MAX_HERMITE_INDEX}"
        )
    if omega <= 0:
        raise DomainError("omega must be positive")
    nq = int(quantum_number)
    alpha = math.sqrt(mass * omega / hbar)
    energy = (nq + 0.5) * hbar * omega
    norm = (mass * omega / (math.pi * hbar)) ** 0.25 / math.sqrt(
        2.0**nq * math.factorial(nq)
    )

    def _parts(x):
        xi = alpha * np.asarray(x)[..., 0, 0]
        h2, h1, h0 = _hermite_last3(xi, nq)
        envelope = norm * np.exp(-0.5 * xi * xi)
        return xi, h2, h1, h0, envelope

    def _phase(t):
        return np.exp(-1j * energy * np.asarray(t) / hbar)

    def value(x, t):
        xi, _, _, h0, env = _parts(x)
        return h0 * env * _phase(t)

    def gradient(x, t):
        xi, _, h1, h0, env = _parts(x)
        dpsi = alpha * (2.0 * nq * h1 - xi * h0) * env * _phase(t)
        return dpsi[..., None, None]

    def laplacian(x, t):
        xi, h2, h1, h0, env = _parts(x)
        poly = 4.0 * nq * (nq - 1) * h2 - 4.0 * nq * xi * h1 + (xi * xi - 1.0) * h0
        return (alpha**2 * poly * env * _phase(t))[..., None]

    def time_derivative(x, t):
        return (-1j * energy / hbar) * value(x, t)

    pot = PotentialSpec(
        external=lambda r: 0.5 * mass * omega**2 * np.asarray(r)[..., 0] ** 2,
        pair_interaction=False,
        description=f"harmonic well, omega={omega:g}",
        key=("ho1d", mass, hbar, omega),
    )
    return WavefunctionModel(
        n=1, d=1, mass=mass, hbar=hbar,
        is_stationary=True, energy=energy,
        value=value, gradient=gradient, laplacian=laplacian,
        time_derivative=time_derivative,
        potential=pot, label=f"ho1d:n={nq},omega={omega:g}",
    )


# ---------------------------------------------------------------------------
# Hydrogen-like orbitals (3D, Coulomb potential -Z/r)
# ---------------------------------------------------------------------------

def make_hydrogenlike(
    orbital: str, Z: float, mass: float = 1.0, hbar: float = 1.0
) -> WavefunctionModel:
    """Stationary hydrogen-like orbital; the origin is a Coulomb singularity."""
    if Z <= 0:
        raise DomainError("Z must be positive")
    if orbital not in HYDROGEN_ORBITALS:
        raise DomainError(f"orbital must be one of {HYDROGEN_ORBITALS}")
    kappa = mass * Z / hbar**2  # inverse length scale Z / a0

    if orbital == "1s":
        energy = -(hbar**2) * kappa**2 / (2.0 * mass)
        norm = math.sqrt(kappa**3 / math.pi)

        def _radial(r):
            return norm * np.exp(-kappa * r)

        def _radial_deriv(r):
            return -kappa * _radial(r)

        def _radial_lap(r):
            # full 3D Laplacian of the radial function: f'' + 2 f'/r
            with np.errstate(divide="ignore", invalid="ignore"):
                return (kappa**2 - 2.0 * kappa / r) * _radial(r)

        angular = None

    elif orbital == "2s":
        energy = -(hbar**2) * kappa**2 / (8.0 * mass)
        norm = math.sqrt(kappa**3 / (32.0 * math.pi))

        def _radial(r):
            return norm * (2.0 - kappa * r) * np.exp(-0.5 * kappa * r)

        def _radial_deriv(r):
            return norm * (0.5 * kappa**2 * r - 2.0 * kappa) * np.exp(-0.5 * kappa * r)

        def _radial_lap(r):
            with np.errstate(divide="ignore", invalid="ignore"):
                return norm * np.exp(-0.5 * kappa * r) * (
                    2.5 * kappa**2 - 0.25 * kappa**3 * r - 4.0 * kappa / r
                )

        angular = None

    else:  # 2pz: psi = norm * z * exp(-kappa r / 2)
        energy = -(hbar**2) * kappa**2 / (8.0 * mass)
        norm = math.sqrt(kappa**5 / (32.0 * math.pi))
        _radial = _radial_deriv = _radial_lap = None
        angular = "z"

    def _phase(t):
        return np.exp(-1j * energy * np.asarray(t) / hbar)

    if angular is None:  # s orbitals: psi = f(r) * phase

        def value(x, t):
            r = np.linalg.norm(np.asarray(x)[..., 0, :], axis=-1)
            return _radial(r) * _phase(t)

        def gradient(x, t):
            pos = np.asarray(x)[..., 0, :]
            r = np.linalg.norm(pos, axis=-1)
            with np.errstate(divide="ignore", invalid="ignore"):
                g = _radial_deriv(r)[..., None] * pos / r[..., None]
            g = g.astype(complex) * np.expand_dims(_phase(t), -1)
            return np.expand_dims(g, -2)

        def laplacian(x, t):
            r = np.linalg.norm(np.asarray(x)[..., 0, :], axis=-1)
            return (_radial_lap(r) * _phase(t))[..., None]

    else:  # 2pz

        def value(x, t):
            pos = np.asarray(x)[..., 0, :]
            r = np.linalg.norm(pos, axis=-1)
            return norm * pos[..., 2] * np.exp(-0.5 * kappa * r) * _phase(t)

        def gradient(x, t):
            pos = np.asarray(x)[..., 0, :]
            r = np.linalg.norm(pos, axis=-1)
            env = norm * np.exp(-0.5 * kappa * r)
            with np.errstate(divide="ignore", invalid="ignore"):
                g = -0.5 * kappa * pos[..., 2:3] * pos / r[..., None]
            g = g.copy()
            g[..., 2] += 1.0
            g = (g * env[..., None]).astype(complex) * np.expand_dims(_phase(t), -1)
            return np.expand_dims(g, -2)

        def laplacian(x, t):
            pos = np.asarray(x)[..., 0, :]
            r = np.linalg.norm(pos, axis=-1)
            with np.errstate(divide="ignore", invalid="ignore"):
                lap = norm * pos[..., 2] * np.exp(-0.5 * kappa * r) * (
                    0.25 * kappa**2 - 2.0 * kappa / r
                )
            return (lap * _phase(t))[..., None]

    def time_derivative(x, t):
        return (-1j * energy / hbar) * value(x, t)

    pot = PotentialSpec(
        external=lambda rr: -Z / np.linalg.norm(np.asarray(rr), axis=-1),
        pair_interaction=False,
        description=f"Coulomb -Z/r, Z={Z:g}",
        key=("coulomb", mass, hbar, Z),
        singular_points=(np.zeros(3),),
    )
    return WavefunctionModel(
        n=1, d=3, mass=mass, hbar=hbar,
        is_stationary=True, energy=energy,
        value=value, gradient=gradient, laplacian=laplacian,
        time_derivative=time_derivative,
        potential=pot, label=f"hydrogen:{orbital},Z={Z:g}",
        quad_geometry="spherical",
    )


# ---------------------------------------------------------------------------
# Free spreading Gaussian packet (1D, V = 0)
# ---------------------------------------------------------------------------

def make_free_gaussian_packet(
    sigma0: float, k0: float, mass: float = 1.0, hbar: float = 1.0
) -> WavefunctionModel:
    """Spreading free-particle Gaussian with initial density width sigma0 and
    mean momentum hbar*k0.  The closed form solves the free Schrodinger
    equation exactly; its time derivative is supplied analytically."""
    if sigma0 <= 0:
        raise DomainError("sigma0 must be positive")
    v0 = hbar * k0 / mass
    amp0 = (2.0 * math.pi) ** (-0.25)
    gamma = hbar / (2.0 * mass * sigma0)  # spreading rate in the amplitude

    def _pieces(x, t):
        t = np.asarray(t, dtype=float)
        xx = np.asarray(x)[..., 0, 0]
        ct = 4.0 * sigma0**2 + 2j * hbar * t / mass
        amp = amp0 / np.sqrt(sigma0 + 1j * gamma * t)
        xc = xx - v0 * t
        phase = np.exp(-(xc**2) / ct + 1j * k0 * xx - 0.5j * hbar * k0**2 * t / mass)
        return xx, t, ct, amp, xc, phase

    def value(x, t):
        _, _, _, amp, _, phase = _pieces(x, t)
        return amp * phase

    def gradient(x, t):
        _, _, ct, amp, xc, phase = _pieces(x, t)
        dbdx = -2.0 * xc / ct + 1j * k0
        return (amp * phase * dbdx)[..., None, None]

    def laplacian(x, t):
        _, _, ct, amp, xc, phase = _pieces(x, t)
        dbdx = -2.0 * xc / ct + 1j * k0
        return (amp * phase * (dbdx**2 - 2.0 / ct))[..., None]

    def time_derivative(x, t):
        _, tt, ct, amp, xc, phase = _pieces(x, t)
        dloga = -0.5j * gamma / (sigma0 + 1j * gamma * tt)
        dbdt = 2.0 * v0 * xc / ct + xc**2 * (2j * hbar / mass) / ct**2 \
            - 0.5j * hbar * k0**2 / mass
        return amp * phase * (dloga + dbdt)

    pot = PotentialSpec(
        external=lambda r: np.zeros(np.asarray(r).shape[:-1]),
        pair_interaction=False,
        description="free particle (V = 0)",
        key=("free", mass, hbar),
    )
    return WavefunctionModel(
        n=1, d=1, mass=mass, hbar=hbar,
        is_stationary=False, energy=None,
        value=value, gradient=gradient, laplacian=laplacian,
        time_derivative=time_derivative,
        potential=pot, label=f"gauss:sigma={sigma0:g},k={k0:g}",
    )


# ---------------------------------------------------------------------------
# Hooke's atom: two electrons in a harmonic well with Coulomb repulsion
# ---------------------------------------------------------------------------

@cache
def _hooke_norm_constant() -> float:
    """Normalization of (1 + u/2) exp(-(r1^2+r2^2)/4), computed by quadrature.

    Center-of-mass/relative reduction: the squared norm factorizes into two
    radial integrals.  (The closed form 4 pi^(5/2) (8 + 5 sqrt(pi)) is used as
    an independent oracle in the tests.)
    """
    cm = 4.0 * math.pi * quad(lambda R: R * R * math.exp(-R * R), 0.0, np.inf)[0]
    rel = 4.0 * math.pi * quad(
        lambda u: u * u * (1.0 + 0.5 * u) ** 2 * math.exp(-0.25 * u * u), 0.0, np.inf
    )[0]
    return 1.0 / math.sqrt(cm * rel)


HOOKE_ENERGY = 2.0  # exact eigenvalue of the omega = 1/2 construction


def make_hookes_atom() -> WavefunctionModel:
    """Two-particle ground state of the omega = 1/2 harmonic well with
    Coulomb pair repulsion: psi = C (1 + |r1-r2|/2) exp(-(r1^2+r2^2)/4),
    energy exactly 2 hartree.  External potential per particle: |r|^2 / 8."""
    C = _hooke_norm_constant()
    energy = HOOKE_ENERGY

    def _geometry(x):
        pos = np.asarray(x)
        r1 = pos[..., 0, :]
        r2 = pos[..., 1, :]
        w = r1 - r2
        u = np.linalg.norm(w, axis=-1)
        gauss = np.exp(-0.25 * (np.sum(r1 * r1, axis=-1) + np.sum(r2 * r2, axis=-1)))
        return r1, r2, w, u, gauss

    def value(x, t):
        _, _, _, u, gauss = _geometry(x)
        return C * (1.0 + 0.5 * u) * gauss * np.exp(-1j * energy * np.asarray(t))

    def gradient(x, t):
        r1, r2, w, u, gauss = _geometry(x)
        f = (1.0 + 0.5 * u)[..., None]
        phase = np.exp(-1j * energy * np.asarray(t))
        with np.errstate(divide="ignore", invalid="ignore"):
            grad_f1 = 0.5 * w / u[..., None]
        g1 = grad_f1 - 0.5 * f * r1
        g2 = -grad_f1 - 0.5 * f * r2
        out = np.stack([g1, g2], axis=-2) * gauss[..., None, None] * C
        return out * phase[..., None, None]

    def laplacian(x, t):
        r1, r2, w, u, gauss = _geometry(x)
        f = 1.0 + 0.5 * u
        phase = np.exp(-1j * energy * np.asarray(t))
        with np.errstate(divide="ignore", invalid="ignore"):
            inv_u = 1.0 / u
            l1 = inv_u - 0.5 * inv_u * np.sum(w * r1, axis=-1) \
                + f * (0.25 * np.sum(r1 * r1, axis=-1) - 1.5)
            l2 = inv_u + 0.5 * inv_u * np.sum(w * r2, axis=-1) \
                + f * (0.25 * np.sum(r2 * r2, axis=-1) - 1.5)
        out = np.stack([l1, l2], axis=-1) * gauss[..., None] * C
        return out * phase[..., None]

    def time_derivative(x, t):
        return -1j * energy * value(x, t)

    pot = PotentialSpec(
        external=lambda r: 0.125 * np.sum(np.asarray(r) ** 2, axis=-1),
        pair_interaction=True,
        description="harmonic well omega=1/2 (|r|^2/8) + Coulomb pair repulsion",
        key=("hooke",),
    )
    return WavefunctionModel(
        n=2, d=3, mass=1.0, hbar=1.0,
        is_stationary=True, energy=energy,
        value=value, gradient=gradient, laplacian=laplacian,
        time_derivative=time_derivative,
        potential=pot, label="hooke",
        quad_geometry="pair_radial",
    )


# ---------------------------------------------------------------------------
# Combinators: superpositions and product states
# ---------------------------------------------------------------------------

def make_superposition(base) -> WavefunctionModel:
    """Normalized superposition sum_k c_k psi_k(x, t) of stationary models.

    Coefficients are rescaled so sum |c_k|^2 = 1.  A single-term superposition
    stays stationary (it differs from its base by a constant phase at most);
    anything longer is genuinely time dependent.
    """
    base = list(base)
    if not base:
        raise DomainError("superposition needs at least one term")
    coeffs = np.array([c for c, _ in base], dtype=complex)
    models = [m for _, m in base]
    total = np.sum(np.abs(coeffs) ** 2)
    if total == 0.0:
        raise DomainError("superposition coefficients must not all be zero")
    coeffs = coeffs / math.sqrt(total)

    first = models[0]
    for m in models:
        if not m.is_stationary or m.energy is None:
            raise DomainError("superposition terms must be stationary models")
        if (m.n, m.d) != (first.n, first.d):
            raise DomainError("superposition terms must share n and d")
        if (m.mass, m.hbar) != (first.mass, first.hbar):
            raise DomainError("superposition terms must share mass and hbar")
        if m.potential.key != first.potential.key:
            raise DomainError("superposition terms must share the potential")

    def value(x, t):
        return sum(c * m.value(x, t) for c, m in zip(coeffs, models))

    def gradient(x, t):
        return sum(c * m.gradient(x, t) for c, m in zip(coeffs, models))

    def laplacian(x, t):
        return sum(c * m.laplacian(x, t) for c, m in zip(coeffs, models))

    def time_derivative(x, t):
        return sum(c * m.time_derivative(x, t) for c, m in zip(coeffs, models))

    single = len(models) == 1
    label = "super:" + "+".join(m.label for m in models)
    return WavefunctionModel(
        n=first.n, d=first.d, mass=first.mass, hbar=first.hbar,
        is_stationary=single,
        energy=first.energy if single else None,
        value=value, gradient=gradient, laplacian=laplacian,
        time_derivative=time_derivative,
        potential=first.potential, label=label,
        quad_geometry=first.quad_geometry,
    )


def make_product_state(models) -> WavefunctionModel:
    """Product of independent 1-particle models: psi = prod_k psi_k(x_k, t).

    Factors must share d, mass, hbar, and the same external potential; the
    product never carries a pair interaction (it would not stay an
    eigenfunction).  Derivatives replace one factor at a time, so factor nodes
    need no special handling.
    """
    models = list(models)
    if not models:
        raise DomainError("product state needs at least one factor")
    first = models[0]
    for m in models:
        if m.n != 1:
            raise DomainError("product factors must be 1-particle models")
        if m.d != first.d:
            raise DomainError("product factors must share spatial dimension")
        if (m.mass, m.hbar) != (first.mass, first.hbar):
            raise DomainError("product factors must share mass and hbar")
        if m.potential.key != first.potential.key:
            raise DomainError("product factors must share the external potential")
    k = len(models)

    def _factor_values(x, t):
        return [m.value(np.asarray(x)[..., j : j + 1, :], t) for j, m in enumerate(models)]

    def _prod_except(vals, skip):
        out = None
        for j, v in enumerate(vals):
            if j == skip:
                continue
            out = v if out is None else out * v
        if out is None:
            out = np.ones_like(vals[0])
        return out

    def value(x, t):
        vals = _factor_values(x, t)
        out = vals[0]
        for v in vals[1:]:
            out = out * v
        return out

    def gradient(x, t):
        vals = _factor_values(x, t)
        cols = []
        for j, m in enumerate(models):
            gj = m.gradient(np.asarray(x)[..., j : j + 1, :], t)[..., 0, :]
            cols.append(gj * _prod_except(vals, j)[..., None])
        return np.stack(cols, axis=-2)

    def laplacian(x, t):
        vals = _factor_values(x, t)
        cols = []
        for j, m in enumerate(models):
            lj = m.laplacian(np.asarray(x)[..., j : j + 1, :], t)[..., 0]
            cols.append(lj * _prod_except(vals, j))
        return np.stack(cols, axis=-1)

    def time_derivative(x, t):
        vals = _factor_values(x, t)
        out = None
        for j, m in enumerate(models):
            term = m.time_derivative(np.asarray(x)[..., j : j + 1, :], t) * _prod_except(vals, j)
            out = term if out is None else out + term
        return out

    stationary = all(m.is_stationary for m in models)
    energy = sum(m.energy for m in models) if stationary else None
    pot = PotentialSpec(
        external=first.potential.external,
        pair_interaction=False,
        description=first.potential.description + " (independent particles)",
        key=first.potential.key,
        singular_points=first.potential.singular_points,
    )
    label = "prod(" + ",".join(m.label for m in models) + ")"
    return WavefunctionModel(
        n=k, d=first.d, mass=first.mass, hbar=first.hbar,
        is_stationary=stationary, energy=energy,
        value=value, gradient=gradient, laplacian=laplacian,
        time_derivative=time_derivative,
        potential=pot, label=label,
        normalizable=all(m.normalizable for m in models),
        quad_geometry="pair_radial" if (k == 2 and first.d == 3) else "box",
    )


# ---------------------------------------------------------------------------
# Potential energy U(x)
# ---------------------------------------------------------------------------

def potential_energy(model: WavefunctionModel, config) -> float:
    """Total potential U = sum_i V(r_i) + sum over unordered pairs of 1/r_ij.

    Each pair is counted once.  Raises SingularityError when the configuration
    sits exactly on an enumerated singular point or a particle coincidence.
    """
    pos = as_positions(config, model)
    if pos.ndim != 2:
        raise DomainError("potential_energy expects a single configuration")
    for i in range(model.n):
        for sp in model.potential.singular_points:
            if np.array_equal(pos[i], np.asarray(sp, dtype=float)):
                raise SingularityError(
                    f"particle {i} sits on the singular point {np.asarray(sp).tolist()}"
                )
    u = float(np.sum(model.potential.external(pos)))
    if model.potential.pair_interaction:
        for i in range(model.n):
            for j in range(i + 1, model.n):
                rij = float(np.linalg.norm(pos[i] - pos[j]))
                if rij == 0.0:
                    raise SingularityError(f"particles {i} and {j} coincide")
                u += 1.0 / rij
    return u


def potential_energy_batch(model: WavefunctionModel, xs: np.ndarray) -> np.ndarray:
    """Vectorized U over configurations of shape (..., n, d); singular points
    produce inf rather than raising (quadrature grids never hit them)."""
    xs = np.asarray(xs, dtype=float)
    u = np.sum(model.potential.external(xs), axis=-1)
    if model.potential.pair_interaction:
        for i in range(model.n):
            for j in range(i + 1, model.n):
                rij = np.linalg.norm(xs[..., i, :] - xs[..., j, :], axis=-1)
                with np.errstate(divide="ignore"):
                    u = u + 1.0 / rij
    return u
