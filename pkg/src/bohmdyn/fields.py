"""Field quantities derived from a wavefunction: density, velocities,
pressure, quantum potential, and the pointwise energy budgets.

Phase handling: the phase S itself is multivalued, so it is never computed.
Every formula uses only its derivatives, which are single valued off nodes:

    grad_i S = hbar * Im(grad_i psi / psi)
    dS/dt    = hbar * Im((dpsi/dt) / psi)

The osmotic velocity comes from the same complex log-derivative,
u_(i,+/-) = +/- (hbar/m) Re(grad_i psi / psi), which equals
+/- (hbar/2m) grad_i(density)/density identically.  The density Laplacian is
expanded by the product rule, grad_i^2 density = 2 Re(psi* grad_i^2 psi)
+ 2 |grad_i psi|^2, so no quantity is ever differenced numerically except in
the finite-difference oracle itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NodeError, UsageError
from .states import WavefunctionModel, as_positions, potential_energy

__all__ = [
    "DEFAULT_NODE_EPSILON",
    "FieldSample",
    "EnergyBudget",
    "density",
    "osmotic_velocity",
    "bohm_velocity",
    "pressure",
    "quantum_potential",
    "quantum_potential_decomposed",
    "energy_budget",
    "stationary_budget",
    "continuity_residual",
    "fd_gradient",
    "fd_laplacian",
    "fd_gradient_richardson",
    "fd_laplacian_richardson",
    "evaluate_fields",
]

DEFAULT_NODE_EPSILON = 1e-10


@dataclass(frozen=True)
class FieldSample:
    """Every pointwise field quantity at one configuration and time.

    Quantities that require dividing by the density are None when
    ``node_flag`` is set; the pressure needs no division and is always
    present.
    """

    positions: np.ndarray            # (n, d)
    t: float
    density: float
    node_flag: bool
    pressure: np.ndarray             # (n,)
    phase_gradient: Optional[np.ndarray] = None   # (n, d), momentum units
    dphase_dt: Optional[float] = None
    velocity: Optional[np.ndarray] = None         # (n, d)
    osmotic_plus: Optional[np.ndarray] = None     # (n, d)
    osmotic_minus: Optional[np.ndarray] = None    # (n, d)
    quantum_potential: Optional[float] = None


@dataclass(frozen=True)
class EnergyBudget:
    """Term-by-term pointwise energy balance.

    ``total_energy`` is -dS/dt for time-dependent budgets and the exact
    eigenvalue for stationary ones; ``residual`` is
    (kinetic_flow + kinetic_osmotic + compression + potential) - total_energy
    and is reported, never clamped.
    """

    kinetic_flow: float      # sum_i m v_i^2 / 2
    kinetic_osmotic: float   # sum_i m u_i^2 / 2
    compression: float       # density^-1 sum_i P_i
    potential: float
    total_energy: float
    residual: float

    @property
    def lhs_total(self) -> float:
        return self.kinetic_flow + self.kinetic_osmotic + self.compression + self.potential

    def term_magnitude(self) -> float:
        return (
            abs(self.kinetic_flow)
            + abs(self.kinetic_osmotic)
            + abs(self.compression)
            + abs(self.potential)
            + abs(self.total_energy)
        )


# ---------------------------------------------------------------------------
# Batched raw ingredients
# ---------------------------------------------------------------------------

def raw_fields(model: WavefunctionModel, xs: np.ndarray, t) -> dict:
    """Vectorized field ingredients over configurations (..., n, d).

    Returns psi, density, pressure (..., n), log-derivative w = grad psi/psi
    (..., n, d), log-Laplacian ell = lap psi/psi (..., n).  The divisions are
    performed unguarded; callers mask or guard nodes.
    """
    xs = np.asarray(xs, dtype=float)
    psi = model.value(xs, t)
    grad = model.gradient(xs, t)
    lap = model.laplacian(xs, t)
    dens = np.abs(psi) ** 2
    # grad_i^2 density via the product rule: no division, node safe
    lap_dens = 2.0 * np.real(np.conj(psi)[..., None] * lap) \
        + 2.0 * np.sum(np.abs(grad) ** 2, axis=-1)
    press = -(model.hbar**2) / (4.0 * model.mass) * lap_dens
    with np.errstate(divide="ignore", invalid="ignore"):
        w = grad / psi[..., None, None]
        ell = lap / psi[..., None]
    return {"psi": psi, "density": dens, "pressure": press, "w": w, "ell": ell}


def _single(model, config, t):
    xs = as_positions(config, model)
    if xs.shape != (model.n, model.d):
        raise UsageError("expected a single configuration")
    return xs, raw_fields(model, xs, t)


def _guard(dens: float, node_epsilon: float):
    if dens < node_epsilon:
        raise NodeError(float(dens), node_epsilon)


# ---------------------------------------------------------------------------
# Pointwise field operations
# ---------------------------------------------------------------------------

def density(model: WavefunctionModel, config, t: float = 0.0) -> float:
    """Probability density |psi|^2 at one configuration."""
    xs = as_positions(config, model)
    return float(np.abs(model.value(xs, t)) ** 2)


def osmotic_velocity(
    model, config, t: float, i: int, sign: int = +1,
    node_epsilon: float = DEFAULT_NODE_EPSILON,
) -> np.ndarray:
    """Osmotic velocity of particle i: +/- (hbar/2m) grad_i(density)/density."""
    if sign not in (+1, -1):
        raise UsageError("sign must be +1 or -1")
    _, f = _single(model, config, t)
    _guard(f["density"], node_epsilon)
    return sign * (model.hbar / model.mass) * np.real(f["w"][i])


def bohm_velocity(
    model, config, t: float, i: int,
    node_epsilon: float = DEFAULT_NODE_EPSILON,
) -> np.ndarray:
    """Phase-gradient velocity of particle i: grad_i S / m."""
    _, f = _single(model, config, t)
    _guard(f["density"], node_epsilon)
    return (model.hbar / model.mass) * np.imag(f["w"][i])


def pressure(model, config, t: float, i: int) -> float:
    """Pressure on particle i: -(hbar^2/4m) grad_i^2 density.  Node safe."""
    _, f = _single(model, config, t)
    return float(f["pressure"][i])


def quantum_potential(
    model, config, t: float = 0.0,
    node_epsilon: float = DEFAULT_NODE_EPSILON,
) -> float:
    """Bohm quantum potential -(hbar^2/2m) sum_i grad_i^2 R / R with R = |psi|.

    Assembled from the complex log-derivatives:
    grad_i^2 R / R = Re(ell_i) + |Im w_i|^2.  This route is arithmetically
    independent of the kinetic/compression split, which the tests exploit.
    """
    _, f = _single(model, config, t)
    _guard(f["density"], node_epsilon)
    lap_R_over_R = np.real(f["ell"]) + np.sum(np.imag(f["w"]) ** 2, axis=-1)
    return float(-(model.hbar**2) / (2.0 * model.mass) * np.sum(lap_R_over_R))


def quantum_potential_decomposed(
    model, config, t: float = 0.0,
    node_epsilon: float = DEFAULT_NODE_EPSILON,
) -> tuple[float, float]:
    """Split of the quantum potential into (osmotic kinetic, compression).

    Returns (sum_i m u_i^2 / 2, density^-1 sum_i P_i).  Their sum equals
    quantum_potential(...); the equality is asserted in tests, not assumed
    here.
    """
    _, f = _single(model, config, t)
    dens = f["density"]
    _guard(dens, node_epsilon)
    u = (model.hbar / model.mass) * np.real(f["w"])
    kinetic_u = 0.5 * model.mass * float(np.sum(u * u))
    compression = float(np.sum(f["pressure"]) / dens)
    return kinetic_u, compression


def energy_budget(
    model, config, t: float = 0.0,
    node_epsilon: float = DEFAULT_NODE_EPSILON,
) -> EnergyBudget:
    """Full dynamic energy balance at one configuration and time.

    total_energy = -dS/dt = -hbar Im((dpsi/dt)/psi).
    """
    xs, f = _single(model, config, t)
    dens = f["density"]
    _guard(dens, node_epsilon)
    with np.errstate(divide="ignore", invalid="ignore"):
        dpsi = model.time_derivative(xs, t) / f["psi"]
    ds_dt = model.hbar * float(np.imag(dpsi))
    return _assemble_budget(model, xs, f, total_energy=-ds_dt)


def stationary_budget(
    model, config,
    node_epsilon: float = DEFAULT_NODE_EPSILON,
) -> EnergyBudget:
    """Energy balance against the exact eigenvalue of a stationary model."""
    if not model.is_stationary or model.energy is None:
        raise UsageError("stationary_budget requires a stationary model with energy")
    xs, f = _single(model, config, 0.0)
    _guard(f["density"], node_epsilon)
    return _assemble_budget(model, xs, f, total_energy=float(model.energy))


def _assemble_budget(model, xs, f, total_energy: float) -> EnergyBudget:
    dens = f["density"]
    v = (model.hbar / model.mass) * np.imag(f["w"])
    u = (model.hbar / model.mass) * np.real(f["w"])
    kinetic_flow = 0.5 * model.mass * float(np.sum(v * v))
    kinetic_osmotic = 0.5 * model.mass * float(np.sum(u * u))
    compression = float(np.sum(f["pressure"]) / dens)
    pot = potential_energy(model, xs)
    residual = (kinetic_flow + kinetic_osmotic + compression + pot) - total_energy
    return EnergyBudget(
        kinetic_flow=kinetic_flow,
        kinetic_osmotic=kinetic_osmotic,
        compression=compression,
        potential=pot,
        total_energy=total_energy,
        residual=residual,
    )


# ---------------------------------------------------------------------------
# Continuity equation residual
# ---------------------------------------------------------------------------

def continuity_residual(
    model, config, t: float = 0.0, h: float = 1e-4
) -> float:
    """Residual of d(density)/dt + sum_i div_i(density * v_i).

    The time derivative is analytic, 2 Re(psi* dpsi/dt).  The flux divergence
    differences the analytic flux density*v_i = (hbar/m) Im(psi* grad_i psi)
    centrally at step h; the flux needs no division, so this is node safe.
    """
    xs = as_positions(config, model)

    def flux(pts):
        psi = model.value(pts, t)
        grad = model.gradient(pts, t)
        return (model.hbar / model.mass) * np.imag(np.conj(psi)[..., None, None] * grad)

    psi0 = model.value(xs, t)
    ddens_dt = 2.0 * float(np.real(np.conj(psi0) * model.time_derivative(xs, t)))

    div = 0.0
    for i in range(model.n):
        for a in range(model.d):
            xp = xs.copy()
            xp[i, a] += h
            xm = xs.copy()
            xm[i, a] -= h
            div += (flux(xp)[i, a] - flux(xm)[i, a]) / (2.0 * h)
    return ddens_dt + float(div)


# ---------------------------------------------------------------------------
# Finite-difference oracle for the analytic derivatives
# ---------------------------------------------------------------------------

def fd_gradient(model, config, t: float, i: int, h: float = 1e-4) -> np.ndarray:
    """Central-difference gradient of psi with respect to particle i."""
    if h <= 0:
        raise UsageError("h must be positive")
    xs = as_positions(config, model)
    out = np.empty(model.d, dtype=complex)
    for a in range(model.d):
        xp = xs.copy()
        xp[i, a] += h
        xm = xs.copy()
        xm[i, a] -= h
        out[a] = (model.value(xp, t) - model.value(xm, t)) / (2.0 * h)
    return out


def fd_laplacian(model, config, t: float, i: int, h: float = 1e-4) -> complex:
    """Central-difference Laplacian of psi with respect to particle i."""
    if h <= 0:
        raise UsageError("h must be positive")
    xs = as_positions(config, model)
    center = model.value(xs, t)
    acc = 0.0 + 0.0j
    for a in range(model.d):
        xp = xs.copy()
        xp[i, a] += h
        xm = xs.copy()
        xm[i, a] -= h
        acc += (model.value(xp, t) - 2.0 * center + model.value(xm, t)) / h**2
    return complex(acc)


def fd_gradient_richardson(model, config, t, i, h: float = 1e-4):
    """Refined gradient estimate plus an error estimate from halving h."""
    coarse = fd_gradient(model, config, t, i, h)
    fine = fd_gradient(model, config, t, i, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0, np.max(np.abs(fine - coarse)) / 3.0


def fd_laplacian_richardson(model, config, t, i, h: float = 1e-4):
    """Refined Laplacian estimate plus an error estimate from halving h."""
    coarse = fd_laplacian(model, config, t, i, h)
    fine = fd_laplacian(model, config, t, i, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0, abs(fine - coarse) / 3.0


# ---------------------------------------------------------------------------
# One-call bundle
# ---------------------------------------------------------------------------

def evaluate_fields(
    model, config, t: float = 0.0,
    node_epsilon: float = DEFAULT_NODE_EPSILON,
) -> FieldSample:
    """All pointwise fields at one configuration; node-guarded fields are None
    instead of non-finite when the density is below node_epsilon."""
    xs, f = _single(model, config, t)
    dens = float(f["density"])
    press = np.real(f["pressure"]).astype(float)
    if dens < node_epsilon:
        return FieldSample(
            positions=xs, t=float(np.asarray(t)), density=dens,
            node_flag=True, pressure=press,
        )
    grad_s = model.hbar * np.imag(f["w"])
    with np.errstate(divide="ignore", invalid="ignore"):
        ds_dt = model.hbar * float(np.imag(model.time_derivative(xs, t) / f["psi"]))
    u_plus = (model.hbar / model.mass) * np.real(f["w"])
    lap_R_over_R = np.real(f["ell"]) + np.sum(np.imag(f["w"]) ** 2, axis=-1)
    q = float(-(model.hbar**2) / (2.0 * model.mass) * np.sum(lap_R_over_R))
    return FieldSample(
        positions=xs, t=float(np.asarray(t)), density=dens,
        node_flag=False, pressure=press,
        phase_gradient=grad_s, dphase_dt=ds_dt,
        velocity=grad_s / model.mass,
        osmotic_plus=u_plus, osmotic_minus=-u_plus,
        quantum_potential=q,
    )
