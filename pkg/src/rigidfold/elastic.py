"""Relaxation of crease-spring energy on the rigid-origami constraint set.

Creases carry rotational springs with stiffness k_i and rest angle; the
energy increment for a state increment is a quadratic form, and the
constrained minimizer comes from the bordered system

    [ H    C^T ] [ drho   ]     [ d ]
    [ C    0   ] [ lambda ] = - [ r ]

solved minimum-norm.  When the constraint matrix has full row rank the
explicit inverse gives the same increment through

    drho = -(H^-1 - G C H^-1) d - G r,   G = H^-1 C^T (C H^-1 C^T)^-1

and with uniform stiffness that reduces to the projected steepest descent
-(1/k0)(I - C+ C) d - C+ r.  Step length is capped so the largest single
angle change is a factor c, halved whenever the characteristic angle's
increment reverses; iteration stops once c is below resolution.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .kinematics import assemble_global, check_fold_range
from .numerics import DEFAULT_CUTOFF, min_norm_solve, pseudoinverse, rank
from .pattern import build_vertex_fans
from .sequential import ConvergenceError

MAX_STEP_FACTOR = math.pi / 36.0


@dataclass(frozen=True)
class SpringConfig:
    """Per-crease stiffness (moment per radian) and rest angles."""

    stiffness: np.ndarray
    rest: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "stiffness", np.asarray(self.stiffness, dtype=float))
        object.__setattr__(self, "rest", np.asarray(self.rest, dtype=float))
        if self.stiffness.shape != self.rest.shape:
            raise ValueError("stiffness and rest angle arrays must match")
        if np.any(self.stiffness <= 0):
            raise ValueError("spring stiffness must be positive")

    @classmethod
    def per_unit_length(cls, p, k, rest):
        """Stiffness k_i = k * L_i from a stiffness per unit crease length."""
        return cls(stiffness=k * p.crease_lengths(), rest=rest)

    @classmethod
    def from_json(cls, p, document):
        """Springs schema: global k_per_length with per-crease overrides."""
        data = json.loads(document) if isinstance(document, str) else document
        k_per_length = data.get("k_per_length")
        lengths = p.crease_lengths()
        stiffness = np.full(p.n_creases, np.nan)
        rest = np.zeros(p.n_creases)
        seen = set()
        for entry in data["creases"]:
            i = int(entry["crease"])
            if i < 0 or i >= p.n_creases:
                raise ValueError(f"crease id {i} out of range")
            seen.add(i)
            rest[i] = float(entry["rest"])
            if entry.get("k") is not None:
                stiffness[i] = float(entry["k"])
            elif k_per_length is not None:
                stiffness[i] = k_per_length * lengths[i]
            else:
                raise ValueError(f"crease {i}: no stiffness and no k_per_length")
        missing = set(range(p.n_creases)) - seen
        if missing:
            raise ValueError(f"springs missing for creases {sorted(missing)}")
        return cls(stiffness=stiffness, rest=rest)


@dataclass(frozen=True)
class RelaxSettings:
    initial_step: float = MAX_STEP_FACTOR
    step_resolution: float = 1e-6
    residual_tol: float = 1e-9
    characteristic: int | None = None
    max_steps: int = 5000
    max_newton: int = 50

    def __post_init__(self):
        if self.initial_step > MAX_STEP_FACTOR + 1e-15:
            raise ValueError(
                f"initial step factor {self.initial_step} exceeds pi/36"
            )
        if self.initial_step <= 0:
            raise ValueError("initial step factor must be positive")


@dataclass
class RelaxResult:
    states: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    step_factors: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    newton_iters: list = field(default_factory=list)
    characteristic: int = 0
    converged: bool = False
    projected_gradient: float = math.nan

    @property
    def final(self):
        return self.states[-1]


def spring_energy(cfg, rho):
    """Total spring energy 0.5 * sum k_i (rho_i - rest_i)^2."""
    d = np.asarray(rho, dtype=float) - cfg.rest
    return 0.5 * float(np.dot(cfg.stiffness * d, d))


def spring_gradient(cfg, rho):
    """Internal crease moments k_i (rho_i - rest_i)."""
    return cfg.stiffness * (np.asarray(rho, dtype=float) - cfg.rest)


def kkt_step(p, cfg, rho, cutoff=DEFAULT_CUTOFF, fans=None, gc=None):
    """Energy-optimal increment subject to the linearized closure constraint.

    Uses the explicit full-row-rank inverse when the constraint matrix is
    comfortably well conditioned and falls back to the minimum-norm bordered
    solve otherwise (rank-deficient or nearly folded-flat states).
    """
    if gc is None:
        gc = assemble_global(p, rho, fans)
    d = spring_gradient(cfg, gc.rho)
    m = gc.C.shape[0]
    if m and rank(gc.C, 1e-6) == m:
        return _full_rank_step(gc.C, gc.r, cfg.stiffness, d)
    return _bordered_step(gc.C, gc.r, cfg.stiffness, d, cutoff)


def _bordered_step(c, r, stiffness, d, cutoff=DEFAULT_CUTOFF):
    n = c.shape[1]
    m = c.shape[0]
    k = np.zeros((n + m, n + m))
    k[:n, :n] = np.diag(stiffness)
    k[:n, n:] = c.T
    k[n:, :n] = c
    rhs = -np.concatenate([d, r])
    return min_norm_solve(k, rhs, cutoff)[:n]


def _full_rank_step(c, r, stiffness, d):
    hinv = 1.0 / stiffness
    chinv = c * hinv  # C @ H^-1
    g = (chinv.T) @ np.linalg.inv(chinv @ c.T)  # H^-1 C^T (C H^-1 C^T)^-1
    return -(hinv * d - g @ (chinv @ d)) - g @ r


def projection_step_uniform(p, k0, d, rho, fans=None, gc=None):
    """Projected steepest-descent increment for uniform stiffness k0.

    d is the energy gradient at rho; the increment is the gradient projected
    into the nullspace of the constraint matrix plus the error compensation.
    """
    if gc is None:
        gc = assemble_global(p, rho, fans)
    d = np.asarray(d, dtype=float)
    cplus = pseudoinverse(gc.C)
    return -(d - cplus @ (gc.C @ d)) / k0 - cplus @ gc.r


def relax(p, cfg, settings=None, rho0=None, fans=None):
    """Drive the state to a constrained spring-energy minimum.

    Follows the step rule rho += c * drho / max|drho| with residual cleanup
    after every move; halves c whenever the characteristic angle's increment
    reverses direction, and stops when c drops below the step resolution.
    """
    settings = settings or RelaxSettings()
    if fans is None:
        fans = build_vertex_fans(p)
    rho = np.zeros(p.n_creases) if rho0 is None else np.asarray(rho0, dtype=float).copy()
    rows = 3 * len(fans)

    gc = assemble_global(p, rho, fans)
    if rows and gc.normalized_residual >= settings.residual_tol:
        rho = _cleanup(p, fans, rho, settings)
        gc = assemble_global(p, rho, fans)

    if settings.characteristic is None:
        grad = np.abs(spring_gradient(cfg, rho))
        char = int(np.argmax(grad))
    else:
        char = int(settings.characteristic)

    result = RelaxResult(characteristic=char)
    result.states.append(rho.copy())
    result.energies.append(spring_energy(cfg, rho))
    result.newton_iters.append(0)

    c = settings.initial_step
    prev_char_move = 0.0
    i = 0
    while c > settings.step_resolution and i < settings.max_steps:
        i += 1
        gc = assemble_global(p, rho, fans)
        drho = kkt_step(p, cfg, rho, fans=fans, gc=gc)
        largest = float(np.max(np.abs(drho))) if drho.size else 0.0
        if largest < 1e-15:
            result.converged = True
            break
        if i > 2 and drho[char] * prev_char_move < 0.0:
            c = c / 2.0
        step = c * drho / largest
        new_rho = rho + step
        new_rho, iters = _cleanup_count(p, fans, new_rho, settings)
        prev_char_move = new_rho[char] - rho[char]
        rho = new_rho
        check_fold_range(rho)
        result.states.append(rho.copy())
        result.energies.append(spring_energy(cfg, rho))
        result.step_factors.append(c)
        result.step_sizes.append(float(np.max(np.abs(step))))
        result.newton_iters.append(iters)
    if c <= settings.step_resolution:
        result.converged = True

    gc = assemble_global(p, rho, fans)
    cplus = pseudoinverse(gc.C)
    d = spring_gradient(cfg, rho)
    result.projected_gradient = float(np.linalg.norm(d - cplus @ (gc.C @ d)))
    return result


def _cleanup(p, fans, rho, settings):
    rho, _ = _cleanup_count(p, fans, rho, settings)
    return rho


def _cleanup_count(p, fans, rho, settings):
    """Residual elimination drho = -C+ r until the normalized residual passes."""
    rows = 3 * len(fans)
    if rows == 0:
        return rho, 0
    iters = 0
    gc = assemble_global(p, rho, fans)
    while gc.normalized_residual >= settings.residual_tol:
        if iters >= settings.max_newton:
            raise ConvergenceError(
                f"residual cleanup stalled at {gc.normalized_residual:.3e}"
            )
        rho = rho - pseudoinverse(gc.C) @ gc.r
        gc = assemble_global(p, rho, fans)
        iters += 1
    return rho, iters


def waterbomb_symmetric_oracle(theta):
    """Mountain and valley fold angles of the symmetric eight-crease base.

    Closed-form folding branches parametrized by the apex angle theta,
    valid for 0 <= theta <= 3*pi/4: theta = pi/2 is flat, the ends are the
    two compactly folded states.
    """
    if theta < -1e-12 or theta > 3 * math.pi / 4 + 1e-12:
        raise ValueError(f"theta {theta} outside [0, 3*pi/4]")
    s2 = math.sqrt(2.0)
    if theta < math.pi / 2:
        rho_m = 2 * theta - math.pi
        arg = s2 * math.cos(theta) / (-2.0 - s2 * math.sin(theta))
        rho_v = 2 * math.acos(max(-1.0, min(1.0, arg))) - math.pi
    else:
        rho_m = math.pi - 2 * theta
        arg = s2 * math.cos(theta) / (2.0 - s2 * math.sin(theta))
        rho_v = 2 * math.acos(max(-1.0, min(1.0, arg))) - math.pi
    return rho_m, rho_v
