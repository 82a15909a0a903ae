"""Weak-excitation steady state of the driven atom-cavity system.

The expectation-value amplitudes v = (a, sigma_1 ... sigma_N) obey the
linear system  M v = rhs  with

    row 0 :  (i delta_c - kappa/2) a - i g sum_mu e^{-i xi p_mu} sigma_mu
             = -sqrt(kappa_wg) a_in
    row mu:  (i delta - 1/2) sigma_mu
             - gamma_L sum_{nu > mu} e^{i xi (p_nu - p_mu)} sigma_nu
             - gamma_R sum_{nu < mu} e^{i xi (p_mu - p_nu)} sigma_nu
             - i g e^{+i xi p_mu} a  =  0

where p_mu are the atom positions in units of the lattice spacing
(p_mu = mu - 1 for the equidistant array).  The cascaded structure of the
atom block -- emission to the left drives atoms at smaller positions only,
emission to the right the converse -- is what produces the chiral
interference the rest of the package probes.

The reflected amplitude follows from the input-output boundary relation
a_out + a_in = sqrt(kappa_wg) a, i.e. r = sqrt(kappa_wg) a / a_in - 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError
from .params import DriveParams, SystemParams

#: condition-number estimate above which a system counts as degenerate
COND_MAX = 1e12

#: relative singular-value cutoff used to identify an exact null space
_NULL_CUTOFF = 1e-13


@dataclass(frozen=True)
class LinearSystem:
    """Dense complex steady-state system; index 0 is the cavity mode."""

    matrix: np.ndarray
    rhs: np.ndarray


@dataclass(frozen=True)
class SteadyState:
    """Steady-state amplitudes and the derived reflection amplitude."""

    a: complex
    sigma: np.ndarray
    r: complex
    R: float


def _assemble(
    positions: np.ndarray,
    gamma_L,
    gamma_R,
    g: float,
    kappa_wg: float,
    kappa_sc: float,
    xi,
    delta,
    delta_c,
    a_in: complex = 1.0,
    independent_atoms: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Build (matrix, rhs) with arbitrary broadcastable leading axes.

    ``gamma_L``, ``gamma_R``, ``xi``, ``delta`` and ``delta_c`` may be
    scalars or arrays of a common broadcast shape; the result then has
    shape ``broadcast + (n+1, n+1)``.
    """
    pos = np.asarray(positions, dtype=float)
    n = pos.size
    gamma_L, gamma_R, xi, delta, delta_c = np.broadcast_arrays(
        gamma_L, gamma_R, xi, delta, delta_c
    )
    lead = delta.shape
    kappa = kappa_wg + kappa_sc

    matrix = np.zeros(lead + (n + 1, n + 1), dtype=complex)
    matrix[..., 0, 0] = 1j * delta_c - kappa / 2.0
    if n:
        sep = pos[None, :] - pos[:, None]  # sep[mu, nu] = p_nu - p_mu
        if not independent_atoms:
            phase = np.exp(1j * np.multiply.outer(xi, np.abs(sep)))
            gl = gamma_L[..., None, None]
            gr = gamma_R[..., None, None]
            block = np.where(sep > 0, -gl * phase, 0.0) + np.where(
                sep < 0, -gr * phase, 0.0
            )
            matrix[..., 1:, 1:] = block
        idx = np.arange(1, n + 1)
        matrix[..., idx, idx] = (1j * delta - 0.5)[..., None]
        cav_phase = np.exp(1j * np.multiply.outer(xi, pos))
        matrix[..., 0, 1:] = -1j * g * np.conj(cav_phase)
        matrix[..., 1:, 0] = -1j * g * cav_phase

    rhs = np.zeros(lead + (n + 1,), dtype=complex)
    rhs[..., 0] = -np.sqrt(kappa_wg) * a_in
    return matrix, rhs


def build_linear_system(
    params: SystemParams,
    drive: DriveParams,
    positions=None,
    independent_atoms: bool = False,
) -> LinearSystem:
    """Steady-state system for ``params`` under ``drive``.

    ``positions`` selects atom sites in units of the lattice spacing
    (default: 0 .. n_atoms-1).  ``independent_atoms=True`` zeroes the
    atom-atom block, keeping each atom's full decay rate: the reference
    configuration of cavity-coupled but mutually uncoupled atoms.
    """
    if positions is None:
        positions = np.arange(params.n_atoms)
    matrix, rhs = _assemble(
        positions,
        params.gamma_L,
        params.gamma_R,
        params.g,
        params.kappa_wg,
        params.kappa_sc,
        params.xi,
        drive.delta,
        drive.delta_c,
        drive.a_in,
        independent_atoms=independent_atoms,
    )
    return LinearSystem(matrix=matrix, rhs=rhs)


def _solve_degenerate(matrix: np.ndarray, rhs: np.ndarray, context: str) -> np.ndarray:
    """Resolve a singular system if its null modes are genuinely dark.

    A mode may be exactly degenerate (e.g. the undamped subradiant pair
    mode at gamma_L = 1/2, xi = n*pi, delta = 0).  If every null vector
    is simultaneously a left and right null vector and carries no drive,
    the mode is never populated when relaxing from vacuum and the
    physical steady state is the minimum-norm solution.  Anything else
    is a true degeneracy and raises SolverError.
    """
    solution, _, rank, sv = np.linalg.lstsq(matrix, rhs, rcond=_NULL_CUTOFF)
    scale = sv[0] if sv.size else 0.0
    residual = np.linalg.norm(matrix @ solution - rhs)
    if residual > 1e-8 * max(1.0, np.linalg.norm(rhs)):
        raise SolverError(
            f"steady-state system is inconsistent (residual {residual:.3e}) for {context}"
        )
    _, s, vh = np.linalg.svd(matrix)
    null_vectors = vh[rank:].conj()
    for vec in null_vectors:
        if (
            np.linalg.norm(vec.conj() @ matrix) > 1e-10 * scale
            or abs(vec.conj() @ rhs) > 1e-10 * np.linalg.norm(rhs)
        ):
            raise SolverError(
                f"steady-state system is singular with a driven null mode for {context}"
            )
    return solution


def solve_steady_state(
    system: LinearSystem, params: SystemParams, drive: DriveParams
) -> SteadyState:
    """Solve the linear system exactly and package the reflection amplitude."""
    matrix, rhs = system.matrix, system.rhs
    cond = np.linalg.cond(matrix)
    context = f"params={params}, drive={drive}"
    if not np.isfinite(cond) or cond > COND_MAX:
        solution = _solve_degenerate(matrix, rhs, context)
    else:
        solution = np.linalg.solve(matrix, rhs)
    return _steady_state_from(solution, params, drive)


def _steady_state_from(
    solution: np.ndarray, params: SystemParams, drive: DriveParams
) -> SteadyState:
    a = complex(solution[0])
    r = np.sqrt(params.kappa_wg) * a / drive.a_in - 1.0
    return SteadyState(a=a, sigma=solution[1:].copy(), r=complex(r), R=abs(r) ** 2)


def reflectivity(
    params: SystemParams,
    drive: DriveParams,
    positions=None,
    independent_atoms: bool = False,
) -> float:
    """Reflectivity R = |r|^2 (build + solve convenience)."""
    system = build_linear_system(
        params, drive, positions=positions, independent_atoms=independent_atoms
    )
    return solve_steady_state(system, params, drive).R


def reflection_amplitude(
    params: SystemParams,
    drive: DriveParams,
    positions=None,
    independent_atoms: bool = False,
) -> complex:
    """Complex reflection amplitude r for a single drive point."""
    system = build_linear_system(
        params, drive, positions=positions, independent_atoms=independent_atoms
    )
    return solve_steady_state(system, params, drive).r


def reflectivity_batch(
    params: SystemParams,
    delta,
    gamma_L=None,
    xi=None,
    positions=None,
    independent_atoms: bool = False,
) -> np.ndarray:
    """R over broadcastable arrays of (delta, gamma_L, xi), delta_c locked.

    Sweep points are independent; they are solved as one batched dense
    solve with results in grid order.  Points whose matrix is degenerate
    fall back to the dark-mode-aware single-point path; errors from that
    path are annotated with the flat grid index.
    """
    if positions is None:
        positions = np.arange(params.n_atoms)
    gamma_L = params.gamma_L if gamma_L is None else gamma_L
    xi = params.xi if xi is None else xi
    gamma_L, xi, delta = np.broadcast_arrays(gamma_L, xi, delta)
    gamma_R = 1.0 - gamma_L
    matrix, rhs = _assemble(
        positions,
        gamma_L,
        gamma_R,
        params.g,
        params.kappa_wg,
        params.kappa_sc,
        xi,
        delta,
        delta,
        independent_atoms=independent_atoms,
    )
    lead = delta.shape
    flat_m = matrix.reshape((-1,) + matrix.shape[-2:])
    flat_b = rhs.reshape((-1,) + rhs.shape[-1:])
    cond = np.linalg.cond(flat_m)
    bad = ~np.isfinite(cond) | (cond > COND_MAX)
    solutions = np.empty_like(flat_b)
    if np.any(~bad):
        solutions[~bad] = np.linalg.solve(flat_m[~bad], flat_b[~bad][..., None])[..., 0]
    for i in np.nonzero(bad)[0]:
        try:
            solutions[i] = _solve_degenerate(flat_m[i], flat_b[i], f"grid index {i}")
        except SolverError as exc:
            raise SolverError(f"{exc} (flat grid index {i})") from exc
    r = np.sqrt(params.kappa_wg) * solutions[..., 0] - 1.0
    return (np.abs(r) ** 2).reshape(lead)


def _gershgorin_bound(matrix: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(matrix), axis=1)))


def relax_time_domain(
    params: SystemParams,
    drive: DriveParams,
    t_max: float = 1e8,
    dt: float | None = None,
    tol: float = 1e-9,
    positions=None,
    independent_atoms: bool = False,
) -> SteadyState:
    """Steady state by integrating the equations of motion from vacuum.

    Verification oracle independent of the linear-algebra solve path:
    a fixed-step classical 4th-order Runge-Kutta scheme for
    v' = M v - rhs starting from v = 0.  Because the equilibrium of the
    flow is a fixed point of every Runge-Kutta step, the iteration
    converges to the exact steady state irrespective of the step size;
    the step only has to sit inside the stability region, which
    dt = 1/(Gershgorin bound) guarantees.  The march is performed by
    repeated squaring of the one-step affine map, so slowly relaxing
    (narrow-dip) parameter points cost log rather than linear time.

    Convergence is declared when the state change across a doubling of
    the integration horizon drops below ``tol`` while decaying; failure
    to converge within ``t_max`` raises SolverError with the residual.
    """
    if positions is None:
        positions = np.arange(params.n_atoms)
    matrix, rhs = _assemble(
        positions,
        params.gamma_L,
        params.gamma_R,
        params.g,
        params.kappa_wg,
        params.kappa_sc,
        params.xi,
        drive.delta,
        drive.delta_c,
        drive.a_in,
        independent_atoms=independent_atoms,
    )
    dim = matrix.shape[0]
    bound = _gershgorin_bound(matrix)
    h = dt if dt is not None else (1.0 / bound if bound > 0 else 1.0)

    # one RK4 step of v' = M v - rhs is the affine map v -> P v + s
    hm = h * matrix
    eye = np.eye(dim, dtype=complex)
    horner = eye / 6.0 + hm / 24.0
    horner = eye / 2.0 + hm @ horner
    horner = eye + hm @ horner
    propagator = eye + hm @ horner
    offset = -h * horner @ rhs

    # doubling march: (P, s) for 2^k steps composes as (P @ P, P s + s),
    # and the state reached from v = 0 after 2^k steps is s itself
    state = offset  # state after one step from v = 0
    horizon = h
    change_prev = np.inf
    while horizon <= t_max:
        state_next = propagator @ state + state  # state after 2*horizon
        change = float(np.linalg.norm(state_next - state))
        if change < tol * max(1.0, float(np.linalg.norm(state_next))) and (
            change <= change_prev
        ):
            return _steady_state_from(state_next, params, drive)
        propagator = propagator @ propagator
        state = state_next
        change_prev = change
        horizon *= 2.0
    residual = np.linalg.norm(matrix @ state - rhs)
    raise SolverError(
        f"relaxation did not converge within t_max={t_max:g} "
        f"(state change {change_prev:.3e}, residual {residual:.3e}) "
        f"for params={params}, drive={drive}"
    )
