"""Closed-form reflection amplitudes.

Exact expressions for the empty cavity and for two atoms with chiral
coupling, plus the three on-resonance reference amplitudes used as
regression anchors throughout the test suite.  These are formula-only
(no linear solve), so they can serve as an independent oracle for the
general solver.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .errors import PoleError
from .params import SystemParams


def r_no_atoms(delta: float, kappa_wg: float, kappa_sc: float) -> complex:
    """Empty-cavity reflection amplitude r = kappa_wg / (kappa/2 - i delta) - 1."""
    kappa = kappa_wg + kappa_sc
    denom = kappa / 2.0 - 1j * delta
    if denom == 0:
        raise PoleError("kappa/2 - i*delta = 0 (undriven lossless cavity)")
    return kappa_wg / denom - 1.0


def r_two_atoms(delta: float, params: SystemParams) -> complex:
    """Two-atom chiral reflection amplitude in closed form.

    Solves  kappa_wg / (r + 1) = (kappa/2 - i delta)
              - g^2 [2 (i delta - 1/2) + (e^{2 i xi} gamma_L + gamma_R)]
                / [(i delta - 1/2)^2 - e^{2 i xi} gamma_L gamma_R]
    for r.  Depends on xi only through e^{2 i xi}, hence is pi-periodic
    in the interatomic phase.  Exact poles are reported, never
    regularized; in particular the subradiant point
    (delta = 0, xi = n pi, gamma_L = 1/2) is a genuine 0/0 of this
    expression and raises PoleError.
    """
    d_at = 1j * delta - 0.5
    e2 = cmath.exp(2j * params.xi)
    bracket = d_at * d_at - e2 * params.gamma_L * params.gamma_R
    if bracket == 0:
        raise PoleError(
            "(i*delta - 1/2)^2 - e^{2i xi} gamma_L gamma_R = 0 "
            f"at delta={delta}, xi={params.xi}, gamma_L={params.gamma_L}"
        )
    rhs = (params.kappa / 2.0 - 1j * delta) - params.g**2 * (
        2.0 * d_at + e2 * params.gamma_L + params.gamma_R
    ) / bracket
    if rhs == 0:
        raise PoleError(
            f"kappa_wg/(r+1) expression vanishes at delta={delta}, "
            f"xi={params.xi}, gamma_L={params.gamma_L}"
        )
    return params.kappa_wg / rhs - 1.0


@dataclass(frozen=True)
class ReferenceReflectivities:
    """On-resonance reference amplitudes for two atoms at cooperativity C."""

    r_ind: complex  # independent atoms: 2 kappa_wg (1+2C)^-1 / kappa - 1
    r_d: complex  # directional coupling at xi = pi/2: 2 kappa_wg (1+4C)^-1 / kappa - 1
    r_rec: complex  # reciprocal coupling at xi = pi/2: 2 kappa_wg (1+C)^-1 / kappa - 1


def reference_values(C: float, kappa_wg: float, kappa: float) -> ReferenceReflectivities:
    """The three on-resonance reference amplitudes at cooperativity C >= 0."""
    if C < 0:
        raise ValueError("cooperativity must be >= 0")
    base = 2.0 * kappa_wg / kappa
    return ReferenceReflectivities(
        r_ind=base / (1.0 + 2.0 * C) - 1.0,
        r_d=base / (1.0 + 4.0 * C) - 1.0,
        r_rec=base / (1.0 + C) - 1.0,
    )
