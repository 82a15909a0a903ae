"""Reflectivity sweeps, dip/peak localization and figure datasets.

Sweep engines evaluate R = |r|^2 on detuning grids or on the
on-resonance (xi, gamma_L) plane through the general-N solver.  Grid
extrema are refined on the continuous curve by golden-section search and
characterized by their full width at half prominence, which stays well
defined for dips sitting on a curved background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import find_peaks

from .errors import DipNotFoundError
from .params import DriveParams, SystemParams, cooperativity
from .solver import reflectivity, reflectivity_batch
from .tables import DataTable, fmt

#: default detuning grid for dip work: dips at high C are narrow, so the
#: grid only brackets candidates and golden-section refinement finishes
DIP_SPAN = 3.0
DIP_POINTS = 4001

#: default minimum prominence in R separating real interference dips
#: from floating-point ripple
PROMINENCE_MIN = 1e-3

#: |delta| tolerance of the golden-section refinement, units of gamma
REFINE_TOL = 1e-6


@dataclass(frozen=True)
class Feature:
    """One spectral extremum: location, depth/height and width."""

    kind: str  # "dip" or "peak"
    delta: float
    value: float
    width: float  # full width at half prominence
    prominence: float


@dataclass(frozen=True)
class Spectrum:
    """Sampled reflectivity curve R(delta) plus detected features."""

    params: SystemParams
    deltas: np.ndarray
    values: np.ndarray
    features: tuple[Feature, ...] = ()

    def __post_init__(self) -> None:
        if np.any(np.diff(self.deltas) <= 0):
            raise ValueError("delta grid must be strictly increasing")


@dataclass(frozen=True)
class Map2D:
    """On-resonance reflectivity over the (xi, gamma_L) plane."""

    xi_grid: np.ndarray
    gamma_L_grid: np.ndarray
    values: np.ndarray  # shape (len(xi_grid), len(gamma_L_grid))


def golden_section_minimize(f, lo: float, hi: float, tol: float = REFINE_TOL) -> float:
    """Locate the minimum of a unimodal function on [lo, hi] to within tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def sweep_delta(
    params: SystemParams, delta_min: float, delta_max: float, n_points: int
) -> Spectrum:
    """Reflectivity on a uniform detuning grid (delta_c locked to delta)."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if not delta_max > delta_min:
        raise ValueError("delta_max must exceed delta_min")
    deltas = np.linspace(delta_min, delta_max, n_points)
    values = reflectivity_batch(params, deltas)
    return Spectrum(params=params, deltas=deltas, values=values)


def sweep_2d(params_template: SystemParams, xi_grid, gamma_L_grid) -> Map2D:
    """On-resonance reflectivity at every (xi, gamma_L) grid point."""
    xi_grid = np.asarray(xi_grid, dtype=float)
    gamma_L_grid = np.asarray(gamma_L_grid, dtype=float)
    if xi_grid.size == 0 or gamma_L_grid.size == 0:
        raise ValueError("grids must be nonempty")
    values = reflectivity_batch(
        params_template,
        delta=0.0,
        gamma_L=gamma_L_grid[None, :],
        xi=xi_grid[:, None],
    )
    return Map2D(xi_grid=xi_grid, gamma_L_grid=gamma_L_grid, values=values)


def _bisect_crossing(f, level: float, inside: float, outside: float) -> float:
    """Abscissa where f crosses ``level`` between inside (f<level side
    for dips) and outside; bisection on the continuous curve."""
    f_in = f(inside)
    below = f_in < level
    lo, hi = inside, outside
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if (f(mid) < level) == below:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _refine_feature(spec: Spectrum, index: int, prominence: float, kind: str) -> Feature:
    deltas, values = spec.deltas, spec.values
    params = spec.params
    sign = 1.0 if kind == "dip" else -1.0

    def f(delta: float) -> float:
        return reflectivity(params, DriveParams(delta=delta))

    delta0 = golden_section_minimize(
        lambda d: sign * f(d), deltas[index - 1], deltas[index + 1]
    )
    value0 = f(delta0)
    level = value0 + sign * prominence / 2.0

    # walk the sampled grid outward until the curve crosses the
    # half-prominence level, then bisect the continuous curve
    def edge(direction: int) -> float:
        j = index
        while 0 <= j + direction < len(deltas):
            j += direction
            if sign * (values[j] - level) >= 0:
                return _bisect_crossing(f, level, deltas[j - direction], deltas[j])
        return deltas[j]  # level never reached before the grid edge

    width = edge(+1) - edge(-1)
    return Feature(kind=kind, delta=delta0, value=value0, width=width, prominence=prominence)


def find_features(spec: Spectrum, prominence_min: float = PROMINENCE_MIN) -> tuple[Feature, ...]:
    """Locate and refine all dips and peaks above ``prominence_min``.

    Grid candidates come from topographic prominence on the sampled
    curve; each is then refined by golden-section search on the
    continuous R(delta).  Assumes the grid is dense enough that adjacent
    features are separated by at least three grid points.
    """
    if spec.deltas.size == 0:
        raise ValueError("empty spectrum")
    features: list[Feature] = []
    for kind, signal in (("dip", -spec.values), ("peak", spec.values)):
        candidates, props = find_peaks(signal, prominence=prominence_min)
        for pos, prom in zip(candidates, props["prominences"]):
            if pos == 0 or pos == len(spec.deltas) - 1:
                continue
            features.append(_refine_feature(spec, int(pos), float(prom), kind))
    return tuple(sorted(features, key=lambda feat: feat.delta))


def with_features(spec: Spectrum, prominence_min: float = PROMINENCE_MIN) -> Spectrum:
    """Copy of ``spec`` with its feature list populated."""
    return replace(spec, features=find_features(spec, prominence_min))


def dip_detunings(
    params: SystemParams,
    n_coupled: int,
    span: float = DIP_SPAN,
    n_points: int = DIP_POINTS,
    prominence_min: float = PROMINENCE_MIN,
) -> list[float]:
    """Refined dip locations of the ``n_coupled``-atom system.

    The n_coupled-atom spectrum carries n_coupled - 1 dips in the
    directional regime; for even counts this includes the on-resonance
    dip at delta = 0.
    """
    if n_coupled < 2:
        raise ValueError("n_coupled must be >= 2")
    sub = replace(params, n_atoms=int(n_coupled))
    spec = sweep_delta(sub, -span, span, n_points)
    dips = [feat for feat in find_features(spec, prominence_min) if feat.kind == "dip"]
    if not dips:
        raise DipNotFoundError(
            f"no dip above prominence {prominence_min} for n_coupled={n_coupled}"
        )
    return [feat.delta for feat in dips]


# ---------------------------------------------------------------------------
# figure-reproduction datasets


def table_meta(params: SystemParams, dataset: str, curve: str, **extra) -> dict[str, str]:
    meta = {
        "dataset": dataset,
        "curve": curve,
        "n_atoms": str(params.n_atoms),
        "gamma_L": fmt(params.gamma_L),
        "gamma_R": fmt(params.gamma_R),
        "g": fmt(params.g),
        "kappa_wg": fmt(params.kappa_wg),
        "kappa_sc": fmt(params.kappa_sc),
        "xi": fmt(params.xi),
        "cooperativity": fmt(cooperativity(params)) if params.kappa > 0 else "nan",
    }
    if params.gamma_mhz is not None:
        meta["gamma_mhz"] = fmt(params.gamma_mhz)
    meta.update({k: str(v) for k, v in extra.items()})
    return meta


def _spectrum_table(name: str, dataset: str, params: SystemParams, **extra) -> DataTable:
    spec = sweep_delta(params, -DIP_SPAN, DIP_SPAN, DIP_POINTS)
    rows = np.column_stack([spec.deltas, spec.values])
    return DataTable(
        name=name,
        columns=("delta_over_gamma", "R"),
        rows=rows,
        meta=table_meta(params, dataset, name, delta_c="locked", **extra),
    )


#: baseline system of the 2D map dataset: (kappa_wg, kappa_sc, g) = (100, 300, 20)
FIG2_PARAMS = SystemParams(
    n_atoms=2, gamma_L=1.0, g=20.0, kappa_wg=100.0, kappa_sc=300.0, xi=0.0
)
FIG2_XI_GRID = np.linspace(0.0, 2.0 * math.pi, 161)
FIG2_GAMMA_L_GRID = np.linspace(0.0, 1.0, 41)

_FIG3_CURVES = (
    ("fig3_N2_C25", dict(n_atoms=2, g=50.0, gamma_L=1.0)),
    ("fig3_N2_C4", dict(n_atoms=2, g=20.0, gamma_L=1.0)),
    ("fig3_N2_C1", dict(n_atoms=2, g=10.0, gamma_L=1.0)),
    ("fig3_N1_C4", dict(n_atoms=1, g=20.0, gamma_L=1.0)),
    ("fig3_N0", dict(n_atoms=0, g=0.0, gamma_L=1.0)),
    ("fig3_N2_C4_gL08", dict(n_atoms=2, g=20.0, gamma_L=0.8)),
)

_FIG3_2_XIS = (
    ("pi8", math.pi / 8),
    ("pi4", math.pi / 4),
    ("3pi8", 3 * math.pi / 8),
    ("5pi8", 5 * math.pi / 8),
    ("3pi4", 3 * math.pi / 4),
    ("7pi8", 7 * math.pi / 8),
)


def _fig2_tables() -> list[DataTable]:
    map2d = sweep_2d(FIG2_PARAMS, FIG2_XI_GRID, FIG2_GAMMA_L_GRID)
    xi_col = np.repeat(map2d.xi_grid, map2d.gamma_L_grid.size)
    gl_col = np.tile(map2d.gamma_L_grid, map2d.xi_grid.size)
    rows = np.column_stack([xi_col, gl_col, map2d.values.ravel()])
    table = DataTable(
        name="fig2_map",
        columns=("xi", "gamma_L", "R"),
        rows=rows,
        meta=table_meta(FIG2_PARAMS, "fig2", "fig2_map", delta="0", sweep="xi,gamma_L"),
    )
    return [table]


def _fig3_tables() -> list[DataTable]:
    tables = []
    for name, overrides in _FIG3_CURVES:
        params = SystemParams(
            kappa_wg=100.0, kappa_sc=300.0, xi=0.0, **overrides
        )
        tables.append(_spectrum_table(name, "fig3", params))
    return tables


def _fig3_2_tables() -> list[DataTable]:
    tables = []
    for label, xi in _FIG3_2_XIS:
        params = replace(FIG2_PARAMS, gamma_L=1.0, gamma_R=None, xi=xi)
        tables.append(
            _spectrum_table(
                f"fig3_2_xi_{label}",
                "fig3_2",
                params,
                xi_selection="representative",
            )
        )
    return tables


def _fig4_tables() -> list[DataTable]:
    tables = []
    for n in (3, 4, 5, 6):
        params = replace(FIG2_PARAMS, n_atoms=n)
        tables.append(_spectrum_table(f"fig4_N{n}", "fig4", params))
    return tables


_FIGURES = {
    "fig2": _fig2_tables,
    "fig3": _fig3_tables,
    "fig3_2": _fig3_2_tables,
    "fig4": _fig4_tables,
}


def figure_data(which: str) -> list[DataTable]:
    """CSV-ready tables for one of the named reference datasets."""
    try:
        builder = _FIGURES[which]
    except KeyError:
        raise ValueError(
            f"unknown figure id {which!r}; expected one of {sorted(_FIGURES)}"
        ) from None
    return builder()
