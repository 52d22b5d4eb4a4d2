"""Grid-level science on (field, frequency) maps.

Builds layered maps from the circuit model, detects negative-index regions
and their extents, correlates them with the coupled-mode anti-damping
window, and runs the coupling-ratio and Im(Mc) sweeps.

A region counts as physically present (not numerical speckle) when it has
at least ``PRESENCE_MIN_CELLS`` grid cells below ``PRESENCE_DEPTH``; the
sweep additionally requires a nonempty anti-damping window from the
coupled-mode model at the same coupling ratio, which is what rules out
stopband slivers at vanishing coupling.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .circuit_model import (CircuitParams, ISRR_FREQ, ISRR_LINEWIDTH, KAPPA_C,
                            MAGNON_LINEWIDTH, material_grid, slab_sparams)
from .constants import ETA0, TWO_PI
from .coupled_modes import (BareMode, Coupling, KittelParams,
                            zero_damping_window)
from .errors import DataError

LAYER_NAMES = ("s21_mag", "s21_arg", "n_re", "n_im", "eps_re", "eps_im",
               "mu_re", "mu_im", "condition")

PRESENCE_MIN_CELLS = 4
PRESENCE_DEPTH = -0.05

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=int)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (field, frequency) grid; defaults match the plot window."""

    f_min: float = 2.8e9
    f_max: float = 4.2e9
    n_f: int = 701
    h_min: float = 40e-3
    h_max: float = 80e-3
    n_h: int = 401

    def __post_init__(self) -> None:
        if self.f_min <= 0 or self.f_max <= self.f_min:
            raise ValueError("need 0 < f_min < f_max")
        if self.h_min < 0 or self.h_max <= self.h_min:
            raise ValueError("need 0 <= h_min < h_max")
        if self.n_f < 1 or self.n_h < 1:
            raise ValueError("grid sizes must be >= 1")

    def freqs(self) -> np.ndarray:
        if self.n_f == 1:
            return np.array([self.f_min])
        return np.linspace(self.f_min, self.f_max, self.n_f)

    def fields(self) -> np.ndarray:
        if self.n_h == 1:
            return np.array([self.h_min])
        return np.linspace(self.h_min, self.h_max, self.n_h)

    def cell_area(self) -> float:
        """Grid cell area in T*Hz (1 for degenerate axes)."""
        df = (self.f_max - self.f_min) / (self.n_f - 1) if self.n_f > 1 else 1.0
        dh = (self.h_max - self.h_min) / (self.n_h - 1) if self.n_h > 1 else 1.0
        return df * dh


@dataclass(frozen=True)
class FieldFrequencyMap:
    """Layered quantities over a rectangular (field, frequency) grid.

    Layers follow the loss-positive notation: n_im is n'' = -Im(n_stored),
    likewise eps_im and mu_im. ``masked`` marks singular points (carried,
    never interpolated); masked layer entries are NaN.
    """

    fields: np.ndarray
    freqs: np.ndarray
    layers: dict
    masked: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        shape = (len(self.fields), len(self.freqs))
        for name, layer in self.layers.items():
            if layer.shape != shape:
                raise DataError(f"layer {name!r} shape {layer.shape} does not "
                                f"match grid {shape}")
        if len(self.fields) >= 2 and not np.all(np.diff(self.fields) > 0):
            raise DataError("field axis must be strictly increasing")
        if len(self.freqs) >= 2 and not np.all(np.diff(self.freqs) > 0):
            raise DataError("frequency axis must be strictly increasing")


@dataclass(frozen=True)
class NriRegion:
    """A connected {n' < 0} component and its extents."""

    rows: np.ndarray          # member field indices
    cols: np.ndarray          # member frequency indices
    pixel_count: int
    min_n: float
    argmin_field: float       # T
    argmin_freq: float        # Hz
    field_span: float         # T, max - min over members
    freq_span: float          # Hz, max - min over members
    field_interval: tuple     # (T, T)
    freq_interval: tuple      # (Hz, Hz)
    branch: str               # "upper" if argmin_freq above the bare tank frequency
    deep_cells: int           # members below PRESENCE_DEPTH


@dataclass(frozen=True)
class SweepResult:
    """One coupling-ratio sweep entry."""

    ratio: float
    peak_n: float | None      # most negative n' among present regions
    dh_nd: float              # anti-damping window width, T
    present: bool


@dataclass(frozen=True)
class AblationResult:
    """One Im(Mc) ablation entry."""

    im_mc: float
    area: float               # qualifying-region pixels x cell area, T*Hz
    pixel_count: int
    region_count: int


@dataclass(frozen=True)
class ContainmentReport:
    """Fraction of a region's field extent inside the anti-damping window."""

    fraction: float | None
    window: tuple | None
    note: str


@dataclass(frozen=True)
class DisjointnessReport:
    """Field-interval geometry of the forward and reverse dominant regions."""

    argmin_separation: float
    overlap_fraction: float   # overlap length / union length of field intervals
    forward_interval: tuple
    reverse_interval: tuple


def build_maps(params: CircuitParams, grid: GridSpec = GridSpec(),
               direction: str = "forward") -> FieldFrequencyMap:
    """Evaluate the circuit over the grid and assemble all layers."""
    fields = grid.fields()
    freqs = grid.freqs()
    mats = material_grid(params, fields, freqs, direction)
    n, eps, mu, z = mats["n"], mats["eps"], mats["mu"], mats["z"]
    masked = mats["masked"]
    z_norm = z * (ETA0 / 50.0)
    s11, s21, smask = slab_sparams(n, z_norm, freqs[None, :], params.ls)
    masked = masked | smask
    cond = eps.real * (-mu.imag) + (-eps.imag) * mu.real
    layers = {
        "s21_mag": np.abs(s21),
        "s21_arg": np.angle(s21),
        "n_re": n.real.copy(),
        "n_im": -n.imag,
        "eps_re": eps.real.copy(),
        "eps_im": -eps.imag,
        "mu_re": mu.real.copy(),
        "mu_im": -mu.imag,
        "condition": cond,
    }
    nanv = float("nan")
    for name in layers:
        layers[name] = np.where(masked, nanv, layers[name])
    w_tank = 1.0 / np.sqrt(params.l_isrr * params.c_isrr)
    meta = {"direction": direction, "omega_isrr": w_tank,
            "f_isrr": w_tank / TWO_PI, "params": params, "grid": grid}
    return FieldFrequencyMap(fields=fields, freqs=freqs, layers=layers,
                             masked=masked, meta=meta)


def detect_nri_regions(fmap: FieldFrequencyMap, min_pixels: int = 4):
    """4-connected components of {n' < 0}, deepest first.

    Components smaller than ``min_pixels`` are discarded as numerical
    speckle. Branch association compares the argmin frequency with the bare
    tank frequency from the map metadata.
    """
    n_re = fmap.layers["n_re"]
    neg = (n_re < 0) & ~fmap.masked & np.isfinite(n_re)
    labels, count = ndimage.label(neg, structure=_FOUR_CONNECTED)
    f_isrr = fmap.meta.get("f_isrr", ISRR_FREQ)
    regions = []
    for i in range(1, count + 1):
        rows, cols = np.nonzero(labels == i)
        if len(rows) < min_pixels:
            continue
        vals = n_re[rows, cols]
        j = int(np.argmin(vals))
        h_lo, h_hi = fmap.fields[rows.min()], fmap.fields[rows.max()]
        f_lo, f_hi = fmap.freqs[cols.min()], fmap.freqs[cols.max()]
        argf = float(fmap.freqs[cols[j]])
        regions.append(NriRegion(
            rows=rows, cols=cols, pixel_count=len(rows),
            min_n=float(vals[j]),
            argmin_field=float(fmap.fields[rows[j]]), argmin_freq=argf,
            field_span=float(h_hi - h_lo), freq_span=float(f_hi - f_lo),
            field_interval=(float(h_lo), float(h_hi)),
            freq_interval=(float(f_lo), float(f_hi)),
            branch="upper" if argf > f_isrr else "lower",
            deep_cells=int(np.count_nonzero(vals < PRESENCE_DEPTH))))
    regions.sort(key=lambda r: r.min_n)
    return regions


def region_is_present(region: NriRegion,
                      min_deep_cells: int = PRESENCE_MIN_CELLS) -> bool:
    """Presence rule: at least ``min_deep_cells`` cells below PRESENCE_DEPTH."""
    return region.deep_cells >= min_deep_cells


def dominant_region(regions):
    """Deepest region passing the presence rule, or None."""
    for region in regions:
        if region_is_present(region):
            return region
    return None


def correlate_antidamping(region, window) -> ContainmentReport:
    """Containment of a region's field extent in the anti-damping window.

    ``window`` is (H_minus, H_plus) in tesla or None. The headline claim
    asserts fraction >= 0.95 on the calibrated model; this op only reports.
    """
    if region is None:
        return ContainmentReport(fraction=None, window=window, note="no region")
    if window is None:
        return ContainmentReport(fraction=None, window=None, note="no interval")
    h_lo, h_hi = region.field_interval
    w_lo, w_hi = window
    extent = h_hi - h_lo
    overlap = max(0.0, min(h_hi, w_hi) - max(h_lo, w_lo))
    if extent == 0.0:
        frac = 1.0 if w_lo <= h_lo <= w_hi else 0.0
    else:
        frac = overlap / extent
    return ContainmentReport(fraction=frac, window=window, note="ok")


def antidamping_window_for(mc: complex, ratio: float = 1.0,
                           kappa_c: complex = KAPPA_C,
                           isrr: BareMode | None = None,
                           kittel: KittelParams | None = None,
                           magnon_linewidth: float = MAGNON_LINEWIDTH,
                           field_range: tuple = (20e-3, 120e-3)):
    """Anti-damping window of the coupled-mode model at a coupling ratio.

    The coupled-mode coupling is ratio * kappa_c with Im sign matched to the
    circuit coupling ``mc`` so the window tracks the same direction. Both
    hybrid branches are checked; at most one can anti-damp. Returns
    (H_minus, H_plus) or None.
    """
    if isrr is None:
        isrr = BareMode(omega=TWO_PI * ISRR_FREQ, linewidth=ISRR_LINEWIDTH)
    if kittel is None:
        kittel = KittelParams()
    kap = complex(kappa_c)
    if mc.imag * kap.imag < 0:
        kap = kap.conjugate()
    coupling = Coupling(kappa=ratio * kap)
    for branch in ("upper", "lower"):
        win = zero_damping_window(isrr, kittel, magnon_linewidth, coupling,
                                  branch=branch, field_range=field_range)
        if win is not None:
            return win
    return None


def coupling_sweep(ratios, params: CircuitParams,
                   direction: str = "forward",
                   grid: GridSpec = GridSpec(),
                   kappa_c: complex = KAPPA_C):
    """Coupling-ratio sweep: per ratio, peak n', anti-damping width, presence.

    The ratio scales Mc uniformly (both components), mapping kappa/kappa_c
    1:1. Presence requires both a deep detected region and a nonempty
    anti-damping window from the coupled-mode model at the same ratio.
    """
    results = []
    base = params.with_direction(direction)
    for ratio in ratios:
        if ratio < 0:
            raise ValueError(f"ratios must be >= 0, got {ratio}")
        p = replace(base, mc=ratio * base.mc)
        fmap = build_maps(p, grid, direction="forward")
        region = dominant_region(detect_nri_regions(fmap))
        if ratio == 0 or base.mc == 0:
            window = None
        else:
            window = antidamping_window_for(p.mc, ratio=ratio, kappa_c=kappa_c)
        dh_nd = 0.0 if window is None else float(window[1] - window[0])
        present = (region is not None) and (dh_nd > 0.0)
        peak = region.min_n if region is not None else None
        results.append(SweepResult(ratio=float(ratio), peak_n=peak,
                                   dh_nd=dh_nd, present=present))
    return results


def im_coupling_ablation(im_values, params: CircuitParams,
                         grid: GridSpec = GridSpec()):
    """NRI area as Im(Mc) is varied at fixed Re(Mc).

    Each entry evaluates the map with mc = Re(params.mc) + i*im and sums the
    pixels of regions passing the presence rule. Area = pixels x cell area.
    """
    results = []
    cell = grid.cell_area()
    for im in im_values:
        p = replace(params, mc=complex(params.mc.real, im))
        fmap = build_maps(p, grid, direction="forward")
        regions = [r for r in detect_nri_regions(fmap) if region_is_present(r)]
        pixels = int(sum(r.pixel_count for r in regions))
        results.append(AblationResult(im_mc=float(im), area=pixels * cell,
                                      pixel_count=pixels,
                                      region_count=len(regions)))
    return results


def direction_disjointness(fwd_region: NriRegion,
                           rev_region: NriRegion) -> DisjointnessReport:
    """Overlap geometry of the two directions' dominant regions."""
    a_lo, a_hi = fwd_region.field_interval
    b_lo, b_hi = rev_region.field_interval
    overlap = max(0.0, min(a_hi, b_hi) - max(a_lo, b_lo))
    union = max(a_hi, b_hi) - min(a_lo, b_lo)
    frac = overlap / union if union > 0 else 0.0
    return DisjointnessReport(
        argmin_separation=abs(fwd_region.argmin_field - rev_region.argmin_field),
        overlap_fraction=frac,
        forward_interval=(a_lo, a_hi), reverse_interval=(b_lo, b_hi))
