"""File formats and run configuration.

Touchstone v1 two-port files (RI/MA/DB, Hz through GHz), deterministic grid
CSV with 9-significant-digit scientific formatting and LF endings, branch
CSV for fits, and a sectioned key=value config with a closed key registry.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import GridSpec, FieldFrequencyMap, LAYER_NAMES
from .circuit_model import CircuitParams, calibrated_params, default_params
from .constants import TWO_PI
from .coupled_modes import KittelParams
from .errors import DataError, UsageError
from .fitting import BranchData
from .nrw_extraction import TwoPortSpectrum

_FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
_FMT = "%.8e"  # 9 significant digits, fixed scientific


# ---------------------------------------------------------------- touchstone

@dataclass(frozen=True)
class TouchstoneFile:
    """Parsed two-port Touchstone v1 content."""

    unit: str                 # Hz/kHz/MHz/GHz as written
    fmt: str                  # RI/MA/DB
    resistance: float
    spectrum: TwoPortSpectrum


def _parse_option_line(line: str, lineno: int):
    toks = line[1:].split()
    unit, fmt, res = "GHZ", "MA", 50.0
    i = 0
    seen_param = False
    while i < len(toks):
        tok = toks[i].upper()
        if tok in _FREQ_UNITS:
            unit = tok
        elif tok in ("RI", "MA", "DB"):
            fmt = tok
        elif tok == "R":
            if i + 1 >= len(toks):
                raise DataError(f"line {lineno}: option 'R' missing value")
            try:
                res = float(toks[i + 1])
            except ValueError:
                raise DataError(f"line {lineno}: bad reference resistance "
                                f"{toks[i + 1]!r}") from None
            i += 1
        elif tok == "S":
            seen_param = True
        elif tok in ("Y", "Z", "G", "H"):
            raise DataError(f"line {lineno}: parameter type {tok} not "
                            "supported, only S")
        else:
            raise DataError(f"line {lineno}: unknown option token {toks[i]!r}")
        i += 1
    if not seen_param:
        # v1 default parameter type is S; absent is accepted
        pass
    return unit, fmt, res


def _pair_to_complex(a: float, b: float, fmt: str) -> complex:
    if fmt == "RI":
        return complex(a, b)
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    # angle in degrees, stored as-is under the e^{+i w t} convention
    return mag * np.exp(1j * np.deg2rad(b))


def read_touchstone(path) -> TouchstoneFile:
    """Parse a two-port Touchstone v1 file.

    Column order freq, S11, S21, S12, S22 (v1 two-port convention), one row
    per frequency, 9 numbers per row. Version-2 keyword lines are rejected.
    Errors carry the 1-based line number.
    """
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        lines = fh.readlines()
    unit = fmt = None
    res = 50.0
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            raise DataError(f"line {lineno}: Touchstone v2 keyword "
                            f"{line.split(']')[0]}] not supported, use v1")
        if line.startswith("#"):
            if unit is not None:
                raise DataError(f"line {lineno}: duplicate option line")
            unit, fmt, res = _parse_option_line(line, lineno)
            continue
        toks = line.split()
        if len(toks) != 9:
            raise DataError(f"line {lineno}: expected 9 columns "
                            f"(freq + 4 S-parameter pairs), got {len(toks)}")
        try:
            vals = [float(t) for t in toks]
        except ValueError:
            raise DataError(f"line {lineno}: non-numeric data") from None
        rows.append((lineno, vals))
    if unit is None:
        raise DataError("missing option line (expected '# <unit> S <fmt> R <res>')")
    if not rows:
        raise DataError("no data rows")
    scale = _FREQ_UNITS[unit]
    freqs = np.array([v[0] for _, v in rows]) * scale
    bad = np.nonzero(np.diff(freqs) <= 0)[0]
    if len(bad):
        lineno = rows[int(bad[0]) + 1][0]
        raise DataError(f"line {lineno}: frequencies not strictly increasing")
    data = {}
    for k, name in enumerate(("s11", "s21", "s12", "s22")):
        data[name] = np.array([_pair_to_complex(v[1 + 2 * k], v[2 + 2 * k], fmt)
                               for _, v in rows])
    spectrum = TwoPortSpectrum(freqs=freqs, **data)
    return TouchstoneFile(unit=unit.capitalize().replace("hz", "Hz"),
                          fmt=fmt, resistance=res, spectrum=spectrum)


def write_touchstone(spectrum: TwoPortSpectrum, path, unit: str = "GHz",
                     resistance: float = 50.0) -> None:
    """Write a two-port spectrum as Touchstone v1, RI format."""
    key = unit.upper()
    if key not in _FREQ_UNITS:
        raise UsageError(f"unknown frequency unit {unit!r}")
    scale = _FREQ_UNITS[key]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"# {unit} S RI R {resistance:g}\n")
        for i in range(len(spectrum.freqs)):
            cells = [_FMT % (spectrum.freqs[i] / scale)]
            for s in (spectrum.s11, spectrum.s21, spectrum.s12, spectrum.s22):
                cells.append(_FMT % s[i].real)
                cells.append(_FMT % s[i].imag)
            fh.write(" ".join(cells) + "\n")


# ----------------------------------------------------------------- grid csv

def write_grid_csv(fmap: FieldFrequencyMap, path, layers=None) -> None:
    """Write a map as CSV: field_mT, freq_GHz, then the requested layers.

    Rows are field-major, frequency ascending; masked points print "nan";
    values use 9-significant-digit scientific notation and LF endings, so
    identical maps produce byte-identical files.
    """
    if layers is None:
        layers = [name for name in LAYER_NAMES if name in fmap.layers]
    missing = [name for name in layers if name not in fmap.layers]
    if missing:
        raise UsageError(f"unknown layers requested: {', '.join(missing)}")
    arrays = [fmap.layers[name] for name in layers]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(["field_mT", "freq_GHz"] + list(layers)) + "\n")
        for i, h in enumerate(fmap.fields):
            h_cell = _FMT % (h * 1e3)
            for j, f in enumerate(fmap.freqs):
                cells = [h_cell, _FMT % (f / 1e9)]
                for arr in arrays:
                    v = arr[i, j]
                    cells.append("nan" if not np.isfinite(v) else _FMT % v)
                fh.write(",".join(cells) + "\n")


def read_grid_csv(path) -> FieldFrequencyMap:
    """Read a grid CSV back into a map (inverse of write_grid_csv)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        names = header.split(",")
        if names[:2] != ["field_mT", "freq_GHz"]:
            raise DataError("grid CSV must start with field_mT,freq_GHz columns")
        layer_names = names[2:]
        raw = np.loadtxt(fh, delimiter=",", ndmin=2)
    if raw.shape[1] != len(names):
        raise DataError(f"grid CSV rows have {raw.shape[1]} columns, header "
                        f"names {len(names)}")
    h_col = raw[:, 0] * 1e-3
    f_col = raw[:, 1] * 1e9
    fields = np.unique(h_col)
    freqs = np.unique(f_col)
    if len(fields) * len(freqs) != len(raw):
        raise DataError(f"row count {len(raw)} is not |fields| x |freqs| = "
                        f"{len(fields)} x {len(freqs)}")
    shape = (len(fields), len(freqs))
    layers = {name: raw[:, 2 + k].reshape(shape)
              for k, name in enumerate(layer_names)}
    if layer_names:
        masked = ~np.isfinite(layers[layer_names[0]])
    else:
        masked = np.zeros(shape, dtype=bool)
    return FieldFrequencyMap(fields=fields, freqs=freqs, layers=layers,
                             masked=masked, meta={"source": str(path)})


# --------------------------------------------------------------- branch csv

def read_branch_csv(path) -> BranchData:
    """Read hybrid-branch data: field_mT,branch,f_GHz,half_linewidth_MHz."""
    rows = {"upper": [], "lower": []}
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        expected = ["field_mT", "branch", "f_GHz", "half_linewidth_MHz"]
        if header != expected:
            raise DataError(f"branch CSV header must be {','.join(expected)}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            toks = line.split(",")
            if len(toks) != 4:
                raise DataError(f"line {lineno}: expected 4 columns")
            if toks[1] not in rows:
                raise DataError(f"line {lineno}: branch must be upper|lower")
            try:
                h = float(toks[0]) * 1e-3
                w = TWO_PI * float(toks[2]) * 1e9
                dw = TWO_PI * float(toks[3]) * 1e6
            except ValueError:
                raise DataError(f"line {lineno}: non-numeric data") from None
            rows[toks[1]].append((h, complex(w, -dw)))
    sets = {name: vals for name, vals in rows.items() if vals}
    if not sets:
        raise DataError("branch CSV has no data rows")
    fields0 = [h for h, _ in next(iter(sets.values()))]
    for name, vals in sets.items():
        if [h for h, _ in vals] != fields0:
            raise DataError("upper and lower branches must share one field axis")
    kwargs = {name: np.array([v for _, v in vals]) for name, vals in sets.items()}
    return BranchData(fields=np.array(fields0), **kwargs)


# ------------------------------------------------------------------- config

CONFIG_KEYS = {
    "circuit": {"profile", "ls_m", "l_isrr_ratio", "m0", "mc", "g", "yig_ext"},
    "film": {"gamma_GHz_per_T", "ms_T", "alpha"},
    "grid": {"f_min_GHz", "f_max_GHz", "n_f", "h_min_mT", "h_max_mT", "n_h"},
    "run": {"direction", "output"},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration resolved to concrete objects."""

    params: CircuitParams
    grid: GridSpec = field(default_factory=GridSpec)
    direction: str = "forward"
    output: str | None = None


def parse_complex(text: str) -> complex:
    """Parse a complex literal accepting either i or j as the unit."""
    try:
        return complex(text.strip().replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot parse complex value {text!r}") from None


def read_config(path) -> RunConfig:
    """Read a sectioned key=value config; unknown sections/keys are errors.

    Units are encoded in key names (mT, GHz, m); ``circuit.profile`` selects
    the default or calibrated parameter set, remaining keys override it.
    """
    cp = configparser.ConfigParser(interpolation=None, strict=True)
    cp.optionxform = str
    try:
        with open(path, "r", encoding="ascii") as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise DataError(f"config parse error: {exc}") from None
    for section in cp.sections():
        if section not in CONFIG_KEYS:
            raise DataError(f"unknown config section [{section}]; known: "
                            f"{', '.join(sorted(CONFIG_KEYS))}")
        for key in cp[section]:
            if key not in CONFIG_KEYS[section]:
                raise DataError(
                    f"unknown config key {section}.{key}; known keys in "
                    f"[{section}]: {', '.join(sorted(CONFIG_KEYS[section]))}")

    def get(section, key, cast, default=None):
        if cp.has_option(section, key):
            raw = cp.get(section, key)
            try:
                return cast(raw)
            except (ValueError, UsageError):
                raise DataError(f"config {section}.{key}: cannot parse "
                                f"{raw!r}") from None
        return default

    profile = get("circuit", "profile", str, "default")
    ls = get("circuit", "ls_m", float, 0.005)
    if profile == "default":
        params = default_params(ls=ls)
    elif profile == "calibrated":
        params = calibrated_params(ls=ls)
    else:
        raise DataError(f"circuit.profile must be default|calibrated, "
                        f"got {profile!r}")
    if cp.has_option("circuit", "l_isrr_ratio"):
        ratio = get("circuit", "l_isrr_ratio", float)
        l_isrr = ratio * params.l0
        w_t = 1.0 / np.sqrt(params.l_isrr * params.c_isrr)
        q = params.r_isrr / (w_t * params.l_isrr)
        params = replace(params, l_isrr=l_isrr,
                         c_isrr=1.0 / (w_t ** 2 * l_isrr),
                         r_isrr=q * w_t * l_isrr)
    overrides = {}
    for key, cast in (("m0", float), ("mc", parse_complex), ("g", float),
                      ("yig_ext", float)):
        if cp.has_option("circuit", key):
            overrides[key] = get("circuit", key, cast)
    kit = params.kittel
    kit_over = {}
    if cp.has_option("film", "gamma_GHz_per_T"):
        kit_over["gamma_mu0"] = TWO_PI * 1e9 * get("film", "gamma_GHz_per_T", float)
    if cp.has_option("film", "ms_T"):
        kit_over["mu0_Ms"] = get("film", "ms_T", float)
    if cp.has_option("film", "alpha"):
        kit_over["alpha"] = get("film", "alpha", float)
    if kit_over:
        overrides["kittel"] = replace(kit, **kit_over)
    if overrides:
        params = replace(params, **overrides)

    grid = GridSpec(
        f_min=1e9 * get("grid", "f_min_GHz", float, 2.8),
        f_max=1e9 * get("grid", "f_max_GHz", float, 4.2),
        n_f=get("grid", "n_f", int, 701),
        h_min=1e-3 * get("grid", "h_min_mT", float, 40.0),
        h_max=1e-3 * get("grid", "h_max_mT", float, 80.0),
        n_h=get("grid", "n_h", int, 401),
    )
    direction = get("run", "direction", str, "forward")
    if direction not in ("forward", "reverse"):
        raise DataError(f"run.direction must be forward|reverse, got "
                        f"{direction!r}")
    output = get("run", "output", str, None)
    return RunConfig(params=params, grid=grid, direction=direction,
                     output=output)


def format_fit_result(result) -> str:
    """FitResult as deterministic structured text."""
    buf = io.StringIO()
    kap = result.kappa
    buf.write(f"kappa_re = {_FMT % kap.real}\n")
    buf.write(f"kappa_im = {_FMT % kap.imag}\n")
    buf.write(f"residual_norm = {_FMT % result.residual_norm}\n")
    buf.write(f"iterations = {result.iterations}\n")
    buf.write(f"converged = {str(result.converged).lower()}\n")
    return buf.getvalue()
