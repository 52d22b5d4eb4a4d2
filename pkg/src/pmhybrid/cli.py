"""Command-line interface.

Subcommands: synth, extract, eigen, sweep, ablate, fit, report. All output
is deterministic; errors go to stderr with a machine-parsable prefix and map
to exit codes 1 (usage), 2 (data), 3 (numerical singularity).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from . import analysis, cli_io
from .circuit_model import (ISRR_FREQ, ISRR_LINEWIDTH, KAPPA_C,
                            MAGNON_LINEWIDTH, calibrated_params,
                            default_params)
from .constants import TWO_PI
from .coupled_modes import (BareMode, Coupling, KittelParams,
                            zero_damping_window)
from .errors import DataError, SingularityError, UsageError
from .fitting import fit_coupling
from .nrw_extraction import de_embed, extract_material

_FMT = cli_io._FMT


def _parse_ratios(text: str):
    """'start:step:stop' inclusive, or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError("ratio range must be start:step:stop")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError:
            raise UsageError(f"cannot parse ratio range {text!r}") from None
        if step <= 0:
            raise UsageError("ratio step must be > 0")
        n = int(round((stop - start) / step)) + 1
        vals = start + step * np.arange(n)
        return vals[vals <= stop + 1e-12]
    try:
        return np.array([float(p) for p in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse ratios {text!r}") from None


def _load_config(args) -> cli_io.RunConfig:
    if getattr(args, "config", None):
        cfg = cli_io.read_config(args.config)
    else:
        cfg = cli_io.RunConfig(params=default_params())
    if getattr(args, "profile", None):
        base = (default_params() if args.profile == "default"
                else calibrated_params())
        cfg = replace(cfg, params=base)
    if getattr(args, "direction", None):
        cfg = replace(cfg, direction=args.direction)
    if getattr(args, "output", None):
        cfg = replace(cfg, output=args.output)
    return cfg


def _cmd_synth(args) -> int:
    cfg = _load_config(args)
    layers = None
    if args.layers is not None:
        layers = [s for s in args.layers.split(",") if s]
        if not layers:
            raise UsageError("synth needs at least one layer")
    fmap = analysis.build_maps(cfg.params, cfg.grid, cfg.direction)
    out = cfg.output or "synth.csv"
    cli_io.write_grid_csv(fmap, out, layers=layers)
    print(f"wrote {out}: {len(fmap.fields)} x {len(fmap.freqs)} grid, "
          f"direction {cfg.direction}")
    return 0


def _cmd_extract(args) -> int:
    total = cli_io.read_touchstone(args.input).spectrum
    if args.background:
        background = cli_io.read_touchstone(args.background).spectrum
        total = de_embed(total, background, mode=args.de_embed)
    mat = extract_material(total, ls=args.ls, direction=args.direction)
    out = args.output or "extract.csv"
    with open(out, "w", encoding="ascii", newline="\n") as fh:
        for jump in mat.jumps:
            fh.write(f"# branch jump at index {jump.index}, "
                     f"{_FMT % (jump.frequency / 1e9)} GHz, size "
                     f"{_FMT % jump.size}\n")
        cols = ["freq_GHz", "n_re", "n_im", "z_re", "z_im", "eps_re",
                "eps_im", "mu_re", "mu_im", "condition", "is_nri",
                "branch_index", "masked"]
        fh.write(",".join(cols) + "\n")
        for i, f in enumerate(mat.freqs):
            if mat.masked[i]:
                row = [_FMT % (f / 1e9)] + ["nan"] * 9 + ["0",
                      str(int(mat.branch_index[i])), "1"]
            else:
                row = [
                    _FMT % (f / 1e9),
                    _FMT % mat.n[i].real, _FMT % -mat.n[i].imag,
                    _FMT % mat.z[i].real, _FMT % mat.z[i].imag,
                    _FMT % mat.eps_eff[i].real, _FMT % -mat.eps_eff[i].imag,
                    _FMT % mat.mu_eff[i].real, _FMT % -mat.mu_eff[i].imag,
                    _FMT % mat.condition[i],
                    "1" if mat.is_nri[i] else "0",
                    str(int(mat.branch_index[i])), "0",
                ]
            fh.write(",".join(row) + "\n")
    print(f"wrote {out}: {len(mat.freqs)} points, "
          f"{int(np.count_nonzero(mat.is_nri))} NRI, "
          f"{len(mat.jumps)} branch jumps")
    return 0


def _eigen_setup(args):
    isrr = BareMode(omega=TWO_PI * args.f_isrr * 1e9,
                    linewidth=TWO_PI * args.linewidth_isrr * 1e6)
    kittel = KittelParams()
    magnon_lw = TWO_PI * args.linewidth_magnon * 1e6
    try:
        lo, hi = (float(p) for p in args.field_range.split(":"))
    except ValueError:
        raise UsageError("field range must be lo_mT:hi_mT") from None
    return isrr, kittel, magnon_lw, (lo * 1e-3, hi * 1e-3)


def _cmd_eigen(args) -> int:
    kappa = cli_io.parse_complex(args.kappa)
    isrr, kittel, magnon_lw, field_range = _eigen_setup(args)
    print("branch,H_minus_mT,H_plus_mT")
    branches = ("upper", "lower") if args.branch == "both" else (args.branch,)
    for branch in branches:
        win = zero_damping_window(isrr, kittel, magnon_lw, Coupling(kappa),
                                  branch=branch, field_range=field_range)
        if win is None:
            print(f"{branch},none,none")
        else:
            print(f"{branch},{_FMT % (win[0] * 1e3)},{_FMT % (win[1] * 1e3)}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    ratios = _parse_ratios(args.ratios)
    results = analysis.coupling_sweep(ratios, cfg.params,
                                      direction=cfg.direction, grid=cfg.grid)
    print("ratio,peak_n,dh_nd_mT,nri_present")
    for r in results:
        peak = "none" if r.peak_n is None else _FMT % r.peak_n
        print(f"{r.ratio:g},{peak},{_FMT % (r.dh_nd * 1e3)},"
              f"{str(r.present).lower()}")
    return 0


def _cmd_ablate(args) -> int:
    cfg = _load_config(args)
    try:
        im_values = [float(p) for p in args.im_values.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse im values {args.im_values!r}") from None
    results = analysis.im_coupling_ablation(im_values, cfg.params, cfg.grid)
    print("im_mc,area_T_Hz,pixels,regions")
    for r in results:
        print(f"{r.im_mc:g},{_FMT % r.area},{r.pixel_count},{r.region_count}")
    return 0


def _cmd_fit(args) -> int:
    data = cli_io.read_branch_csv(args.input)
    isrr = BareMode(omega=TWO_PI * args.f_isrr * 1e9,
                    linewidth=TWO_PI * args.linewidth_isrr * 1e6)
    result = fit_coupling(data, Coupling(cli_io.parse_complex(args.kappa_init)),
                          isrr,
                          magnon_linewidth=TWO_PI * args.linewidth_magnon * 1e6,
                          labeled=not args.unlabeled)
    if args.unlabeled:
        best, other = result
        print("# best fit")
        print(cli_io.format_fit_result(best), end="")
        print("# conjugate start")
        print(cli_io.format_fit_result(other), end="")
    else:
        print(cli_io.format_fit_result(result), end="")
    return 0


def _cmd_report(args) -> int:
    cfg = _load_config(args)
    lines = []
    regions_by_dir = {}
    for direction in ("forward", "reverse"):
        params = cfg.params.with_direction(direction)
        fmap = analysis.build_maps(params, cfg.grid, direction="forward")
        regions = analysis.detect_nri_regions(fmap)
        dom = analysis.dominant_region(regions)
        regions_by_dir[direction] = dom
        lines.append(f"[{direction}]")
        lines.append(f"regions = {len(regions)}")
        if dom is None:
            lines.append("dominant = none")
            continue
        window = analysis.antidamping_window_for(params.mc)
        contain = analysis.correlate_antidamping(dom, window)
        lines.append(f"dominant_min_n = {_FMT % dom.min_n}")
        lines.append(f"dominant_argmin_mT = {_FMT % (dom.argmin_field * 1e3)}")
        lines.append(f"dominant_argmin_GHz = {_FMT % (dom.argmin_freq / 1e9)}")
        lines.append(f"dominant_branch = {dom.branch}")
        lines.append(f"field_span_mT = {_FMT % (dom.field_span * 1e3)}")
        lines.append(f"freq_span_GHz = {_FMT % (dom.freq_span / 1e9)}")
        if window is None:
            lines.append("antidamping_window = none")
        else:
            lines.append(f"antidamping_window_mT = "
                         f"{_FMT % (window[0] * 1e3)}:{_FMT % (window[1] * 1e3)}")
        frac = "none" if contain.fraction is None else _FMT % contain.fraction
        lines.append(f"containment = {frac}")
    fwd, rev = regions_by_dir["forward"], regions_by_dir["reverse"]
    if fwd is not None and rev is not None:
        rep = analysis.direction_disjointness(fwd, rev)
        lines.append("[directions]")
        lines.append(f"argmin_separation_mT = "
                     f"{_FMT % (rep.argmin_separation * 1e3)}")
        lines.append(f"overlap_fraction = {_FMT % rep.overlap_fraction}")
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmhybrid",
        description="Nonreciprocal photon-magnon hybrid circuit modeling")
    sub = parser.add_subparsers(dest="command")

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", help="run configuration file")
            p.add_argument("--profile", choices=["default", "calibrated"])
            p.add_argument("--direction", choices=["forward", "reverse"])
        p.add_argument("--output", help="output path")

    p = sub.add_parser("synth", help="synthesize a (field, frequency) map")
    add_common(p)
    p.add_argument("--layers", help="comma list of layers (default: all)")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("extract", help="extract n/eps/mu from a Touchstone file")
    p.add_argument("--input", required=True)
    p.add_argument("--background", help="background Touchstone for de-embedding")
    p.add_argument("--de-embed", dest="de_embed", default="subtract",
                   choices=["subtract", "ratio"])
    p.add_argument("--ls", type=float, default=0.005,
                   help="line length in m (default 0.005)")
    p.add_argument("--direction", choices=["forward", "reverse"],
                   default="forward")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("eigen", help="hybrid branches and zero-damping fields")
    p.add_argument("--kappa", required=True, help="complex, e.g. 0.0296+0.0088i")
    p.add_argument("--branch", choices=["upper", "lower", "both"],
                   default="both")
    p.add_argument("--f-isrr", type=float, default=ISRR_FREQ / 1e9,
                   help="bare resonator frequency, GHz")
    p.add_argument("--linewidth-isrr", type=float,
                   default=ISRR_LINEWIDTH / TWO_PI / 1e6,
                   help="resonator half linewidth, MHz")
    p.add_argument("--linewidth-magnon", type=float,
                   default=MAGNON_LINEWIDTH / TWO_PI / 1e6,
                   help="magnon half linewidth, MHz")
    p.add_argument("--field-range", default="20:120", help="lo_mT:hi_mT")
    p.set_defaults(func=_cmd_eigen)

    p = sub.add_parser("sweep", help="coupling-ratio sweep")
    add_common(p)
    p.add_argument("--ratios", default="0:0.1:1.5",
                   help="start:step:stop or comma list")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ablate", help="Im(Mc) ablation at fixed Re(Mc)")
    add_common(p)
    p.add_argument("--im-values", default="-0.0028,-0.0024,-0.002,0",
                   help="comma list of Im(Mc) values")
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("fit", help="fit complex coupling to branch data")
    p.add_argument("--input", required=True, help="branch CSV")
    p.add_argument("--kappa-init", default="0.02+0.0i")
    p.add_argument("--f-isrr", type=float, default=ISRR_FREQ / 1e9)
    p.add_argument("--linewidth-isrr", type=float,
                   default=ISRR_LINEWIDTH / TWO_PI / 1e6)
    p.add_argument("--linewidth-magnon", type=float,
                   default=MAGNON_LINEWIDTH / TWO_PI / 1e6)
    p.add_argument("--unlabeled", action="store_true",
                   help="direction unknown: fit kappa and conj(kappa)")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("report", help="NRI region and anti-damping summary")
    add_common(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; map to the usage-error code
        return 0 if exc.code in (0, None) else 1
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        print("pmhybrid: error: usage: a subcommand is required",
              file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pmhybrid: error: usage: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"pmhybrid: error: data: {exc}", file=sys.stderr)
        return 2
    except SingularityError as exc:
        print(f"pmhybrid: error: singularity: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"pmhybrid: error: data: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
