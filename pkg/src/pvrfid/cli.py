"""Command-line front end.

Exit codes: 0 success, 1 configuration or validation error (including bad
command lines), 2 infeasible sizing.  Reports go to stdout, errors to
stderr, CSVs and figures into the --out directory.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import ic, link, pv, simulator, sizing, storage
from .report import RunReport, input_digest, write_csv
from .sizing import InfeasibleSizingError

SUBCOMMANDS = ("iv", "harvest", "load", "simulate", "availability",
               "range", "sweep", "size")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    # The same flags are legal before and after the subcommand.  The
    # subcommand parser writes into the same namespace, so its copies must
    # not clobber values already parsed; SUPPRESS keeps them silent.
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, metavar="PATH",
                   help="config file overlaying the built-in defaults")
    p.add_argument("--out", default=d, metavar="DIR",
                   help="directory for CSVs and figures (default: .)")
    p.add_argument("--dump-config", action="store_true",
                   default=argparse.SUPPRESS if suppress else False,
                   help="print the effective config and exit")
    p.add_argument("--dt", type=float, default=d, metavar="S",
                   help="override the integration step")
    p.add_argument("--seed", type=int, default=d, metavar="N",
                   help="reserved; no randomness in this version")


def build_parser() -> _Parser:
    parser = _Parser(prog="pvrfid",
                     description="PV-powered backscatter sensor-node toolkit")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    for name, help_text in (
            ("iv", "module IV curve and maximum power point"),
            ("harvest", "harvestable power across illumination levels"),
            ("load", "IC power demand vs measurement rate"),
            ("simulate", "time-stepped charge/discharge trace"),
            ("availability", "day-scale availability, energy balance and trace"),
            ("range", "read-range budget, passive vs assisted"),
            ("sweep", "persistence over a capacitance x leak grid"),
            ("size", "smallest PV area and capacitance for a target")):
        sp = sub.add_parser(name, help=help_text)
        _add_common(sp, suppress=True)
        if name == "range":
            sp.add_argument("--threshold-sweep", metavar="CSV", default=None,
                            help="frequency_hz,threshold_dbm file to convert")
            sp.add_argument("--ref-distance", type=float, default=None,
                            metavar="M",
                            help="distance at which thresholds were taken")
    return parser


def _cmd_iv(cfg, out, rep, args):
    model = cfgmod.build_pv(cfg)
    n = cfg["pv.iv_points"]
    volts = np.linspace(0.0, model.voc, n)
    cur = np.array([pv.iv_current(model, v) for v in volts])
    v_mpp, i_mpp, p_mpp = pv.mpp(model)
    path = out / "iv_curve.csv"
    write_csv(path, ["v_V", "i_A", "p_W"],
              zip(volts, cur, volts * cur))
    rep.add_output(path)
    eff = pv.module_efficiency(model, cfg["pv.area_cm2"])
    rep.add("isc_A", model.isc)
    rep.add("voc_V", model.voc)
    rep.add("ff", pv.fill_factor(model))
    rep.add("v_mpp_V", v_mpp)
    rep.add("p_mpp_W", p_mpp)
    rep.add("efficiency_pct", 100.0 * eff)
    from . import figures
    fig = out / "iv_curve.png"
    figures.save_iv_curve(volts, cur * 1e3, volts * cur * 1e3,
                          (v_mpp, i_mpp, p_mpp), fig)
    rep.add_output(fig)
    return 0


def _cmd_harvest(cfg, out, rep, args):
    model = cfgmod.build_pv(cfg)
    area = cfg["pv.area_cm2"]
    rows = []
    for suns in cfg["pv.harvest_suns"]:
        scaled = pv.at_intensity(model, suns)
        _, _, p_mpp = pv.mpp(scaled)
        eff = pv.module_efficiency(scaled, area, irradiance=100.0 * suns)
        rows.append((suns, p_mpp, 100.0 * eff))
    path = out / "harvest.csv"
    write_csv(path, ["intensity_suns", "p_mpp_W", "efficiency_pct"], rows)
    rep.add_output(path)
    _, _, p_full = pv.mpp(model)
    rep.add("p_mpp_1sun_W", p_full)
    rep.add("efficiency_1sun_pct", 100.0 * pv.module_efficiency(model, area))
    from . import figures
    fig = out / "harvest.png"
    figures.save_harvest_curve([r[0] for r in rows],
                               [r[1] * 1e3 for r in rows], fig)
    rep.add_output(fig)
    return 0


def _cmd_load(cfg, out, rep, args):
    profile = cfgmod.build_ic(cfg)
    v = profile.v_threshold
    rows = []
    for rate in cfg["ic.demand_rates_per_hour"]:
        i_avg = ic.average_current(profile, rate)
        rows.append((rate, i_avg, ic.average_power(profile, rate, v)))
    path = out / "demand.csv"
    write_csv(path, ["rate_per_hour", "i_avg_A", "p_avg_W"], rows)
    rep.add_output(path)
    rep.add("p_idle_W", rows[0][2])
    rep.add("p_max_W", rows[-1][2])
    from . import figures
    fig = out / "demand.png"
    figures.save_demand_curve([r[0] for r in rows],
                              [r[2] * 1e6 for r in rows], fig)
    rep.add_output(fig)
    return 0


def _trace_rows(trace):
    for r in trace:
        yield (r.t, r.v, r.mode, r.p_in, r.p_load, r.p_leak,
               r.measurement_count)


TRACE_HEADER = ["t_s", "v_V", "mode", "p_in_W", "p_load_W", "p_leak_W",
                "meas_count"]


def _cmd_simulate(cfg, out, rep, args):
    scenario = cfgmod.build_scenario(cfg, dt=args.dt)
    trace = simulator.simulate(scenario)
    path = out / "trace.csv"
    write_csv(path, TRACE_HEADER, _trace_rows(trace))
    rep.add_output(path)
    thr = scenario.ic.v_threshold
    rep.add("final_v_V", trace[-1].v)
    rep.add("measurements", trace[-1].measurement_count)
    rep.add("on_time_s", simulator.on_time(trace, thr))
    t_thr = simulator.time_to_voltage(trace, thr)
    rep.add("t_threshold_s", "never" if t_thr is None else t_thr)
    from . import figures
    fig = out / "trace.png"
    figures.save_trace([r.t for r in trace], [r.v for r in trace], thr, fig)
    rep.add_output(fig)
    return 0


def _cmd_availability(cfg, out, rep, args):
    scenario = cfgmod.build_scenario(cfg, duration=ic.SECONDS_PER_DAY,
                                     dt=args.dt)
    energy = simulator.availability(scenario)
    trace = simulator.simulate(scenario)
    frac = simulator.trace_availability(trace)
    path = out / "availability.csv"
    write_csv(path, ["method", "availability"],
              [("energy_balance", energy), ("trace_fraction", frac)])
    rep.add_output(path)
    rep.add("availability_energy", energy)
    rep.add("availability_trace", frac)
    return 0


def _cmd_range(cfg, out, rep, args):
    lnk = cfgmod.build_link(cfg)
    profile = cfgmod.build_ic(cfg)
    rows = []
    for label, sens in (("passive", profile.sens_passive),
                        ("assisted", profile.sens_assisted)):
        fwd = link.forward_limited_range(lnk, sens)
        rev = link.reverse_limited_range(lnk)
        rows.append((label, fwd, rev, link.read_range(lnk, sens)))
    path = out / "ranges.csv"
    write_csv(path, ["regime", "forward_m", "reverse_m", "read_m"], rows)
    rep.add_output(path)
    rep.add("read_passive_m", rows[0][3])
    rep.add("read_assisted_m", rows[1][3])
    rep.add("range_ratio",
            link.range_ratio(profile.sens_passive, profile.sens_assisted))
    from . import figures
    fig = out / "range.png"
    figures.save_range_bars([r[0] for r in rows], [r[3] for r in rows], fig)
    rep.add_output(fig)
    if args.threshold_sweep:
        if args.ref_distance is None:
            raise cfgmod.ConfigError(
                "--threshold-sweep requires --ref-distance (the separation "
                "at which thresholds were measured)")
        sweep = link.ThresholdSweep.from_csv(args.threshold_sweep,
                                             args.ref_distance)
        pairs = link.sweep_to_range(sweep, lnk.eirp)
        spath = out / "threshold_ranges.csv"
        write_csv(spath, ["frequency_hz", "range_m"], pairs)
        rep.add_output(spath)
        rep.add("sweep_min_range_m", min(r for _, r in pairs))
        rep.add("sweep_max_range_m", max(r for _, r in pairs))
        sfig = out / "threshold_ranges.png"
        figures.save_threshold_ranges([f for f, _ in pairs],
                                      [r for _, r in pairs], sfig)
        rep.add_output(sfig)
    return 0


def _cmd_sweep(cfg, out, rep, args):
    caps = list(cfg["sizing.sweep_caps_F"])
    leaks = list(cfg["sizing.sweep_leaks_uA"])
    template = simulator.Scenario(
        pv=cfgmod.build_pv(cfg),
        cap=storage.CapacitorModel(capacitance=caps[0],
                                   v_max=cfg["cap.v_max_V"],
                                   leak_current_a=0.0),
        ic=cfgmod.build_ic(cfg),
        schedule=ic.MeasurementSchedule(
            rate_per_hour=cfg["sizing.rate_per_hour"]),
        light=simulator.LightProfile.dark(),
        duration=ic.SECONDS_PER_DAY,
        dt=cfg["sim.dt_s"] if args.dt is None else args.dt,
        initial_v=0.0)
    rows = sizing.persistence_sweep(caps, leaks, template)
    header = ["capacitance_F"] + [f"leak_{format(u, 'g')}uA" for u in leaks]
    path = out / "persistence.csv"
    write_csv(path, header,
              ([c] + row for c, row in zip(caps, rows)))
    rep.add_output(path)
    rep.add("min_availability", min(min(r) for r in rows))
    rep.add("max_availability", max(max(r) for r in rows))
    from . import figures
    fig = out / "persistence.png"
    figures.save_persistence_heatmap(caps, leaks, rows, fig)
    rep.add_output(fig)
    return 0


def _cmd_size(cfg, out, rep, args):
    req = cfgmod.build_sizing_request(cfg)
    area, cap_f, avail = sizing.size_system(req)
    rep.add("area_cm2", area)
    rep.add("capacitance_F", cap_f)
    rep.add("availability", avail)
    rep.add("target", req.target_availability)
    print(f"smallest feasible design: {area:g} cm^2 PV, {cap_f:g} F "
          f"(availability {avail:.6g} >= {req.target_availability:g})")
    return 0


_HANDLERS = {
    "iv": _cmd_iv,
    "harvest": _cmd_harvest,
    "load": _cmd_load,
    "simulate": _cmd_simulate,
    "availability": _cmd_availability,
    "range": _cmd_range,
    "sweep": _cmd_sweep,
    "size": _cmd_size,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = cfgmod.parse_config(args.config)
        if args.dt is not None:
            cfg = cfg.with_overrides({"sim.dt_s": args.dt})
        if args.dump_config:
            sys.stdout.write(cfgmod.dump_config(cfg))
            return 0
        if args.command is None:
            parser.error("a subcommand is required (or --dump-config)")
        out = Path(args.out) if args.out else Path(".")
        out.mkdir(parents=True, exist_ok=True)
        digest = input_digest(cfgmod.dump_config(cfg), args.command,
                              {"dt": args.dt})
        rep = RunReport(command=args.command, digest=digest)
        code = _HANDLERS[args.command](cfg, out, rep, args)
        print(rep.render())
        return code
    except InfeasibleSizingError as exc:
        print(f"pvrfid: infeasible: {exc}", file=sys.stderr)
        return 2
    except (cfgmod.ConfigError, ValueError, OSError) as exc:
        print(f"pvrfid: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
