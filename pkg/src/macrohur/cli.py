"""Command-line front end.

Configuration is a flat ``key = value`` file (``#`` starts a comment); flags
given on the command line override it.  Recognized keys::

    n, omega0, omega_alpha, gamma, hbar, d, source, out,
    grid           (repeatable, axis:min:max:steps)
    scan_n         (comma-separated list of N for ``scan``)
    n_range        (lo:hi inclusive, for ``threshold``)
    env_ratio      (lambdabar_alpha / R0, for ``report``)
    tol_match, cond_max

Exit status is 0 on success, 2 for invalid input and 1 for numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import closed_form, hur, model, oracle
from ._io import fmt, write_atomic
from .errors import InvalidParameterError, MacroHurError

_FLOAT_KEYS = ("omega0", "omega_alpha", "gamma", "hbar", "d", "env_ratio", "tol_match", "cond_max")
_KEYS = set(_FLOAT_KEYS) | {"n", "source", "out", "grid", "scan_n", "n_range"}


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    omega0: float = 2.0
    omega_alpha: float = 1.0
    gamma: float = 0.1
    hbar: float = 0.05
    d: float | None = None
    source: str | None = None
    out: str = "."
    grid: tuple = ()
    scan_n: tuple = (2, 3, 4)
    n_range: tuple = (2, 4)
    env_ratio: float = 0.5
    tol_match: float = 1e-6
    cond_max: float = oracle.COND_MAX
    n_given: bool = field(default=False, compare=False)

    def __post_init__(self):
        # everything is checked here so a bad config never reaches a command
        model.ModelParams(max(self.n, 1), self.omega0, self.omega_alpha, self.gamma, self.hbar)
        for name in ("env_ratio", "tol_match", "cond_max"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.d is not None and not self.d > 0:
            raise InvalidParameterError(f"d must be positive, got {self.d!r}")
        if any(k < 2 for k in self.scan_n):
            raise InvalidParameterError(f"scan_n entries must be >= 2, got {self.scan_n}")

    def params(self) -> model.ModelParams:
        p = model.ModelParams(self.n, self.omega0, self.omega_alpha, self.gamma, self.hbar)
        if self.gamma == 0:
            raise InvalidParameterError("gamma must satisfy 0 < gamma < 1, got 0")
        return p

    def variance_source(self, n: int) -> str:
        if self.source:
            return self.source
        return "closed_form" if n in (2, 3) else "oracle"


def read_config(path) -> dict:
    values = {"grid": []}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _KEYS:
                raise InvalidParameterError(f"{path}:{lineno}: unknown key {key!r}")
            if key == "grid":
                values["grid"].append(val)
            else:
                values[key] = val
    return values


def _parse_range(text):
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise InvalidParameterError(f"range {text!r} is not lo:hi") from None
    return lo, hi


def build_config(args) -> RunConfig:
    raw = read_config(args.config) if args.config else {"grid": []}
    for key in _KEYS:
        val = getattr(args, key, None)
        if val is None or (key == "grid" and not val):
            continue
        raw[key] = val
    kw = {}
    try:
        for key in _FLOAT_KEYS:
            if key in raw:
                kw[key] = float(raw[key])
        if "n" in raw:
            kw["n"] = int(raw["n"])
            kw["n_given"] = True
        if "scan_n" in raw:
            kw["scan_n"] = tuple(int(v) for v in str(raw["scan_n"]).split(",") if v.strip())
    except ValueError as exc:
        raise InvalidParameterError(str(exc)) from None
    if "n_range" in raw:
        kw["n_range"] = _parse_range(raw["n_range"])
    if raw.get("source"):
        src = str(raw["source"]).replace("-", "_")
        if src not in ("closed_form", "oracle"):
            raise InvalidParameterError(f"source must be closed-form or oracle, got {raw['source']!r}")
        kw["source"] = src
    if raw.get("out"):
        kw["out"] = str(raw["out"])
    grid = tuple(hur.Axis.parse(g) for g in raw["grid"])
    if len(grid) > 2:
        raise InvalidParameterError("at most two --grid axes")
    kw["grid"] = grid
    return RunConfig(**kw)


def _modes(cfg: RunConfig):
    """Mode frequencies for a single point: reduced form if ``d`` is set, full otherwise."""
    if cfg.d is not None:
        cfg.params()
        return model.reduced_modes(cfg.omega_alpha, cfg.gamma, cfg.d)
    return model.normal_modes(cfg.params())


def _point_variances(cfg: RunConfig, modes):
    src = cfg.variance_source(cfg.n)
    if src == "closed_form":
        vq, vp = closed_form.variances(cfg.n, modes.a2, modes.omega_plus, modes.omega_minus, cfg.hbar)
        return float(vq), float(vp), src, None
    conv = oracle.calibrated_convention()
    forms = [
        build(cfg.n, abs(modes.a), abs(modes.b), modes.omega_plus, modes.omega_minus, conv)
        for build in (oracle.build_position_precision, oracle.build_momentum_precision)
    ]
    vq, vp = (oracle.marginal_variance(f, cfg.hbar, cfg.cond_max) for f in forms)
    return vq, vp, src, conv.value


def _summary(pairs) -> str:
    return "".join(f"{k}={v}\n" for k, v in pairs)


def cmd_variances(cfg: RunConfig):
    modes = _modes(cfg)
    vq, vp, src, conv = _point_variances(cfg, modes)
    res = hur.hur_check(vq, vp, cfg.hbar)
    flag = "1" if res.violated else "0"
    csv = ("N,hbar,varQ,varP,product,bound,violated\n"
           f"{cfg.n},{fmt(cfg.hbar)},{fmt(vq)},{fmt(vp)},{fmt(res.product)},{fmt(res.bound)},{flag}\n")
    summary = [("command", "variances"), ("N", cfg.n), ("source", src), ("convention", conv or "none"),
               ("hbar", fmt(cfg.hbar)), ("a2", fmt(modes.a2)), ("omega_plus", fmt(modes.omega_plus)),
               ("omega_minus", fmt(modes.omega_minus)), ("varQ", fmt(vq)), ("varP", fmt(vp)),
               ("product", fmt(res.product)), ("bound", fmt(res.bound)),
               ("violated", "true" if res.violated else "false")]
    text = [f"N={cfg.n} hbar={cfg.hbar:g} source={src}",
            f"  <q^2> = {vq:.6e}   <p^2> = {vp:.6e}",
            f"  product = {res.product:.6e}   bound = {res.bound:.6e}   violated = {res.violated}"]
    if modes.warning:
        text.append(f"warning: {modes.warning}")
    return {"variances.csv": csv, "summary.txt": _summary(summary)}, text


def cmd_threshold(cfg: RunConfig):
    ns = [cfg.n] if cfg.n_given else list(range(cfg.n_range[0], cfg.n_range[1] + 1))
    keep, warn = [], []
    for n in ns:
        if n < 2:
            warn.append(f"warning: skipping N={n}; the threshold needs N >= 2")
        else:
            keep.append(n)
    table = hur.threshold_table(keep)
    summary = [("command", "threshold"), ("rows", len(keep))]
    summary += [(f"hbar_min.N{n}", fmt(hur.violation_threshold(n))) for n in keep]
    return {"thresholds.csv": table, "summary.txt": _summary(summary)}, warn + table.splitlines()


def cmd_scan(cfg: RunConfig):
    axes = cfg.grid or (hur.Axis.default("hbar"), hur.Axis.default("d"))
    ns = [cfg.n] if cfg.n_given else list(cfg.scan_n)
    if not ns:
        raise InvalidParameterError("no N values to scan")
    fixed = {"hbar": cfg.hbar, "omega_alpha": cfg.omega_alpha, "gamma": cfg.gamma}
    if cfg.d is not None:
        fixed["d"] = cfg.d
    text = []
    for ax in axes:
        if ax.name == "hbar" and (ax.lo < model.HBAR_BAND[0] or ax.hi > model.HBAR_BAND[1]):
            text.append(f"warning: hbar axis [{ax.lo:g}, {ax.hi:g}] leaves the macroscopic band (0.01, 0.1)")
    regions = [hur.scan_region(n, axes, fixed, cfg.variance_source(n)) for n in sorted(ns)]
    nest = hur.region_nesting_check(regions)
    outputs = {}
    summary = [("command", "scan"), ("axis1", axes[0].spec()),
               ("axis2", axes[1].spec() if len(axes) > 1 else regions[0].axes[1].spec())]
    summary += [(f"fixed.{k}", fmt(v)) for k, v in sorted(regions[0].fixed.items())]
    for r in regions:
        outputs[f"region_N{r.n}.csv"] = r.to_csv()
        k1 = r.threshold_violated()
        summary += [(f"area_fraction.N{r.n}", fmt(r.area_fraction)),
                    (f"source.N{r.n}", r.source + (f"/{r.convention}" if r.convention else "")),
                    (f"unstable_cells.N{r.n}", r.unstable_count),
                    (f"k1_area_fraction.N{r.n}", fmt(np.count_nonzero(k1) / k1.size)),
                    (f"k1_disagreeing_cells.N{r.n}", int(np.count_nonzero(k1 != r.violated)))]
        text.append(f"N={r.n}: area fraction {r.area_fraction:.4f} "
                    f"({r.source}{'/' + r.convention if r.convention else ''}, "
                    f"{r.unstable_count} unstable cells)")
    summary += [("nesting", "true" if nest.holds else "false"),
                ("nesting_counterexamples", len(nest.counterexamples))]
    text.append(f"nesting {'holds' if nest.holds else 'FAILS'} "
                f"({len(nest.counterexamples)} counterexample cells)")
    outputs["summary.txt"] = _summary(summary)
    return outputs, text


def _rows_csv(rows) -> str:
    lines = ["param1,param2,closed_form,oracle,abs_err,rel_err"]
    for r in rows:
        lines.append(",".join(fmt(v) for v in (r.param1, r.param2, r.closed_form, r.oracle,
                                                 r.abs_err, r.rel_err)))
    return "\n".join(lines) + "\n"


def cmd_oracle_compare(cfg: RunConfig):
    cal = oracle.calibrate(hbar=cfg.hbar, tolerance=cfg.tol_match)
    outputs = {"calibration.txt": oracle.format_calibration(cal)}
    for (conv, n, quantity), rows in sorted(cal.tables.items(), key=lambda kv: (kv[0][0].value, kv[0][1], kv[0][2])):
        outputs[f"deviations_N{n}_{quantity}_{conv.value}.csv"] = _rows_csv(rows)

    a2s = np.round(np.linspace(0.1, 0.9, 9), 12)
    ds = (0.05, 0.25, 0.5, 0.75, 1.0)
    a2_rows = []
    for a2 in a2s:
        for d in ds:
            prod = float(closed_form.variance_q_n3(a2, d, 1.0) * closed_form.variance_p_n3(a2, d, 1.0))
            a2_rows.append(oracle.DeviationRow(float(a2), d, float(closed_form.appendix_product_expression(a2, d)), prod))
    outputs["appendix_a2.csv"] = _rows_csv(a2_rows)

    gammas = np.round(np.linspace(0.05, 0.45, 9), 12)
    ratios = np.round(np.geomspace(0.1, 10.0, 11), 12)
    cons = oracle.parameterization_consistency_report(gammas, ratios, n=cfg.n if cfg.n_given else 2)
    for slot, name in ((0, "plus"), (1, "minus")):
        rows = [oracle.DeviationRow(r.gamma, r.omega_ratio, r.full[slot], r.reduced[slot]) for r in cons.rows]
        outputs[f"parameterization_{name}.csv"] = _rows_csv(rows)

    ref = closed_form.marginal_position_pdf_n2(0.5, 0.8, 1.0, cfg.hbar)
    ref_p = closed_form.marginal_momentum_pdf_n2(0.5, 0.8, 1.0, cfg.hbar)
    const = 1 / (4 * math.pi**2 * 27)
    n3_const = max(abs(float(closed_form.variance_q_n3(r.param1, r.param2, 1.0)
                             * closed_form.variance_p_n3(r.param1, r.param2, 1.0)) - const) for r in a2_rows)
    erratum = [
        ("selected_convention", cal.selected.value),
        ("closed_forms_match_selected", "true" if cal.matched else "false"),
        *((f"max_rel_err.{c.value}", fmt(v)) for c, v in cal.max_rel_err.items()),
        ("density_reference", "a2=0.5;omega_plus=0.8;omega_minus=1"),
        ("position_density_mass_N2", fmt(ref.total_mass)),
        ("momentum_density_mass_N2", fmt(ref_p.total_mass)),
        ("n3_variances_contain_hbar", "false"),
        ("n3_identical_mode_product_constant", fmt(const)),
        ("n3_identical_mode_product_max_abs_dev", fmt(n3_const)),
        ("appendix_a2_value_at_a2_0.5_d_1", fmt(closed_form.appendix_product_expression(0.5, 1.0))),
        ("appendix_a2_max_abs_dev_from_n3_product", fmt(max(r.abs_err for r in a2_rows))),
        ("parameterization_max_abs_dev", fmt(cons.max_abs)),
        ("parameterization_max_rel_dev", fmt(cons.max_rel)),
        ("parameterization_points", len(cons.rows)),
        ("parameterization_skipped", cons.skipped),
    ]
    outputs["erratum.txt"] = _summary(erratum)
    outputs["summary.txt"] = _summary([("command", "oracle-compare"), *erratum])
    text = [f"selected convention: {cal.selected.value} "
            f"(max rel err {cal.max_rel_err[cal.selected]:.3e}, matched={cal.matched})"]
    text += [f"  {c.value}: max rel err {v:.3e}" for c, v in cal.max_rel_err.items()]
    text.append(f"closed-form N=2 position density integrates to {ref.total_mass:.6f}, not 1")
    text.append(f"appendix expression at a2=0.5, d=1: {float(closed_form.appendix_product_expression(0.5, 1.0)):.6e}"
                f" vs N=3 product {const:.6e}")
    return outputs, text


def cmd_report(cfg: RunConfig):
    p = cfg.params()
    modes = _modes(cfg)
    R0 = 1.0
    scales = model.CharacteristicScales(R0=R0, U0=1.0, M=1.0, lambda0=2 * math.pi * cfg.hbar * R0,
                                        lambda_alpha=2 * math.pi * cfg.env_ratio * R0)
    regime = model.classify_regime(p, scales)
    vq, vp, src, _ = _point_variances(cfg, modes)
    res = hur.hur_check(vq, vp, cfg.hbar)
    ratios = closed_form.cho_ratios(cfg.omega0, cfg.omega_alpha, cfg.hbar)
    pairs = [("command", "report"), ("N", cfg.n), ("hbar", fmt(cfg.hbar)),
             ("omega_eff", fmt(p.omega)), ("theta", fmt(modes.theta)), ("tan_2theta", fmt(modes.c)),
             ("omega_plus", fmt(modes.omega_plus)), ("omega_minus", fmt(modes.omega_minus)),
             ("d", fmt(modes.d)), ("regime", regime.kind.value)]
    pairs += [(f"regime.{c.name}", "true" if c.satisfied else "false") for c in regime.diagnostics]
    pairs += [("source", src), ("varQ", fmt(vq)), ("varP", fmt(vp)), ("product", fmt(res.product)),
              ("bound", fmt(res.bound)), ("violated", "true" if res.violated else "false"),
              ("cho_ratio_q", fmt(ratios.ratio_q)), ("cho_ratio_p", fmt(ratios.ratio_p)),
              ("cho_premise", "true" if ratios.premise else "false")]
    if cfg.n >= 2:
        pairs.append(("hbar_min", fmt(hur.violation_threshold(cfg.n))))
    text = [f"{k}: {v}" for k, v in pairs[1:]]
    if modes.warning:
        text.append(f"warning: {modes.warning}")
    return {"summary.txt": _summary(pairs)}, text


COMMANDS = {
    "variances": cmd_variances,
    "threshold": cmd_threshold,
    "scan": cmd_scan,
    "oracle-compare": cmd_oracle_compare,
    "report": cmd_report,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--n", type=int)
    common.add_argument("--omega0", type=float)
    common.add_argument("--omega-alpha", dest="omega_alpha", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--hbar", type=float)
    common.add_argument("--d", type=float)
    common.add_argument("--out", help="output directory (default: current directory)")
    common.add_argument("--source", choices=("closed-form", "oracle"))
    common.add_argument("--grid", action="append", default=[], metavar="AXIS:MIN:MAX:STEPS")
    common.add_argument("--n-range", dest="n_range", metavar="LO:HI")
    parser = argparse.ArgumentParser(prog="macrohur", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        outputs, text = COMMANDS[args.command](cfg)
        write_atomic(outputs, cfg.out)
    except InvalidParameterError as exc:
        print(f"macrohur {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2
    except (MacroHurError, OSError) as exc:
        print(f"macrohur {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for line in text:
        print(line, file=sys.stderr if line.startswith("warning:") else sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
