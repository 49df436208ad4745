"""Command-line front end: analyze, branch, presets.

Configuration is a flat key = value file with sections ([system],
[analysis], [branch], [output], [run]); every value can be overridden on
the command line.  Machine output is emitted as json-lines (one record per
line) or csv (header row + fixed column order); identical configuration
and seed produce byte-identical machine output.

Exit codes: analyze returns 0 when at least one candidate is confirmed,
2 when none is, 1 on error.  branch returns 0 when the computed branch has
at least three orbits and healthy trends, 2 when no confirmed candidate is
available, 1 otherwise (partial data is still written).
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis as analysis_mod
from . import model as model_mod
from . import orbits as orbits_mod
from .errors import ConfigParse, HambifError
from .model import HamiltonianSystem, SymmetryGroup

__all__ = ["RunConfig", "parse_config", "main", "console_entry", "cmd_analyze", "cmd_branch", "cmd_presets"]

ANALYZE_COLUMNS = (
    "index",
    "j0",
    "beta",
    "multiplicity",
    "lambda0",
    "period",
    "nonresonant",
    "morse_jump",
    "degree",
    "degree_path",
    "degree_reliable",
    "szulkin",
    "definite_zj",
    "definite_z",
    "mplus",
    "verdict",
    "theorem_path",
    "reasons",
)

BRANCH_COLUMNS = (
    "index",
    "amplitude",
    "lambda",
    "period",
    "residual",
    "sup_distance",
    "minimal_period",
)

COEFF_COLUMNS = ("index", "k", "component", "a", "b")

_PRESET_PARAM_FLAGS = ("omega", "c", "beta", "j2", "r_eq", "frequencies")


@dataclass(frozen=True)
class RunConfig:
    """Parsed run configuration; exactly one of preset / monomials is set."""

    preset: str | None = None
    params: tuple = ()  # sorted (name, value) pairs; value float or tuple of floats
    n: int | None = None
    monomials: tuple = ()  # ((coeff, (e_1, ..., e_2N)), ...)
    generators: tuple = ()  # tuples of row tuples
    guess: tuple | None = None
    k_max: int = 20
    j0: int | None = None
    variants: tuple = analysis_mod.A7_VARIANTS
    steps: int = 8
    s0: float = 1e-3
    growth: float = 2.0
    modes: int = 8
    fmt: str = "text"
    output: str | None = None
    seed: int = 0

    def __post_init__(self):
        if (self.preset is None) == (not self.monomials):
            raise ConfigParse("exactly one of 'preset' or 'monomials' must be given")
        if self.monomials and self.n is None:
            raise ConfigParse("inline monomials require 'n' (half the phase dimension)")
        if self.fmt not in ("text", "json-lines", "csv"):
            raise ConfigParse(f"unknown output format {self.fmt!r}")
        for variant in self.variants:
            if variant not in analysis_mod.A7_VARIANTS:
                raise ConfigParse(f"unknown analysis variant {variant!r}")

    def param_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params}

    def to_ini(self) -> str:
        """Deterministic flat-text serialization; parse_config inverts it."""
        out = ["[system]"]
        if self.preset is not None:
            out.append(f"preset = {self.preset}")
        for key, value in self.params:
            if isinstance(value, tuple):
                out.append(f"{key} = {' '.join(_fmt(v) for v in value)}")
            else:
                out.append(f"{key} = {_fmt(value)}")
        if self.n is not None:
            out.append(f"n = {self.n}")
        if self.monomials:
            parts = [" ".join([_fmt(c)] + [str(e) for e in exps]) for c, exps in self.monomials]
            out.append(f"monomials = {' ; '.join(parts)}")
        for i, gen in enumerate(self.generators, start=1):
            rows = " ; ".join(" ".join(_fmt(v) for v in row) for row in gen)
            out.append(f"generator{i} = {rows}")
        if self.guess is not None:
            out.append(f"guess = {' '.join(_fmt(v) for v in self.guess)}")
        out += [
            "",
            "[analysis]",
            f"kmax = {self.k_max}",
        ]
        if self.j0 is not None:
            out.append(f"j0 = {self.j0}")
        out.append(f"variants = {' '.join(self.variants)}")
        out += [
            "",
            "[branch]",
            f"steps = {self.steps}",
            f"s0 = {_fmt(self.s0)}",
            f"growth = {_fmt(self.growth)}",
            f"modes = {self.modes}",
            "",
            "[output]",
            f"format = {self.fmt}",
        ]
        if self.output is not None:
            out.append(f"path = {self.output}")
        out += ["", "[run]", f"seed = {self.seed}", ""]
        return "\n".join(out)


def _fmt(x) -> str:
    """Shortest exact decimal form (round-trips bit-faithfully)."""
    return repr(float(x))


def _fmt17(x) -> str:
    """Fixed 17-significant-digit form for csv cells."""
    return format(float(x), ".17g")


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split())
    except ValueError as exc:
        raise ConfigParse(f"expected whitespace-separated numbers, got {text!r}") from exc


def parse_config(text: str) -> RunConfig:
    """Parse the flat key = value configuration format."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigParse(f"bad configuration: {exc}") from exc
    kw: dict = {}
    if parser.has_section("system"):
        sec = dict(parser.items("system"))
        if "preset" in sec:
            kw["preset"] = sec.pop("preset")
        if "n" in sec:
            kw["n"] = int(sec.pop("n"))
        if "monomials" in sec:
            monos = []
            for part in sec.pop("monomials").split(";"):
                values = part.split()
                if not values:
                    continue
                monos.append((float(values[0]), tuple(int(e) for e in values[1:])))
            kw["monomials"] = tuple(monos)
        if "guess" in sec:
            kw["guess"] = _floats(sec.pop("guess"))
        gens = []
        for key in sorted(k for k in sec if k.startswith("generator")):
            rows = tuple(_floats(row) for row in sec.pop(key).split(";"))
            gens.append(rows)
        if gens:
            kw["generators"] = tuple(gens)
        params = []
        for key, value in sorted(sec.items()):
            values = _floats(value)
            params.append((key, values if len(values) > 1 else values[0]))
        kw["params"] = tuple(params)
    if parser.has_section("analysis"):
        sec = dict(parser.items("analysis"))
        if "kmax" in sec:
            kw["k_max"] = int(sec["kmax"])
        if "j0" in sec:
            kw["j0"] = int(sec["j0"])
        if "variants" in sec:
            kw["variants"] = tuple(sec["variants"].split())
    if parser.has_section("branch"):
        sec = dict(parser.items("branch"))
        if "steps" in sec:
            kw["steps"] = int(sec["steps"])
        if "s0" in sec:
            kw["s0"] = float(sec["s0"])
        if "growth" in sec:
            kw["growth"] = float(sec["growth"])
        if "modes" in sec:
            kw["modes"] = int(sec["modes"])
    if parser.has_section("output"):
        sec = dict(parser.items("output"))
        if "format" in sec:
            kw["fmt"] = sec["format"]
        if "path" in sec:
            kw["output"] = sec["path"]
    if parser.has_section("run") and parser.has_option("run", "seed"):
        kw["seed"] = int(parser.get("run", "seed"))
    try:
        return RunConfig(**kw)
    except TypeError as exc:
        raise ConfigParse(str(exc)) from exc


def _polynomial_system(config: RunConfig) -> HamiltonianSystem:
    n = config.n
    dim = 2 * n
    coeffs = np.array([c for c, _ in config.monomials])
    exps = []
    for _, e in config.monomials:
        if len(e) != dim:
            raise ConfigParse(f"monomial exponent vector must have {dim} entries, got {len(e)}")
        exps.append(e)
    exps = np.array(exps, dtype=float)

    def energy(z):
        return float(np.sum(coeffs * np.prod(z**exps, axis=1)))

    def gradient(z):
        g = np.zeros(dim)
        for i in range(dim):
            ei = exps[:, i]
            mask = ei > 0
            if not np.any(mask):
                continue
            de = exps[mask].copy()
            de[:, i] -= 1.0
            g[i] = float(np.sum(coeffs[mask] * ei[mask] * np.prod(z**de, axis=1)))
        return g

    def hessian(z):
        h = np.zeros((dim, dim))
        for i in range(dim):
            for jj in range(i, dim):
                ei = exps[:, i]
                ej = exps[:, jj]
                if i == jj:
                    mask = ei > 1
                    factor = ei * (ei - 1.0)
                else:
                    mask = (ei > 0) & (ej > 0)
                    factor = ei * ej
                if not np.any(mask):
                    continue
                de = exps[mask].copy()
                de[:, i] -= 1.0
                de[:, jj] -= 1.0
                val = float(np.sum(coeffs[mask] * factor[mask] * np.prod(z**de, axis=1)))
                h[i, jj] = val
                h[jj, i] = val
        return h

    generators = tuple(np.array(g, dtype=float) for g in config.generators)
    return HamiltonianSystem(
        n=n,
        energy=energy,
        gradient=gradient,
        hessian=hessian,
        symmetry=SymmetryGroup(generators),
        name="inline-polynomial",
    )


def build_system(config: RunConfig) -> tuple:
    """System plus the default equilibrium guess for it."""
    if config.preset is not None:
        system = model_mod.preset(config.preset, config.param_dict())
        if config.guess is not None:
            guess = np.array(config.guess, dtype=float)
        elif config.preset == "satellite":
            omega = dict(config.params).get("omega", 1.0)
            guess = np.array([1.0, 0.0, 0.0, 0.0, -float(omega), 0.0])
        else:
            guess = np.zeros(system.dim)
        return system, guess
    system = _polynomial_system(config)
    guess = (
        np.array(config.guess, dtype=float)
        if config.guess is not None
        else np.zeros(system.dim)
    )
    return system, guess


def _candidate_record(index: int, cand) -> dict:
    a7 = cand.a7_results
    return {
        "index": index,
        "j0": cand.j0,
        "beta": cand.beta,
        "multiplicity": cand.multiplicity,
        "lambda0": cand.lambda0,
        "period": cand.predicted_period,
        "nonresonant": cand.nonresonant,
        "morse_jump": cand.morse_jump,
        "degree": cand.degree_on_section,
        "degree_path": cand.degree_path,
        "degree_reliable": cand.degree_reliable,
        "szulkin": a7.get("szulkin"),
        "definite_zj": a7.get("definite-zj"),
        "definite_z": a7.get("definite-z"),
        "mplus": a7.get("mplus"),
        "verdict": cand.verdict,
        "theorem_path": cand.theorem_path,
        "reasons": list(cand.reasons),
    }


def _orbit_record(index: int, orbit, z0) -> dict:
    return {
        "index": index,
        "amplitude": orbit.amplitude,
        "lambda": orbit.lam,
        "period": orbit.period,
        "residual": orbit.residual,
        "sup_distance": orbits_mod.sup_distance(orbit, z0),
        "minimal_period": orbits_mod.minimal_period_check(orbit),
    }


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _fmt17(value)
    if isinstance(value, (list, tuple)):
        return "; ".join(str(v) for v in value)
    return str(value)


def _emit_csv(records, columns) -> str:
    lines = [",".join(columns)]
    for rec in records:
        cells = [_csv_cell(rec.get(col)) for col in columns]
        lines.append(",".join('"' + c.replace('"', '""') + '"' if ("," in c or '"' in c) else c for c in cells))
    return "\n".join(lines) + "\n"


def _emit_jsonl(records) -> str:
    return "".join(json.dumps(rec, ensure_ascii=True) + "\n" for rec in records)


def _write_output(text: str, path: str | None, stdout) -> None:
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _run_analysis(config: RunConfig):
    system, guess = build_system(config)
    eq = model_mod.refine_equilibrium(system, guess)
    options = analysis_mod.AnalyzeOptions(
        k_max=config.k_max, j0=config.j0, variants=config.variants, seed=config.seed
    )
    candidates = analysis_mod.analyze(system, eq, options)
    return system, eq, candidates


def cmd_analyze(config: RunConfig, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    system, eq, candidates = _run_analysis(config)
    lines = [
        f"system: {system.name or 'custom'} (N={system.n})",
        f"equilibrium: |grad H| = {eq.gradient_norm:.3e}, orbit dim = {eq.orbit_dim}, "
        f"isotropy trivial = {'yes' if eq.isotropy_trivial else 'unverified'}",
    ]
    if not candidates:
        lines.append("no purely imaginary eigenvalue pairs: no candidate levels")
    else:
        diag = candidates[0].diagnostics
        lines.append(
            f"hessian: m+ = {diag['m_plus']}, m- = {diag['m_minus']}, kernel dim = {diag['kernel_dim']}, "
            f"orbit nondegenerate = {'yes' if diag['orbit_nondegenerate'] else 'no'}"
        )
        header = (
            f"{'idx':>3} {'j0':>3} {'beta':>12} {'lambda0':>12} {'period':>12} "
            f"{'A6':>3} {'jump':>4} {'degree':>7} {'path':>13} "
            f"{'A7.1':>4} {'A7.3':>4} {'A7.4':>4} {'A7.5':>4}  verdict"
        )
        lines.append(header)
        for i, cand in enumerate(candidates, start=1):
            a7 = cand.a7_results

            def flag(key):
                value = a7.get(key)
                return "-" if value is None else ("yes" if value else "no")

            jump = "?" if cand.morse_jump is None else f"{cand.morse_jump:+d}"
            degree = "?" if cand.degree_on_section is None else f"{cand.degree_on_section:+d}"
            lines.append(
                f"{i:>3} {cand.j0:>3} {cand.beta:>12.6f} {cand.lambda0:>12.6f} "
                f"{cand.predicted_period:>12.6f} {'yes' if cand.nonresonant else 'no':>3} "
                f"{jump:>4} {degree:>7} {str(cand.degree_path):>13} "
                f"{flag('szulkin'):>4} {flag('definite-zj'):>4} {flag('definite-z'):>4} "
                f"{flag('mplus'):>4}  {cand.verdict}"
            )
            for reason in cand.reasons:
                lines.append(f"      - {reason}")
    report = "\n".join(lines) + "\n"
    records = [_candidate_record(i, c) for i, c in enumerate(candidates, start=1)]
    if config.fmt == "text":
        _write_output(report, config.output, stdout)
        if config.output is not None:
            stdout.write(report)
    else:
        stdout.write(report)
        payload = (
            _emit_jsonl(records) if config.fmt == "json-lines" else _emit_csv(records, ANALYZE_COLUMNS)
        )
        _write_output(payload, config.output, stdout)
    return 0 if any(c.confirmed for c in candidates) else 2


def cmd_branch(config: RunConfig, candidate_index: int | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    system, eq, candidates = _run_analysis(config)
    confirmed = [c for c in candidates if c.confirmed]
    chosen = None
    if candidate_index is not None:
        picks = [c for c in candidates if c.j0 == candidate_index]
        chosen = picks[0] if picks else None
    elif confirmed:
        chosen = confirmed[0]
    if chosen is None or not chosen.confirmed:
        stdout.write("no confirmed candidate to verify\n")
        return 2
    branch = orbits_mod.continue_branch(
        system,
        eq,
        chosen,
        steps=config.steps,
        s0=config.s0,
        growth=config.growth,
        modes=config.modes,
    )
    records = [_orbit_record(i, orbit, eq.z0) for i, orbit in enumerate(branch.orbits, start=1)]
    coeff_records = [
        {
            "record": "coefficients",
            "index": i,
            "modes": orbit.m,
            "a0": [float(v) for v in orbit.a0],
            "a": [[float(v) for v in row] for row in orbit.a],
            "b": [[float(v) for v in row] for row in orbit.b],
        }
        for i, orbit in enumerate(branch.orbits, start=1)
    ]
    lines = [
        f"candidate j0={chosen.j0}: beta = {chosen.beta:.9g}, predicted period = "
        f"{chosen.predicted_period:.9g}",
        f"branch: {len(branch.orbits)} orbit(s), {len(branch.failures)} failure(s)",
    ]
    for rec in records:
        lines.append(
            f"  amplitude {rec['amplitude']:.6e}  period {rec['period']:.9f}  "
            f"residual {rec['residual']:.2e}  sup|z - z0| {rec['sup_distance']:.3e}  "
            f"{rec['minimal_period']}"
        )
    for failure in branch.failures:
        lines.append(f"  failed: {failure}")
    ok = _branch_healthy(branch, chosen, config)
    if branch.orbits:
        smallest = records[0]
        lines.append(
            f"period limit at smallest amplitude: {smallest['period']:.12g} "
            f"(prediction gap {abs(smallest['period'] - chosen.predicted_period):.3e})"
        )
        lines.append(f"sup-distance at smallest amplitude: {smallest['sup_distance']:.3e}")
    lines.append(f"branch verdict: {'ok' if ok else 'not verified'}")
    report = "\n".join(lines) + "\n"
    stdout.write(report)
    if config.fmt == "json-lines":
        payload = _emit_jsonl(records + coeff_records)
        _write_output(payload, config.output, stdout)
    elif config.fmt == "csv":
        payload = _emit_csv(records, BRANCH_COLUMNS)
        _write_output(payload, config.output, stdout)
        coeff_rows = []
        for i, orbit in enumerate(branch.orbits, start=1):
            for comp in range(system.dim):
                coeff_rows.append(
                    {"index": i, "k": 0, "component": comp, "a": float(orbit.a0[comp]), "b": None}
                )
            for k in range(1, orbit.m + 1):
                for comp in range(system.dim):
                    coeff_rows.append(
                        {
                            "index": i,
                            "k": k,
                            "component": comp,
                            "a": float(orbit.a[k - 1, comp]),
                            "b": float(orbit.b[k - 1, comp]),
                        }
                    )
        if config.output is not None:
            _write_output(_emit_csv(coeff_rows, COEFF_COLUMNS), config.output + ".coeffs.csv", stdout)
    elif config.output is not None:
        _write_output(report, config.output, stdout)
    return 0 if ok else 1


def _branch_healthy(branch, candidate, config: RunConfig) -> bool:
    orbits_list = branch.orbits
    if len(orbits_list) < 3:
        return False
    amps = [o.amplitude for o in orbits_list]
    if any(a2 <= a1 for a1, a2 in zip(amps, amps[1:])):
        return False
    if amps[0] > config.s0 * (1.0 + 1e-6):
        return False
    target = candidate.predicted_period
    period_gaps = [abs(p - target) for _, p in branch.period_trend]
    sups = [d for _, d in branch.sup_distance_trend]
    return period_gaps[0] <= period_gaps[-1] + 1e-12 and sups[0] <= sups[-1]


def cmd_presets(config: RunConfig | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    fmt = config.fmt if config is not None else "text"
    output = config.output if config is not None else None
    info = model_mod.preset_info()
    samples = {
        "satellite": RunConfig(preset="satellite", params=(("c", 0.5 * model_mod.EARTH_J2), ("omega", 1.0))),
        "harmonic": RunConfig(preset="harmonic", params=(("beta", 1.0),)),
        "coupled-springs": RunConfig(preset="coupled-springs", params=(("frequencies", (1.0, 2.0)),)),
    }
    lines = []
    records = []
    for name in sorted(info):
        entry = info[name]
        lines.append(f"{name}:")
        for pname, default in sorted(entry["parameters"].items()):
            shown = "required" if default is None else _fmt(default) if isinstance(default, float) else str(default)
            lines.append(f"  {pname} = {shown}")
        lines.append(f"  note: {entry['notes']}")
        records.append(
            {
                "record": "preset",
                "name": name,
                "parameters": {
                    k: (None if v is None else float(v)) for k, v in sorted(entry["parameters"].items())
                },
                "notes": entry["notes"],
                "sample_config": samples[name].to_ini(),
            }
        )
    report = "\n".join(lines) + "\n"
    stdout.write(report)
    if fmt == "json-lines":
        _write_output(_emit_jsonl(records), output, stdout)
    elif fmt == "csv":
        flat = [
            {
                "name": rec["name"],
                "parameters": " ".join(
                    f"{k}={'required' if v is None else _fmt(v)}" for k, v in rec["parameters"].items()
                ),
                "notes": rec["notes"],
            }
            for rec in records
        ]
        _write_output(_emit_csv(flat, ("name", "parameters", "notes")), output, stdout)
    elif output is not None:
        _write_output(report, output, stdout)
    return 0


_HELP_EPILOG = """\
machine output formats:
  json-lines: one JSON record per line.  analyze emits candidate records with
    keys in the order: %s.
    branch emits orbit records (keys: %s)
    followed by one coefficients record per orbit (record, index, modes, a0, a, b).
  csv: header row then one row per record, columns as above; branch coefficient
    tables go to <path>.coeffs.csv with columns %s
    (k = 0 rows hold the constant coefficient in 'a').
Floats are printed with up to 17 significant digits; identical configuration
and seed give byte-identical machine output.
""" % (
    ", ".join(ANALYZE_COLUMNS),
    ", ".join(BRANCH_COLUMNS),
    ", ".join(COEFF_COLUMNS),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hambif",
        description="Detect candidate bifurcation levels of periodic orbits near "
        "symmetric Hamiltonian equilibria and verify them by computing the "
        "emanating branch.",
        epilog=_HELP_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="configuration file (flat key = value with sections)")
        p.add_argument("--preset", help="preset name (see the presets command)")
        p.add_argument("--omega", type=float, help="satellite spin rate")
        p.add_argument("--c", type=float, help="satellite oblateness strength")
        p.add_argument("--beta", type=float, help="harmonic oscillator frequency")
        p.add_argument("--kmax", type=int, help="resonance-set depth (default 20)")
        p.add_argument("--j0", type=int, help="restrict to one candidate index")
        p.add_argument("--seed", type=int, help="seed for randomized subroutines")
        p.add_argument("--output", help="write machine output to this path")
        p.add_argument("--format", choices=["text", "json-lines", "csv"], help="output format")

    p_analyze = sub.add_parser("analyze", help="run the candidate-level analysis")
    add_common(p_analyze)
    p_branch = sub.add_parser("branch", help="verify a confirmed candidate by branch continuation")
    add_common(p_branch)
    p_branch.add_argument("--steps", type=int, help="number of amplitude steps (default 8)")
    p_branch.add_argument("--s0", type=float, help="smallest amplitude (default 1e-3)")
    p_branch.add_argument("--growth", type=float, help="amplitude growth factor (default 2.0)")
    p_branch.add_argument("--modes", type=int, help="initial Fourier truncation (default 8)")
    p_presets = sub.add_parser("presets", help="list preset systems and their parameters")
    p_presets.add_argument("--output", help="write machine output to this path")
    p_presets.add_argument("--format", choices=["text", "json-lines", "csv"], help="output format")
    return parser


def _effective_config(args) -> RunConfig:
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                config = parse_config(handle.read())
        except OSError as exc:
            raise ConfigParse(f"cannot read config file: {exc}") from exc
    else:
        if getattr(args, "preset", None) is None:
            raise ConfigParse("either --config or --preset is required")
        config = RunConfig(preset=args.preset)
    updates: dict = {}
    if getattr(args, "preset", None) is not None and args.config:
        updates["preset"] = args.preset
    params = dict(config.params)
    for flag in ("omega", "c", "beta"):
        value = getattr(args, flag, None)
        if value is not None:
            params[flag] = value
    if params != dict(config.params):
        updates["params"] = tuple(sorted(params.items()))
    if getattr(args, "kmax", None) is not None:
        updates["k_max"] = args.kmax
    if getattr(args, "j0", None) is not None:
        updates["j0"] = args.j0
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "output", None) is not None:
        updates["output"] = args.output
    if getattr(args, "format", None) is not None:
        updates["fmt"] = args.format
    for flag, key in (("steps", "steps"), ("s0", "s0"), ("growth", "growth"), ("modes", "modes")):
        value = getattr(args, flag, None)
        if value is not None:
            updates[key] = value
    return replace(config, **updates) if updates else config


def main(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "presets":
            fmt = args.format or "text"
            config = RunConfig(preset="harmonic", fmt=fmt, output=args.output)
            return cmd_presets(config, stdout=stdout)
        config = _effective_config(args)
        if args.command == "analyze":
            return cmd_analyze(config, stdout=stdout)
        if args.command == "branch":
            return cmd_branch(config, candidate_index=config.j0, stdout=stdout)
        raise ConfigParse(f"unknown command {args.command!r}")
    except HambifError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
