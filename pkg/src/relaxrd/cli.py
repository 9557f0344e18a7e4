"""Configuration-driven entry point.

Configs are TOML ([section] / key = value).  Unknown keys are hard
errors; diagnostics name the offending key and, where it appears in the
text, its line.  Subcommands: run (snapshots to CSV), study (convergence
report to CSV), oracle (brute-force comparison).
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:                      # Python < 3.11
    import tomli as tomllib

from . import harness, models, relax_core
from .mesh import Grid2D, make_grid, make_grid2d
from .reconstruct import ReconstructionKind


class ConfigError(ValueError):
    pass


_PROBLEM_KEYS = {
    "heat": set(),
    "genfk": {"alpha", "p_exp", "q_exp", "m_exp", "domain"},
    "extinction": {"m_exp", "p_exp", "c_abs", "perturb_amp", "perturb_ecc",
                   "perturb_mode", "sector"},
    "frog": {"mu", "gamma", "alpha", "beta", "release_time", "domain"},
}

_SECTIONS = {
    "problem": {"kind"} | set().union(*_PROBLEM_KEYS.values()),
    "grid": {"m"},
    "scheme": {"reconstruction", "rk", "cfl", "phi", "phi_safety", "gradient_order"},
    "run": {"t_end", "snapshots"},
    "study": {"m_list", "reference", "m_ref", "threads"},
    "oracle": {"steps"},
    "output": {"dir", "write_exact"},
}


@dataclass(frozen=True)
class RunConfig:
    kind: str
    problem_params: tuple                 # sorted (key, value) pairs
    grid_m: tuple                         # (m,) or (mx, my)
    reconstruction: str = "eno3"
    rk: int = 2
    cfl: float = 0.25
    phi: object = "auto"                  # "auto" or a positive float
    phi_safety: float = 1.0
    gradient_order: int | None = None
    t_end: float = 0.0
    snapshots: tuple = ()
    m_list: tuple = ()
    reference: str = "exact"
    m_ref: int | None = None
    threads: int = 1
    oracle_steps: int = 1
    out_dir: str = "out"
    write_exact: bool = False

    def scheme(self) -> relax_core.SchemeConfig:
        if self.phi == "auto":
            policy = relax_core.PhiAuto(self.phi_safety)
        else:
            policy = relax_core.PhiFixed(float(self.phi))
        return relax_core.SchemeConfig(
            ReconstructionKind.parse(self.reconstruction),
            relax_core.tableau(self.rk),
            cfl_parabolic=self.cfl,
            phi_policy=policy,
            gradient_order=self.gradient_order,
        )

    def build_problem(self) -> models.Problem:
        params = dict(self.problem_params)
        if self.kind == "heat":
            return models.heat_problem()
        if self.kind == "genfk":
            domain = params.pop("domain", (-5.0, 5.0))
            if "alpha" in params:
                alpha = params.pop("alpha")
                if params:
                    raise ConfigError("genfk takes either alpha or explicit exponents")
                return models.travelling_wave_problem(alpha, domain)
            return models.genfk_problem(params["p_exp"], params["q_exp"],
                                        params["m_exp"], domain)
        if self.kind == "extinction":
            kw = dict(params)
            if "sector" in kw:
                kw["sector"] = tuple(kw["sector"])
            return models.extinction_problem(**kw)
        if self.kind == "frog":
            fp = models.FrogParameters(
                mu=params.get("mu", 1.0), gamma=params.get("gamma", 0.0),
                alpha=params.get("alpha", 0.01), beta=params.get("beta", 10.0))
            return models.frog_problem(
                fp, second_release_time=params.get("release_time", 5.0),
                domain=params.get("domain", (-4.0, 4.0)))
        raise ConfigError(f"unknown problem kind {self.kind!r}")

    def build_grid(self, scheme):
        prob = self.build_problem()
        if prob.dim == 2:
            if len(self.grid_m) == 1:
                mx = my = self.grid_m[0]
            else:
                mx, my = self.grid_m
            ax, bx = prob.domain_x
            ay, by = prob.domain_y
            return make_grid2d(ax, bx, mx, ay, by, my, scheme.ghost)
        if len(self.grid_m) != 1:
            raise ConfigError(f"problem {self.kind!r} is 1D; grid.m must be a single count")
        ax, bx = prob.domain_x
        return make_grid(ax, bx, self.grid_m[0], scheme.ghost)


def _key_line(text: str, key: str) -> str:
    for i, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0]
        if stripped.strip().startswith(key) and "=" in stripped:
            return f" (line {i})"
        if stripped.strip() == f"[{key}]":
            return f" (line {i})"
    return ""


def _want(data, text, section, key, types, default=None, required=False):
    sec = data.get(section, {})
    if key not in sec:
        if required:
            raise ConfigError(f"missing required key {section}.{key}")
        return default
    val = sec[key]
    if not isinstance(val, types):
        raise ConfigError(
            f"bad value for {section}.{key}{_key_line(text, key)}: expected "
            f"{'/'.join(t.__name__ for t in (types if isinstance(types, tuple) else (types,)))}")
    return val


def parse_config(text: str) -> RunConfig:
    """Parse and validate a config; unknown keys are hard errors."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config syntax error: {exc}") from None

    for section, body in data.items():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]{_key_line(text, section)}")
        if not isinstance(body, dict):
            raise ConfigError(f"top-level key {section!r} is not a section")
        for key in body:
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {section}.{key}{_key_line(text, key)}")

    kind = _want(data, text, "problem", "kind", str, required=True)
    if kind not in _PROBLEM_KEYS:
        raise ConfigError(
            f"unknown problem kind {kind!r}{_key_line(text, 'kind')}; "
            f"choose from {sorted(_PROBLEM_KEYS)}")
    params = {}
    for key, val in data.get("problem", {}).items():
        if key == "kind":
            continue
        if key not in _PROBLEM_KEYS[kind]:
            raise ConfigError(f"key problem.{key}{_key_line(text, key)} does not apply "
                              f"to problem kind {kind!r}")
        params[key] = tuple(val) if isinstance(val, list) else val

    m_raw = _want(data, text, "grid", "m", (int, list), required=True)
    grid_m = tuple(int(v) for v in m_raw) if isinstance(m_raw, list) else (int(m_raw),)
    if any(m < 1 for m in grid_m) or len(grid_m) not in (1, 2):
        raise ConfigError(f"grid.m{_key_line(text, 'm')} must be a positive count "
                          "or a pair [mx, my]")

    recon = _want(data, text, "scheme", "reconstruction", str, "eno3")
    try:
        ReconstructionKind.parse(recon)
    except ValueError as exc:
        raise ConfigError(f"scheme.reconstruction{_key_line(text, 'reconstruction')}: {exc}")
    rk = _want(data, text, "scheme", "rk", int, 2)
    if rk not in (1, 2, 3):
        raise ConfigError(f"scheme.rk{_key_line(text, 'rk')} out of range 1..3")
    cfl = float(_want(data, text, "scheme", "cfl", (int, float), 0.25))
    phi = _want(data, text, "scheme", "phi", (str, int, float), "auto")
    if isinstance(phi, str):
        if phi != "auto":
            raise ConfigError(f"scheme.phi{_key_line(text, 'phi')} must be 'auto' or a number")
    else:
        phi = float(phi)
        if phi <= 0:
            raise ConfigError(f"scheme.phi{_key_line(text, 'phi')} must be positive")
    phi_safety = float(_want(data, text, "scheme", "phi_safety", (int, float), 1.0))
    go = _want(data, text, "scheme", "gradient_order", int, None)

    t_end = float(_want(data, text, "run", "t_end", (int, float), 0.0))
    if t_end < 0:
        raise ConfigError(f"run.t_end{_key_line(text, 't_end')} must be nonnegative")
    snaps = _want(data, text, "run", "snapshots", list, [])
    m_list = _want(data, text, "study", "m_list", list, [])
    reference = _want(data, text, "study", "reference", str, "exact")
    if reference not in ("exact", "fine"):
        raise ConfigError(f"study.reference{_key_line(text, 'reference')} must be "
                          "'exact' or 'fine'")
    m_ref = _want(data, text, "study", "m_ref", int, None)
    if reference == "fine" and m_ref is None:
        raise ConfigError("study.reference = 'fine' requires study.m_ref")
    threads = int(_want(data, text, "study", "threads", int, 1))
    steps = int(_want(data, text, "oracle", "steps", int, 1))
    out_dir = _want(data, text, "output", "dir", str, "out")
    write_exact = bool(_want(data, text, "output", "write_exact", bool, False))

    cfg = RunConfig(
        kind=kind,
        problem_params=tuple(sorted(params.items())),
        grid_m=grid_m,
        reconstruction=recon,
        rk=rk,
        cfl=cfl,
        phi=phi,
        phi_safety=phi_safety,
        gradient_order=go,
        t_end=t_end,
        snapshots=tuple(float(s) for s in snaps),
        m_list=tuple(int(m) for m in m_list),
        reference=reference,
        m_ref=m_ref,
        threads=threads,
        oracle_steps=steps,
        out_dir=out_dir,
        write_exact=write_exact,
    )
    try:
        cfg.scheme()
        cfg.build_problem()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return f'"{v}"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_config(cfg: RunConfig) -> str:
    """Emit a config text that parses back to an equal RunConfig."""
    lines = ["[problem]", f'kind = "{cfg.kind}"']
    for key, val in cfg.problem_params:
        lines.append(f"{key} = {_fmt(val)}")
    lines += ["", "[grid]",
              f"m = {_fmt(list(cfg.grid_m) if len(cfg.grid_m) > 1 else cfg.grid_m[0])}"]
    lines += ["", "[scheme]",
              f'reconstruction = "{cfg.reconstruction}"',
              f"rk = {cfg.rk}",
              f"cfl = {_fmt(cfg.cfl)}",
              f"phi = {_fmt(cfg.phi)}",
              f"phi_safety = {_fmt(cfg.phi_safety)}"]
    if cfg.gradient_order is not None:
        lines.append(f"gradient_order = {cfg.gradient_order}")
    lines += ["", "[run]", f"t_end = {_fmt(cfg.t_end)}",
              f"snapshots = {_fmt(list(cfg.snapshots))}"]
    if cfg.m_list:
        lines += ["", "[study]", f"m_list = {_fmt(list(cfg.m_list))}",
                  f'reference = "{cfg.reference}"']
        if cfg.m_ref is not None:
            lines.append(f"m_ref = {cfg.m_ref}")
        lines.append(f"threads = {cfg.threads}")
    lines += ["", "[oracle]", f"steps = {cfg.oracle_steps}"]
    lines += ["", "[output]", f'dir = "{cfg.out_dir}"',
              f"write_exact = {_fmt(cfg.write_exact)}"]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# output files


def _atomic_write(path: str, content: str):
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(content)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def snapshot_csv(snap, grid) -> str:
    lines = [f"# t={_g17(snap.t)}"]
    if isinstance(grid, Grid2D):
        xc, yc = grid.centers()
        lines.append("x,y," + ",".join(snap.names))
        for j, y in enumerate(yc):
            for i, x in enumerate(xc):
                vals = ",".join(_g17(f[j, i]) for f in snap.fields)
                lines.append(f"{_g17(x)},{_g17(y)},{vals}")
    else:
        xc = grid.centers()
        lines.append("x," + ",".join(snap.names))
        for i, x in enumerate(xc):
            lines.append(f"{_g17(x)}," + ",".join(_g17(f[i]) for f in snap.fields))
    return "\n".join(lines) + "\n"


def report_csv(report: harness.RunReport) -> str:
    lines = ["m,error_l1,error_l2,rate_l1,rate_l2,wall_time"]
    for r in report.rows:
        rl1 = "" if r.rate_l1 is None else _g17(r.rate_l1)
        rl2 = "" if r.rate_l2 is None else _g17(r.rate_l2)
        lines.append(f"{r.m},{_g17(r.error_l1)},{_g17(r.error_l2)},{rl1},{rl2},"
                     f"{r.wall_time:.6f}")
    return "\n".join(lines) + "\n"


def _cmd_run(cfg: RunConfig, out_dir: str) -> int:
    scheme = cfg.scheme()
    problem = cfg.build_problem()
    grid = cfg.build_grid(scheme)
    snaps = relax_core.run(problem, grid, scheme, cfg.t_end, cfg.snapshots)
    os.makedirs(out_dir, exist_ok=True)
    for i, snap in enumerate(snaps):
        _atomic_write(os.path.join(out_dir, f"snap_{i}.csv"), snapshot_csv(snap, grid))
        if cfg.write_exact and problem.exact is not None:
            if isinstance(grid, Grid2D):
                xc, yc = grid.centers()
                vals = np.asarray(problem.exact(snap.t, xc[None, :], yc[:, None]))
            else:
                vals = np.asarray(problem.exact(snap.t, grid.centers()))
            ex = relax_core.Snapshot(
                snap.t, [n + "_exact" for n in snap.names], [vals], grid)
            _atomic_write(os.path.join(out_dir, f"exact_{i}.csv"), snapshot_csv(ex, grid))
    return 0


def _cmd_study(cfg: RunConfig, out_dir: str) -> int:
    if not cfg.m_list:
        raise ConfigError("study requires study.m_list")
    scheme = cfg.scheme()
    problem = cfg.build_problem()
    reference = "exact" if cfg.reference == "exact" else ("fine", cfg.m_ref)
    report = harness.convergence_study(problem, scheme, list(cfg.m_list), cfg.t_end,
                                       reference, threads=cfg.threads)
    os.makedirs(out_dir, exist_ok=True)
    _atomic_write(os.path.join(out_dir, "report.csv"), report_csv(report))
    return 0


def _cmd_oracle(cfg: RunConfig, out_dir: str) -> int:
    problem = cfg.build_problem()
    dev = harness.oracle_compare(problem, cfg.grid_m[0], cfg.oracle_steps)
    os.makedirs(out_dir, exist_ok=True)
    _atomic_write(os.path.join(out_dir, "oracle.csv"),
                  "m,steps,max_deviation\n"
                  f"{cfg.grid_m[0]},{cfg.oracle_steps},{_g17(dev)}\n")
    print(f"max deviation over {cfg.oracle_steps} step(s) at m={cfg.grid_m[0]}: {dev:.6e}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="relax-rd",
        description="Relaxed ENO/WENO solver for degenerate reaction-diffusion equations")
    parser.add_argument("command", choices=["run", "study", "oracle"])
    parser.add_argument("--config", required=True, help="path to a TOML run description")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--threads", type=int, default=None,
                        help="study parallelism (or env RELAXRD_THREADS)")
    args = parser.parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        print(f"cannot read config {args.config!r}: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
        if args.threads is not None:
            cfg = RunConfig(**{**cfg.__dict__, "threads": args.threads})
        elif os.environ.get("RELAXRD_THREADS"):
            cfg = RunConfig(**{**cfg.__dict__, "threads": int(os.environ["RELAXRD_THREADS"])})
    except ConfigError as exc:
        print(f"config error in {args.config}: {exc}", file=sys.stderr)
        return 1
    out_dir = args.out or cfg.out_dir
    try:
        if args.command == "run":
            return _cmd_run(cfg, out_dir)
        if args.command == "study":
            return _cmd_study(cfg, out_dir)
        return _cmd_oracle(cfg, out_dir)
    except ConfigError as exc:
        print(f"config error in {args.config}: {exc}", file=sys.stderr)
        return 1
    except relax_core.SolverFault as exc:
        print(f"solver fault: {exc}", file=sys.stderr)
        return 2


def console_main():
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
