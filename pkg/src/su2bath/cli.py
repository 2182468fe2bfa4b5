"""Command line: ``su2bath {equilibrium,evolve,validate,render}``.

Exit codes: 0 ok, 1 configuration error, 2 validation failure, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import validate as validate_mod
from .config import ConfigError, RunConfig, load_config
from .density import DensityState
from .equilibrium import equilibrium_spec, equilibrium_state, kernel_residual, reduced_state
from .evolution import TimeSeries, evolve_many
from .generator import ResourceLimitError
from .render import density_grid
from .states import (
    WavepacketSpec,
    coherent_density,
    correlated_state,
    gaussian_superposition_coeffs,
    norm_deficit,
    product_state,
)

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_RESOURCE = 0, 1, 2, 3


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def read_seed_state(path) -> DensityState:
    try:
        records = json.loads(Path(path).read_text(encoding="utf-8"))
        return DensityState.from_records(records)
    except (OSError, ValueError, TypeError) as exc:
        raise ConfigError("seed_state", f"cannot load {path}: {exc}") from None


def initial_state(cfg: RunConfig, seed: str | None = None) -> tuple[DensityState, dict]:
    """Build the scenario's initial state; also returns metadata for the run record."""
    meta: dict = {}
    sc = cfg.scenario
    if sc == "evolve":
        path = seed or cfg.get("seed_state")
        if path is None:
            raise ConfigError("seed_state", "scenario 'evolve' needs --seed-state or seed_state")
        state = read_seed_state(path)
        if state.max_N > cfg.n_max_cap:
            raise ResourceLimitError(
                f"seed state reaches N={state.max_N} > n_max_cap={cfg.n_max_cap}; use a smaller initial state"
            )
        tr, herm = state.trace(), state.hermiticity_error()
        if abs(tr - 1) > 1e-10 or herm > 1e-10:
            raise ConfigError("seed_state", f"state must be Hermitian with unit trace (trace {tr}, pairing {herm:.2e})")
        return state, meta
    if sc in ("example1", "example2"):
        spec = WavepacketSpec(a=cfg.get("a"), ratio=cfg.get("ratio"), nmax=cfg.get("nmax", 32))
        top = spec.nmax if sc == "example1" else 2 * spec.nmax
        if top > cfg.n_max_cap:
            raise ResourceLimitError(f"{sc} with nmax={spec.nmax} reaches N={top} > n_max_cap={cfg.n_max_cap}")
        c = gaussian_superposition_coeffs(spec)
        meta = {"c": [float(x) for x in c], "norm_deficit": norm_deficit(c)}
        # the truncated expansion is renormalised; the deficit is reported in diagnostics
        c = c / np.linalg.norm(c)
        state = product_state(c) if sc == "example1" else correlated_state(c)
        return state, meta
    if sc == "coherent":
        N = cfg.get("N")
        if N > cfg.n_max_cap:
            raise ResourceLimitError(f"coherent state N={N} exceeds n_max_cap={cfg.n_max_cap}")
        return coherent_density(N, cfg.get("theta"), cfg.get("phi")), meta
    raise ConfigError("scenario", f"scenario {sc!r} has no initial state; use the equilibrium command")


def cmd_equilibrium(cfg: RunConfig, out: Path) -> int:
    N = cfg.get("N")
    if N is None:
        raise ConfigError("N", "required by the equilibrium command")
    if N > cfg.n_max_cap:
        raise ResourceLimitError(f"N={N} exceeds n_max_cap={cfg.n_max_cap}")
    p = cfg.params
    spec = equilibrium_spec(N, p.nbar0)
    state = equilibrium_state(p, N)
    record = spec.to_json()
    record.update({
        "probabilities": [float(x) for x in spec.probabilities],
        "kernel_residual": kernel_residual(p, N),
        "reduced_1": [float(x) for x in np.diag(reduced_state(state, 1)).real],
        "reduced_2": [float(x) for x in np.diag(reduced_state(state, 2)).real],
    })
    _write_json(out / "equilibrium.json", record)
    print(f"equilibrium N={N} nbar0={p.nbar0:.6g}: kernel residual {record['kernel_residual']:.3e}")
    return EXIT_OK


def _run_evolution(cfg: RunConfig, seed: str | None):
    state, meta = initial_state(cfg, seed)
    times = np.linspace(0.0, cfg.get("tmax"), cfg.get("nsteps"))
    states = evolve_many(state, cfg.params, times, n_max=cfg.n_max_cap)
    return state, meta, times, states


def cmd_evolve(cfg: RunConfig, out: Path, seed: str | None = None) -> int:
    if cfg.scenario == "equilibrium":
        raise ConfigError("scenario", "evolve needs one of evolve, example1, example2, coherent")
    state, meta, times, states = _run_evolution(cfg, seed)
    lowN = [N for N in state.supported_N() if N <= 1]
    low = [(N, Nt, r, rt) for N in lowN for Nt in lowN
           for r in range(N, -N - 1, -2) for rt in range(Nt, -Nt - 1, -2)]
    ts = TimeSeries.from_states(times, states, cfg.params, low)
    ts.to_csv(out / "timeseries.csv")
    _write_json(out / "final_state.json", states[-1].to_records())
    diag = {
        "scenario": cfg.scenario,
        "max_trace_error": max(abs(s.trace() - 1) for s in states),
        "max_hermiticity_error": max(s.hermiticity_error() for s in states),
        "min_eigenvalue": min(s.min_eigenvalue() for s in states),
        **meta,
    }
    _write_json(out / "diagnostics.json", diag)
    print(f"evolved {cfg.scenario} to t={times[-1]:g} over {len(times)} samples; "
          f"min eigenvalue {diag['min_eigenvalue']:.2e}")
    return EXIT_OK


def cmd_render(cfg: RunConfig, out: Path, seed: str | None = None) -> int:
    grid_kw = dict(xmin=cfg.get("xmin", -6.0), xmax=cfg.get("xmax", 6.0), steps=cfg.get("grid_steps", 241))
    if cfg.scenario == "equilibrium":
        snaps = {"eq": equilibrium_state(cfg.params, cfg.get("N"))}
    else:
        _, _, _, states = _run_evolution(cfg, seed)
        snaps = {"ini": states[0], "final": states[-1]}
    for tag, s in snaps.items():
        for keep in (1, 2):
            g = density_grid(reduced_state(s, keep), **grid_kw)
            g.to_csv(out / f"rho{keep}_{tag}.csv")
            flag = " (grid too narrow)" if g.too_narrow else ""
            print(f"rho{keep}_{tag}: diagonal mass {g.diagonal_mass():.6f}{flag}")
    return EXIT_OK


def cmd_validate() -> int:
    t0 = time.perf_counter()
    checks = validate_mod.run_all()
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    print(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed in {time.perf_counter() - t0:.1f} s")
    return EXIT_OK if ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="su2bath", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("equilibrium", "evolve", "render"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="key = value configuration file")
        sp.add_argument("--out", default=".", help="output directory")
        if name != "equilibrium":
            sp.add_argument("--seed-state", default=None, help="JSON records [N, Ntilde, r, rtilde, re, im]")
    sub.add_parser("validate")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate()
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "equilibrium":
            return cmd_equilibrium(cfg, out)
        if args.command == "evolve":
            return cmd_evolve(cfg, out, args.seed_state)
        return cmd_render(cfg, out, args.seed_state)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
