"""Command-line driver: JSON config in, CSV fields and JSON verdicts out.

Subcommands
-----------
riccati   solve for the superpotential and verify its residual
partner   map the catalog solution to its partner and recover W from the pair
verify    run the equation-residual suite on a catalog member or input CSVs
vacuum    evolve the vacuum equation, check drift/residual/scale invariance
figure2   emit the four panel CSVs (phi, psi, u, W) of the worked example
sweep     run verify across a list of scale parameters

Exit codes: 0 all required checks passed, 1 a tolerance/solve check failed,
2 configuration or I/O error.  Identical configs produce byte-identical
outputs (17-significant-digit CSV floats, sorted JSON keys).

Config schema (all sections optional; defaults in DEFAULT_CONFIG):

    {
      "grid": {"xmin": -10.0, "xmax": 10.0, "n": 1024},
      "nonlinearity": {"kind": "kerr", "kappa": 2.0},
      "levels": {"eta": 1.0, "e0": null, "en": null},
      "solver": {"method": "linearized", "w0": 0.0, "bracket": [-1.0, 1.0], "tol": null},
      "scheme": "spectral",
      "masks": {"threshold": 1e-3},
      "tolerances": {"eq5": 1e-6, ...},
      "vacuum": {"profile": "sech", "k": 2.0, "value": 1.0, "dt": 1e-3,
                 "steps": 1000, "record_every": 1, "scale": null},
      "inputs": {"psi": "psi.csv", "phi": "phi.csv", "w": "w.csv", "u": null},
      "sweep": {"etas": [0.5, 1.0, 2.0]},
      "output_dir": "out"
    }

Unknown keys are rejected.  When "grid" is omitted each command uses its
documented default: riccati [-10,10]x1024, partner/verify the eta-scaled
catalog box, vacuum [-5,5]x1024, figure2 [-10,10]x1001.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .catalog import AnalyticSolutionFamily, build_pair, catalog_grid, energy_of, eval_catalog
from .grid import (
    DerivativeScheme,
    Field,
    Grid1D,
    default_mask,
    residual_report,
)
from .riccati import (
    NonlinearitySpec,
    RiccatiSolveError,
    Superpotential,
    riccati_residual,
    solve_riccati_linearized,
    solve_riccati_shooting,
)
from .residuals import PartnerForm, nlse_residual, partner_residual_phi, partner_residual_u
from .susy import SusyPair, factorization_check, partner_from_psi, superpotential_from_pair
from .vacuum import (
    EvolutionBlowupError,
    LaxIdentityError,
    evolve_vacuum,
    lax_residual,
    scale_invariance_check,
    vacuum_residual,
)

__all__ = ["main", "read_field_csv", "write_field_csv"]


class ConfigError(ValueError):
    pass


DEFAULT_TOLERANCES = {
    "riccati_linearized": 1e-6,
    "riccati_shooting": 1e-4,
    "partner_reproduction": 1e-8,
    "eq5": 1e-6,
    "eq6": 1e-6,
    "eq7": 1e-6,
    "eq9": 1e-6,
    "eq10": 1e-6,
    "eq11_corrected": 1e-6,
    "eq14": 1e-6,
    "vacuum_drift": 1e-6,
    "vacuum_residual": 1e-4,
    "scale_invariance": 1e-10,
    "lax_identity": 1e-8,
}

DEFAULT_CONFIG = {
    "grid": None,
    "nonlinearity": {"kind": "kerr", "kappa": 2.0},
    "levels": {"eta": 1.0, "e0": None, "en": None},
    "solver": {"method": "linearized", "w0": 0.0, "bracket": [-1.0, 1.0], "tol": None},
    "scheme": "spectral",
    "masks": {"threshold": 1e-3},
    "tolerances": {},
    "vacuum": {"profile": "sech", "k": 2.0, "value": 1.0, "dt": 1e-3,
               "steps": 1000, "record_every": 1, "scale": None},
    "inputs": None,
    "sweep": {"etas": [0.5, 1.0, 2.0]},
    "output_dir": "out",
}

_SCHEMA = {
    "grid": {"xmin", "xmax", "n"},
    "nonlinearity": {"kind", "kappa"},
    "levels": {"eta", "e0", "en"},
    "solver": {"method", "w0", "bracket", "tol"},
    "scheme": None,
    "masks": {"threshold"},
    "tolerances": set(DEFAULT_TOLERANCES),
    "vacuum": {"profile", "k", "value", "dt", "steps", "record_every", "scale"},
    "inputs": {"psi", "phi", "w", "u"},
    "sweep": {"etas"},
    "output_dir": None,
}


def _load_config(path: str | None) -> dict:
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if path is None:
        return cfg
    try:
        with open(path, "r", encoding="utf-8") as fh:
            user = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(user, dict):
        raise ConfigError("config must be a JSON object")
    for key, value in user.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        allowed = _SCHEMA[key]
        if allowed is not None and value is not None:
            if not isinstance(value, dict):
                raise ConfigError(f"config section {key!r} must be an object")
            for sub in value:
                if sub not in allowed:
                    raise ConfigError(f"unknown config key {key}.{sub}")
            base = cfg[key] if isinstance(cfg.get(key), dict) else {}
            base.update(value)
            cfg[key] = base
        else:
            cfg[key] = value
    return cfg


def _grid_from_config(cfg: dict, fallback: Grid1D) -> Grid1D:
    g = cfg.get("grid")
    if g is None:
        return fallback
    try:
        return Grid1D(float(g["xmin"]), float(g["xmax"]), int(g["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid section: {exc}") from exc


def _scheme_from_config(cfg: dict) -> DerivativeScheme:
    try:
        return DerivativeScheme(cfg["scheme"])
    except ValueError as exc:
        raise ConfigError(f"unknown scheme {cfg['scheme']!r}") from exc


def _nspec_from_config(cfg: dict) -> NonlinearitySpec:
    sec = cfg["nonlinearity"]
    if sec.get("kind") != "kerr":
        raise ConfigError("only the kerr nonlinearity is configurable from JSON")
    return NonlinearitySpec.kerr(float(sec.get("kappa", 2.0)))


def _tol(cfg: dict, name: str, tol_scale: float) -> float:
    base = cfg["tolerances"].get(name)
    if base is None:
        base = DEFAULT_TOLERANCES[name]
    return float(base) * tol_scale


def _use_color() -> bool:
    return sys.stdout.isatty() and not os.environ.get("NLSUSY_NO_COLOR")


def _verdict_line(name: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    if _use_color():
        tag = f"\x1b[32m{tag}\x1b[0m" if ok else f"\x1b[31m{tag}\x1b[0m"
    print(f"[{tag}] {name}" + (f"  {detail}" if detail else ""))


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_field_csv(path: Path, fld: Field) -> None:
    """CSV layout: header x,re,im,abs; masked points emitted as nan."""
    lines = ["x,re,im,abs"]
    vals = np.asarray(fld.values, dtype=complex)
    mask = fld.mask if fld.mask is not None else np.zeros(fld.grid.n, dtype=bool)
    for xi, vi, mi in zip(fld.grid.x, vals, mask):
        if mi:
            lines.append(f"{_fmt(xi)},nan,nan,nan")
        else:
            lines.append(f"{_fmt(xi)},{_fmt(vi.real)},{_fmt(vi.imag)},{_fmt(abs(vi))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_field_csv(path: Path) -> Field:
    """Inverse of :func:`write_field_csv`; nan rows become masked samples."""
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text or text[0].strip() != "x,re,im,abs":
        raise ConfigError(f"{path}: expected header 'x,re,im,abs'")
    xs, vs, ms = [], [], []
    for line in text[1:]:
        parts = line.split(",")
        if len(parts) != 4:
            raise ConfigError(f"{path}: malformed row {line!r}")
        x, re_s, im_s = float(parts[0]), parts[1], parts[2]
        xs.append(x)
        if re_s == "nan":
            vs.append(0.0)
            ms.append(True)
        else:
            vs.append(complex(float(re_s), float(im_s)))
            ms.append(False)
    xs = np.asarray(xs)
    if xs.size < 8:
        raise ConfigError(f"{path}: too few samples")
    h = np.diff(xs)
    if not np.allclose(h, h[0], rtol=1e-10, atol=1e-12):
        raise ConfigError(f"{path}: grid is not uniform")
    grid = Grid1D(float(xs[0]), float(xs[-1]), xs.size)
    vals = np.asarray(vs, dtype=complex)
    if np.abs(vals.imag).max() == 0.0:
        vals = vals.real
    mask = np.asarray(ms, dtype=bool)
    return Field(grid, vals, mask if mask.any() else None)


def _write_json(path: Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _levels(cfg: dict) -> tuple[float, float, float]:
    eta = float(cfg["levels"].get("eta") or 1.0)
    en_cat, e0_cat, _ = energy_of(eta)
    e0 = cfg["levels"].get("e0")
    en = cfg["levels"].get("en")
    return eta, float(en if en is not None else en_cat), float(e0 if e0 is not None else e0_cat)


# ---------------------------------------------------------------- commands


def cmd_riccati(cfg: dict, out: Path, tol_scale: float) -> int:
    eta, _, e0 = _levels(cfg)
    grid = _grid_from_config(cfg, Grid1D(-10.0, 10.0, 1024))
    scheme = _scheme_from_config(cfg)
    nspec = _nspec_from_config(cfg)
    psi = eval_catalog(eta, "psi", grid)
    n_field = Field(grid, nspec(psi.values))
    method = cfg["solver"].get("method", "linearized")
    try:
        if method == "linearized":
            w = solve_riccati_linearized(n_field, e0, grid, w0=float(cfg["solver"].get("w0", 0.0)))
            tol = _tol(cfg, "riccati_linearized", tol_scale)
        elif method == "shooting":
            bracket = tuple(float(b) for b in cfg["solver"].get("bracket", (-1.0, 1.0)))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # non-unique midpoint note is expected
                w = solve_riccati_shooting(n_field, e0, grid, w0_bracket=bracket)
            tol = _tol(cfg, "riccati_shooting", tol_scale)
        else:
            raise ConfigError(f"unknown solver.method {method!r}")
    except RiccatiSolveError as exc:
        _verdict_line("riccati solve", False, str(exc))
        return 1
    if cfg["solver"].get("tol") is not None:
        tol = float(cfg["solver"]["tol"]) * tol_scale
    report = riccati_residual(w, n_field, scheme=scheme)
    ok = report.linf <= tol
    write_field_csv(out / "w.csv", w.w)
    _write_json(out / "riccati_report.json", {
        "method": method, "e0": e0, "eta": eta,
        "residual": {"linf": report.linf, "l2": report.l2,
                     "mask_fraction": report.mask_fraction},
        "tol": tol, "pass": bool(ok),
    })
    _verdict_line("riccati residual", ok, f"linf={report.linf:.3e} tol={tol:.0e}")
    return 0 if ok else 1


def cmd_partner(cfg: dict, out: Path, tol_scale: float) -> int:
    eta, e_n, e0 = _levels(cfg)
    if not e_n > e0:
        raise ConfigError(f"levels require en > e0, got en={e_n}, e0={e0}")
    grid = _grid_from_config(cfg, catalog_grid(eta))
    scheme = _scheme_from_config(cfg)
    fam = AnalyticSolutionFamily(eta)
    psi = eval_catalog(eta, "psi", grid)
    w = Superpotential(w=eval_catalog(eta, "w", grid), provenance="analytic", e0=e0)
    phi = partner_from_psi(psi, w, e_n, e0, scheme)
    mask = default_mask(phi, float(cfg["masks"].get("threshold", 1e-3)))
    w_rec = superpotential_from_pair(psi, phi, e_n, e0, mask, scheme)

    write_field_csv(out / "psi.csv", psi)
    write_field_csv(out / "phi.csv", phi)
    write_field_csv(out / "w.csv", w.w)
    write_field_csv(out / "w_recovered.csv", w_rec.w)

    phi_exact = fam.phi(grid.x)
    err_phi = float(np.abs(phi.values - phi_exact).max())
    err_w = float(np.abs((w_rec.w.values - w.w.values)[~mask]).max())
    tol_phi = _tol(cfg, "partner_reproduction", tol_scale)
    tol_w = _tol(cfg, "eq9", tol_scale)
    ok = err_phi <= tol_phi and err_w <= tol_w
    _write_json(out / "partner_report.json", {
        "eta": eta, "en": e_n, "e0": e0,
        "phi_reproduction_err": err_phi, "phi_tol": tol_phi,
        "w_recovery_err": err_w, "w_tol": tol_w, "pass": bool(ok),
    })
    _verdict_line("partner reproduction", err_phi <= tol_phi, f"err={err_phi:.3e}")
    _verdict_line("superpotential recovery", err_w <= tol_w, f"err={err_w:.3e}")
    return 0 if ok else 1


def _verify_fields(cfg: dict):
    eta, e_n, e0 = _levels(cfg)
    inputs = cfg.get("inputs")
    if inputs:
        needed = ("psi", "phi", "w")
        missing = [k for k in needed if not inputs.get(k)]
        if missing:
            raise ConfigError(f"inputs section needs CSV paths for {missing}")
        psi = read_field_csv(inputs["psi"])
        phi = read_field_csv(inputs["phi"])
        wf = read_field_csv(inputs["w"])
        if np.abs(psi.values).max() == 0.0 or np.abs(phi.values).max() == 0.0:
            raise ConfigError("input fields are identically zero")
        grid = psi.grid
        u = read_field_csv(inputs["u"]) if inputs.get("u") else None
        w = Superpotential(w=wf, provenance="analytic", e0=e0)
    else:
        grid = _grid_from_config(cfg, catalog_grid(eta))
        psi = eval_catalog(eta, "psi", grid)
        phi = eval_catalog(eta, "phi", grid)
        w = Superpotential(w=eval_catalog(eta, "w", grid), provenance="analytic", e0=e0)
        u = eval_catalog(eta, "u", grid)
    return grid, psi, phi, w, u, eta, e_n, e0


def cmd_verify(cfg: dict, out: Path, tol_scale: float) -> int:
    grid, psi, phi, w, u, eta, e_n, e0 = _verify_fields(cfg)
    scheme = _scheme_from_config(cfg)
    nspec = _nspec_from_config(cfg)
    threshold = float(cfg["masks"].get("threshold", 1e-3))
    pair = SusyPair(psi=psi, phi=phi, w=w, e_n=e_n, e0=e0, nspec=nspec)
    mask = default_mask(phi, threshold)
    n_field = Field(grid, nspec(psi.values))

    results: dict[str, dict] = {}

    def add(name: str, linf: float, l2: float, mask_fraction: float, required: bool = True):
        tol = _tol(cfg, name.replace("-", "_"), tol_scale) if required else None
        results[name] = {
            "linf": float(linf), "l2": float(l2), "mask_fraction": float(mask_fraction),
            "tol": tol, "required": required,
            "pass": bool(linf <= tol) if required else None,
        }

    rep = nlse_residual(psi, e_n, nspec, scheme)
    add("eq5", rep.linf, rep.l2, rep.mask_fraction)
    rep = factorization_check(pair, scheme)
    add("eq6", rep.linf, rep.l2, rep.mask_fraction)
    rep = riccati_residual(w, n_field, e0, scheme)
    add("eq7", rep.linf, rep.l2, rep.mask_fraction)
    w_rec = superpotential_from_pair(psi, phi, e_n, e0, mask, scheme)
    err = np.zeros(grid.n)
    err[~mask] = np.abs((w_rec.w.values - w.w.values)[~mask])
    rep = residual_report(err, grid, mask=mask)
    add("eq9", rep.linf, rep.l2, rep.mask_fraction)
    rep = partner_residual_phi(pair, PartnerForm.EQ10, scheme, mask)
    add("eq10", rep.linf, rep.l2, rep.mask_fraction)
    rep = partner_residual_phi(pair, PartnerForm.EQ11_CORRECTED, scheme, mask)
    add("eq11_corrected", rep.linf, rep.l2, rep.mask_fraction)
    rep = partner_residual_phi(pair, PartnerForm.EQ11_AS_PRINTED, scheme, mask)
    add("eq11_as_printed", rep.linf, rep.l2, rep.mask_fraction, required=False)
    if u is None and not np.any(phi.values == 0.0):
        u = Field(grid, 1.0 / phi.values)
    # the reciprocal-equation evaluator needs honest finite nonzero samples
    # everywhere (its derivatives come from the global reciprocal); a grid
    # that hits a pole of u cannot host this check
    if u is not None and np.isfinite(u.values).all() and not np.any(u.values == 0.0):
        rep = partner_residual_u(Field(grid, u.values), psi, e_n, e0, nspec, scheme)
        add("eq14", rep.linf, rep.l2, rep.mask_fraction)
    ok = all(r["pass"] for r in results.values() if r["required"])
    _write_json(out / "verify_report.json", {
        "eta": eta, "en": e_n, "e0": e0, "scheme": str(scheme.value),
        "mask_threshold": threshold, "tol_scale": tol_scale,
        "equations": results, "pass": bool(ok),
    })
    for name, r in results.items():
        _verdict_line(name, r["pass"] if r["required"] else True,
                      f"linf={r['linf']:.3e}" + ("" if r["required"] else " (reported only)"))
    return 0 if ok else 1


def _vacuum_profile(cfg: dict, grid: Grid1D) -> Field:
    sec = cfg["vacuum"]
    kind = sec.get("profile", "sech")
    if kind == "sech":
        return Field(grid, 1.0 / np.cosh(float(sec.get("k", 2.0)) * grid.x))
    if kind == "constant":
        return Field(grid, np.full(grid.n, complex(sec.get("value", 1.0))))
    raise ConfigError(f"unknown vacuum profile {kind!r}")


def cmd_vacuum(cfg: dict, out: Path, tol_scale: float) -> int:
    sec = cfg["vacuum"]
    dt = float(sec.get("dt", 1e-3))
    steps = int(sec.get("steps", 1000))
    if dt <= 0 or steps < 1:
        raise ConfigError(f"vacuum needs dt > 0 and steps >= 1, got dt={dt}, steps={steps}")
    grid = _grid_from_config(cfg, Grid1D(-4.0, 4.0, 1024))
    phi0 = _vacuum_profile(cfg, grid)
    record_every = int(sec.get("record_every", 1))
    try:
        states = evolve_vacuum(phi0, dt, steps, record_every=record_every)
        lax = lax_residual(states, identity_tol=_tol(cfg, "lax_identity", tol_scale))
    except (EvolutionBlowupError, LaxIdentityError) as exc:
        _verdict_line("vacuum evolution", False, str(exc))
        return 1

    mod0 = np.abs(1.0 / states[0].u.values)
    drift = max(float(np.abs(np.abs(1.0 / s.u.values) - mod0).max()) for s in states[1:])
    res = vacuum_residual(states)
    tol_drift = _tol(cfg, "vacuum_drift", tol_scale)
    tol_res = _tol(cfg, "vacuum_residual", tol_scale)

    checks = {"modulus_drift": (drift, tol_drift), "eq15_residual": (res.linf, tol_res)}
    scale = sec.get("scale")
    if scale is not None:
        c = complex(scale[0], scale[1]) if isinstance(scale, list) else complex(scale)
        diff = scale_invariance_check(phi0, c, dt, steps, record_every=record_every)
        checks["scale_invariance"] = (diff.linf, _tol(cfg, "scale_invariance", tol_scale))

    mid = len(states) // 2
    for tag, idx in (("t0", 0), ("tmid", mid), ("tend", len(states) - 1)):
        write_field_csv(out / f"phi0_{tag}.csv", states[idx].phi0)
    payload = {
        "dt": dt, "steps": steps,
        "lax_relative_linf": lax.relative.linf,
        "lax_identity_defect": lax.identity_defect.linf,
        "checks": {k: {"value": v, "tol": t, "pass": bool(v <= t)} for k, (v, t) in checks.items()},
    }
    ok = all(c["pass"] for c in payload["checks"].values())
    payload["pass"] = bool(ok)
    _write_json(out / "vacuum_report.json", payload)
    for k, (v, t) in checks.items():
        _verdict_line(k, v <= t, f"value={v:.3e} tol={t:.0e}")
    return 0 if ok else 1


def cmd_figure2(cfg: dict, out: Path, tol_scale: float) -> int:
    eta, _, _ = _levels(cfg)
    grid = _grid_from_config(cfg, Grid1D(-10.0, 10.0, 1001))
    for name, which in (("a_phi", "phi"), ("b_psi", "psi"), ("c_u", "u"), ("d_w", "w")):
        write_field_csv(out / f"figure2_{name}.csv", eval_catalog(eta, which, grid))
    _verdict_line("figure2 CSV panels", True, str(out))
    return 0


def cmd_sweep(cfg: dict, out: Path, tol_scale: float) -> int:
    etas = cfg["sweep"].get("etas") or []
    if not etas:
        raise ConfigError("sweep.etas must be a non-empty list")
    summary = {}
    all_ok = True
    for eta in etas:
        sub = json.loads(json.dumps(cfg))
        sub["levels"] = {"eta": float(eta), "e0": None, "en": None}
        sub["grid"] = None
        sub["inputs"] = None
        sub_out = out / f"eta_{eta:g}"
        sub_out.mkdir(parents=True, exist_ok=True)
        code = cmd_verify(sub, sub_out, tol_scale)
        summary[f"{eta:g}"] = {"exit": code, "pass": code == 0}
        all_ok &= code == 0
    _write_json(out / "sweep_summary.json", {"etas": summary, "pass": bool(all_ok)})
    return 0 if all_ok else 1


_COMMANDS = {
    "riccati": cmd_riccati,
    "partner": cmd_partner,
    "verify": cmd_verify,
    "vacuum": cmd_vacuum,
    "figure2": cmd_figure2,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="nlsusy", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--out", help="output directory (overrides output_dir)")
    parser.add_argument("--tol-scale", type=float, default=1.0,
                        help="multiply every tolerance by this factor")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub.add_parser(name)
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        out = Path(args.out or cfg.get("output_dir") or "out")
        out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out, float(args.tol_scale))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
