"""Scenario runner: named experiments, flat config, deterministic artifacts.

Usage: waveortho <scenario> [--key value ...] [--config path]

Scenarios: sphere, strip, slit, spheroid, born, kernel-profile, riemann-decay.
Config values come from shipped defaults, then an optional flat key=value
file, then command-line overrides (which win). Angles are radians in files;
command-line keys may carry a -deg suffix instead. Exit code is 0 exactly
when every check the scenario declares passes its configured threshold.
"""

from __future__ import annotations

import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import born as brn
from . import geometry as geo
from . import method as mth
from . import oracles as orc
from .errors import SingularSystemError, UsageError

logger = logging.getLogger("waveortho.cli")


# ---------------------------------------------------------------------------
# Report plumbing


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class RunReport:
    scenario: str
    config: Dict[str, object]
    residuals: Dict[str, Optional[float]] = field(default_factory=dict)
    epsilon: Optional[float] = None
    metrics: Dict[str, object] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    wall_clock_s: float = 0.0
    outputs: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> Dict[str, object]:
        return {
            "scenario": self.scenario,
            "config": {k: _jsonable(v) for k, v in self.config.items()},
            "residuals": self.residuals,
            "epsilon": self.epsilon,
            "metrics": {k: _jsonable(v) for k, v in self.metrics.items()},
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
            ],
            "warnings": self.warnings,
            "wall_clock_s": self.wall_clock_s,
            "outputs": self.outputs,
        }

    def render(self) -> str:
        lines = [f"scenario: {self.scenario}"]
        for k in sorted(self.config):
            lines.append(f"  config {k} = {self.config[k]}")
        for name, r in self.residuals.items():
            shown = "n/a" if r is None else f"{r:.6e}"
            lines.append(f"  residual[{name}] = {shown}")
        if self.epsilon is not None:
            lines.append(f"  epsilon = {self.epsilon:.6e}")
        for k in sorted(self.metrics):
            v = self.metrics[k]
            shown = f"{v:.6e}" if isinstance(v, float) else str(v)
            lines.append(f"  metric {k} = {shown}")
        for c in self.checks:
            lines.append(f"  check {c.name}: {'PASS' if c.passed else 'FAIL'} ({c.detail})")
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        lines.append(f"  wall clock: {self.wall_clock_s:.2f} s")
        for p in self.outputs:
            lines.append(f"  wrote {p}")
        return "\n".join(lines)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


# ---------------------------------------------------------------------------
# Output files: fixed column names, 17 significant digits, atomic writes


def _sig(x: float) -> str:
    return f"{float(x):.17g}"


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".waveortho-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_columns(path: str, fmt: str, columns: Dict[str, np.ndarray]) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    if fmt == "csv":
        rows = [",".join(names)]
        for i in range(arrays[0].shape[0] if arrays else 0):
            rows.append(",".join(_sig(a[i]) for a in arrays))
        _atomic_write(path, "\n".join(rows) + "\n")
    elif fmt == "json":
        payload = {n: [float(x) for x in a] for n, a in zip(names, arrays)}
        _atomic_write(path, json.dumps(payload, indent=1) + "\n")
    else:
        raise UsageError(f"unknown output format {fmt!r}; expected csv or json")


def emit_pattern(path: str, fmt: str, pattern: mth.FarFieldPattern) -> None:
    amp = pattern.amplitude
    _emit_columns(
        path,
        fmt,
        {
            "theta_rad": pattern.angles,
            "re_amp": amp.real,
            "im_amp": amp.imag,
            "abs_amp": np.abs(amp),
        },
    )


def emit_profile(path: str, fmt: str, distance: np.ndarray, abs_phi: np.ndarray) -> None:
    _emit_columns(path, fmt, {"distance": distance, "abs_phi": abs_phi})


def emit_history(path: str, fmt: str, residuals: Sequence[float]) -> None:
    steps = np.arange(len(residuals), dtype=float)
    _emit_columns(path, fmt, {"step": steps, "residual": np.asarray(residuals, dtype=float)})


def emit_report(path: str, report: RunReport) -> None:
    _atomic_write(path, json.dumps(report.to_dict(), indent=1) + "\n")


# ---------------------------------------------------------------------------
# Configuration


_COMMON_DEFAULTS: Dict[str, object] = {"out": "", "format": "csv", "report_out": ""}

DEFAULTS: Dict[str, Dict[str, object]] = {
    "sphere": {
        "ka": 5.0,
        "bc": "soft",
        "basis": "spherical-modes",
        "basis_size": 0,
        "quad_resolution": 0,
        "solver": "diagonal",
        "lambda": 0.0,
        "angles": 181,
        "far_tol": 1e-8,
        "pw_polar_list": "4,6,8",
        "history_out": "",
    },
    "strip": {
        "kd": 16.0 * math.pi,
        "bc": "hard",
        "basis": "plane-waves",
        "basis_size": 0,
        "quad_resolution": 0,
        "solver": "diagonal",
        "lambda": 0.0,
        "angles": 181,
        "incidence": 0.0,
        "with_bem": True,
        "bem_nodes": 0,
        "kirchhoff_corr_min": 0.999,
        "null_step_tol": 1,
        "history_out": "",
    },
    "spheroid": {
        "ka": 5.0,
        "c_over_a": 2.0,
        "bc": "hard",
        "n_sources": 8,
        "quad_resolution": 0,
        "lambda": 0.0,
        "angles": 181,
        "residual_max": 0.2,
        "ratio_max": 3.0,
        "history_out": "",
    },
    "born": {
        "k": 1.0,
        "amplitude": 0.5,
        "width": 0.3,
        "half_extent": 0.9,
        "h": 0.06,
        "ring_radius": 0.0,
        "ring_points": 16,
        "alt_second_reading": False,
        "ls_mode": "auto",
        "first_tol": 1e-12,
    },
    "kernel-profile": {
        "ka": 10.0,
        "bc": "soft",
        "basis_size": 0,
        "quad_resolution": 0,
        "anchor": 0,
    },
    "riemann-decay": {
        "ka_list": "10,20,40",
        "bc": "hard",
        "separation": 0.2,
        "quad_resolution": 0,
        "decay_ratio_min": 2.0,
    },
}
DEFAULTS["slit"] = dict(DEFAULTS["strip"])
for _d in DEFAULTS.values():
    _d.update(_COMMON_DEFAULTS)


def _coerce(scenario: str, key: str, raw: object, default: object) -> object:
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise UsageError(
            f"bad value {raw!r} for config key '{key}' of scenario '{scenario}'"
        ) from None
    return text


def parse_config_file(path: str) -> Dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment; blank lines skipped."""
    out: Dict[str, str] = {}
    try:
        with open(path) as f:
            for ln, line in enumerate(f, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{ln}: expected 'key = value', got {line!r}")
                key, val = line.split("=", 1)
                out[key.strip().replace("-", "_")] = val.strip()
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e}") from None
    return out


def build_config(
    scenario: str,
    file_entries: Optional[Dict[str, str]] = None,
    overrides: Optional[Dict[str, str]] = None,
) -> Dict[str, object]:
    """Merge defaults, config file, and CLI overrides (in that precedence).

    Override keys ending in '_deg' are converted to radians when the base
    key is a float-valued angle slot; files always carry radians.
    """
    if scenario not in DEFAULTS:
        raise UsageError(
            f"unknown scenario {scenario!r}; expected one of: " + ", ".join(sorted(DEFAULTS))
        )
    defaults = DEFAULTS[scenario]
    cfg = dict(defaults)
    for source, allow_deg in ((file_entries, False), (overrides, True)):
        if not source:
            continue
        for key, raw in source.items():
            key = key.replace("-", "_")
            value = raw
            if allow_deg and key.endswith("_deg"):
                base = key[: -len("_deg")]
                if base in defaults and isinstance(defaults[base], float):
                    key, value = base, math.radians(float(raw))
            if key not in defaults:
                raise UsageError(f"unknown config key '{key}' for scenario '{scenario}'")
            cfg[key] = _coerce(scenario, key, value, defaults[key])
    return cfg


# ---------------------------------------------------------------------------
# Shared solve plumbing


def _relative_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def _normalized_corr(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(abs(np.vdot(b, a)) / (na * nb))


def _parse_solver(text: str) -> Tuple[str, int]:
    if text == "diagonal" or text == "galerkin":
        return text, 0
    if text.startswith("iterate:"):
        try:
            n = int(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad solver spec {text!r}") from None
        if n < 1:
            raise UsageError("iterate step count must be >= 1")
        return "iterate", n
    raise UsageError(f"unknown solver {text!r}; expected diagonal, galerkin, or iterate:N")


def _solve_all(
    s: geo.Surface,
    traces: mth.BasisTraces,
    u0: mth.IncidentField,
    sys: mth.GramSystem,
    lam: float,
    iterate_steps: int,
    report: RunReport,
    refine: bool = True,
):
    """Diagonal, Galerkin, and iterated solves with per-solver residuals.

    Returns (spectra dict, history). A singular Galerkin system downgrades
    to a warning; a Galerkin residual above the diagonal one is flagged as a
    residual-ordering violation. refine=False skips the iteration and its
    checks for configurations where the iteration is known non-contractive.
    """
    spectra: Dict[str, Optional[mth.DensitySpectrum]] = {}
    v_diag = mth.solve_diagonal(sys)
    spectra["diagonal"] = v_diag
    report.residuals["diagonal"] = mth.boundary_residual(s, traces, u0, v_diag)
    try:
        v_gal = mth.solve_galerkin(sys, lam=lam)
        spectra["galerkin"] = v_gal
        report.residuals["galerkin"] = mth.boundary_residual(s, traces, u0, v_gal)
    except SingularSystemError as e:
        spectra["galerkin"] = None
        report.residuals["galerkin"] = None
        report.warnings.append(f"galerkin solve unavailable: {e}")

    r_d, r_g = report.residuals["diagonal"], report.residuals["galerkin"]
    if r_g is not None and r_g > r_d * (1.0 + 1e-9) + 1e-12:
        report.warnings.append(
            f"residual ordering violated: galerkin {r_g:.3e} exceeds diagonal {r_d:.3e}"
        )
    rho = mth.iteration_spectral_radius(sys)
    report.metrics["iteration_spectral_radius"] = float(rho)
    if not refine:
        if rho >= 1.0:
            report.warnings.append(
                f"refinement not contractive here (spectral radius {rho:.3e}); skipped"
            )
        return spectra, []

    v_it, history = mth.refine_iterate(sys, iterate_steps)
    spectra["iterate"] = v_it
    report.residuals["iterate"] = mth.boundary_residual(s, traces, u0, v_it)
    step1 = mth.refine_iterate(sys, 1)[0]
    report.checks.append(
        Check(
            "iterate_step1_equals_diagonal",
            bool(np.array_equal(step1.v, v_diag.v)),
            "first refinement step must reproduce the diagonal solve bitwise",
        )
    )
    hist = np.asarray(history)
    # allowance for rounding jitter once the residual hits its floor
    noninc = bool(np.all(hist[1:] <= hist[:-1] * (1.0 + 1e-12) + 1e-14 * hist[0]))
    report.checks.append(
        Check(
            "residual_history_nonincreasing",
            noninc,
            f"{len(history)} entries, first {hist[0]:.3e}, last {hist[-1]:.3e}",
        )
    )
    if rho < 1.0 and spectra["galerkin"] is not None and lam == 0.0:
        # run the contraction out to its limit; 50 steps need not be enough
        # when the spectral radius is close to 1
        n_limit = iterate_steps
        if rho > 0.0:
            n_limit = max(
                n_limit, min(2_000_000, int(math.log(1e-9) / math.log(rho)) + 1)
            )
        v_lim = mth.refine_iterate(sys, n_limit)[0]
        gap = float(
            np.linalg.norm(v_lim.v - spectra["galerkin"].v)
            / max(np.linalg.norm(spectra["galerkin"].v), 1e-300)
        )
        detail = (
            f"relative gap {gap:.3e} after {n_limit} steps "
            f"at spectral radius {rho:.10f}"
        )
        if gap > 1e-6 and 0.0 < rho < 1.0:
            n_need = int(math.log(1e-9) / math.log(rho)) + 1
            if n_need > n_limit:
                detail += f"; full contraction needs ~{n_need:.0e} steps"
        report.checks.append(
            Check(
                "iterate_limit_matches_galerkin",
                gap <= 1e-6,
                detail,
            )
        )
    return spectra, history


def _write_history(cfg, report, history) -> None:
    if cfg.get("history_out"):
        emit_history(cfg["history_out"], cfg["format"], history)
        report.outputs.append(cfg["history_out"])


# ---------------------------------------------------------------------------
# Sphere scenario (series comparison, and the plane-wave Im diagnostic)


def _sphere_pw_directions(n_polar: int) -> np.ndarray:
    """Direction grid: Gauss nodes in cos(theta) times midpoint azimuths."""
    u, _ = geo.gauss_legendre(n_polar)
    phis = 2.0 * np.pi * (np.arange(2 * n_polar) + 0.5) / (2 * n_polar)
    st = np.sqrt(1.0 - u**2)
    d = np.empty((n_polar * 2 * n_polar, 3))
    idx = 0
    for ui, si in zip(u, st):
        for p in phis:
            d[idx] = (si * np.cos(p), si * np.sin(p), ui)
            idx += 1
    return d


def _sphere_surface_odd_phi(radius: float, resolution: int) -> geo.Surface:
    """Tensor sphere grid with an odd azimuth count.

    An even azimuth count makes the node set antipodally symmetric, which
    forces every quadrature pairing of plane-wave traces to be exactly real
    regardless of resolution; an odd count breaks the pairing so the
    imaginary-part diagnostic can actually measure quadrature error.
    """
    u, wu = geo.gauss_legendre(resolution)
    n_phi = 2 * resolution + 1
    phis = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    st = np.sqrt(1.0 - u**2)
    pos = np.empty((resolution * n_phi, 3))
    w = np.empty(resolution * n_phi)
    idx = 0
    for ui, si, wi in zip(u, st, wu):
        for p in phis:
            pos[idx] = (
                radius * si * np.cos(p),
                radius * si * np.sin(p),
                radius * ui,
            )
            w[idx] = radius**2 * wi * (2.0 * np.pi / n_phi)
            idx += 1
    normals = pos / radius
    return geo.Surface(
        positions=pos,
        normals=normals,
        weights=w,
        closed=True,
        dim=3,
        char_size=2.0 * radius,
    )


def run_sphere(cfg: Dict[str, object]) -> RunReport:
    report = RunReport(scenario="sphere", config=dict(cfg))
    t0 = time.perf_counter()
    ka = float(cfg["ka"])
    if ka <= 0:
        raise UsageError("ka must be positive")
    k = ka  # unit radius
    bc = mth.BoundaryCondition.from_string(str(cfg["bc"]))
    # propagation along +z so the polar angle of the pattern is measured
    # from the forward direction, matching the series oracle
    u0 = mth.IncidentField(direction=np.array([0.0, 0.0, 1.0]), k=k)
    _, iterate_steps = ("", 50)
    if str(cfg["solver"]).startswith("iterate:"):
        _, iterate_steps = _parse_solver(str(cfg["solver"]))
    else:
        _parse_solver(str(cfg["solver"]))

    basis_kind = str(cfg["basis"])
    if basis_kind == "spherical-modes":
        n_order = int(cfg["basis_size"]) or (math.ceil(ka) + 8)
        res = int(cfg["quad_resolution"]) or max(32, math.ceil(ka) + 16)
        s = geo.make_surface(geo.Sphere(1.0), res)
        basis = mth.SphericalModeBasis(max_order=n_order, k=k)
        traces = mth.eval_basis_trace(basis, bc, s)
        sys = mth.assemble_gram(traces, s).with_incident(
            mth.project_incident(traces, s, u0, bc)
        )
        spectra, history = _solve_all(s, traces, u0, sys, float(cfg["lambda"]), iterate_steps, report)
        v = spectra["diagonal"]
        report.epsilon = mth.epsilon_diagnostic(sys, v)
        angles = np.linspace(0.0, np.pi, int(cfg["angles"]))
        pattern = mth.far_field(basis, v, angles)
        _, mie_ff, _ = orc.mie_series(bc, ka, angles)
        rel = _relative_l2(pattern.amplitude, mie_ff.amplitude)
        corr = _normalized_corr(pattern.amplitude, mie_ff.amplitude)
        report.metrics["far_rel_l2_vs_mie"] = rel
        report.metrics["far_corr_vs_mie"] = corr
        report.checks.append(
            Check(
                "far_field_matches_mie",
                rel <= float(cfg["far_tol"]),
                f"relative L2 {rel:.3e} <= {float(cfg['far_tol']):.1e}",
            )
        )
        if cfg["out"]:
            emit_pattern(str(cfg["out"]), str(cfg["format"]), pattern)
            report.outputs.append(str(cfg["out"]))
        _write_history(cfg, report, history)
    elif basis_kind == "plane-waves":
        if bc is not mth.BoundaryCondition.HARD:
            report.warnings.append(
                "imaginary-part diagnostic is reported for the hard condition"
            )
        polar_counts = [int(x) for x in str(cfg["pw_polar_list"]).split(",") if x.strip()]
        if len(polar_counts) < 2:
            raise UsageError("pw_polar_list needs at least two grid sizes")
        ratios = []
        last = None
        for npol in polar_counts:
            dirs = _sphere_pw_directions(npol)
            res = int(cfg["quad_resolution"]) or (npol + 4)
            s = _sphere_surface_odd_phi(1.0, res)
            basis = mth.PlaneWaveBasis(directions=dirs, k=k)
            traces = mth.eval_basis_trace(basis, bc, s)
            sys = mth.assemble_gram(traces, s).with_incident(
                mth.project_incident(traces, s, u0, bc)
            )
            v = mth.solve_diagonal(sys)
            ratio = float(np.max(np.abs(v.v.imag)) / np.max(np.abs(v.v)))
            ratios.append(ratio)
            report.metrics[f"im_ratio_npolar_{npol}"] = ratio
            last = (s, traces, sys, v)
        s, traces, sys, v = last
        _solve_all(s, traces, u0, sys, float(cfg["lambda"]), iterate_steps, report, refine=False)
        report.epsilon = mth.epsilon_diagnostic(sys, v)
        decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
        report.checks.append(
            Check(
                "im_ratio_decreases_under_refinement",
                decreasing,
                "ratios " + ", ".join(f"{r:.3e}" for r in ratios),
            )
        )
        if cfg["out"] or cfg["history_out"]:
            report.warnings.append(
                "plane-wave diagnostic writes no data table; use report_out"
            )
    else:
        raise UsageError(
            "sphere scenario supports basis = spherical-modes or plane-waves"
        )
    report.wall_clock_s = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# Strip and slit scenarios


def _strip_direction_angles(kd: float, basis_size: int) -> np.ndarray:
    """Midpoint grid in sin(theta) over the visible band, 4 per wavelength."""
    m = basis_size or int(np.ceil(4.0 * kd / (2.0 * np.pi)))
    sines = -1.0 + (np.arange(m) + 0.5) * (2.0 / m)
    return np.arcsin(np.clip(sines, -1.0, 1.0))


def _strip_pattern(
    th_grid: np.ndarray, th_dirs: np.ndarray, v: np.ndarray, kd: float, bc: mth.BoundaryCondition
) -> np.ndarray:
    """Far pattern of the solved sheet density: band-limited sinc sum.

    The hard condition radiates through a dipole sheet, hence the extra
    obliquity cosine.
    """
    arg = 0.5 * kd * (np.sin(th_grid)[:, None] - np.sin(th_dirs)[None, :])
    p = np.sinc(arg / np.pi) @ v
    if bc is mth.BoundaryCondition.HARD:
        p = p * np.cos(th_grid)
    return p


def _first_null_index(a: np.ndarray, th: np.ndarray, side: int) -> Optional[int]:
    """First local minimum of |pattern| below 20% of peak, walking out from the peak."""
    th_peak = th[int(np.argmax(a))]
    sel = th > th_peak if side > 0 else th < th_peak
    idx = np.where(sel)[0]
    if side < 0:
        idx = idx[::-1]
    peak = a.max()
    for j in range(1, len(idx) - 1):
        i0, i1, i2 = idx[j - 1], idx[j], idx[j + 1]
        if a[i1] < a[i0] and a[i1] <= a[i2] and a[i1] < 0.2 * peak:
            return int(i1)
    return None


def _half_power_steps(a: np.ndarray) -> int:
    """Main-lobe width as a count of grid steps between half-power crossings."""
    ipk = int(np.argmax(a))
    half = a[ipk] / math.sqrt(2.0)
    hi = ipk
    while hi + 1 < len(a) and a[hi] > half:
        hi += 1
    lo = ipk
    while lo - 1 >= 0 and a[lo] > half:
        lo -= 1
    return hi - lo


def _run_strip_pipeline(cfg: Dict[str, object], scenario: str, bc_solve: mth.BoundaryCondition) -> RunReport:
    report = RunReport(scenario=scenario, config=dict(cfg))
    t0 = time.perf_counter()
    kd = float(cfg["kd"])
    if kd <= 0:
        raise UsageError("kd must be positive")
    if str(cfg["basis"]) != "plane-waves":
        raise UsageError(f"{scenario} scenario supports basis = plane-waves")
    k = 2.0 * np.pi  # unit wavelength
    d = kd / k
    _, iterate_steps = ("", 50)
    if str(cfg["solver"]).startswith("iterate:"):
        _, iterate_steps = _parse_solver(str(cfg["solver"]))
    else:
        _parse_solver(str(cfg["solver"]))

    alpha = float(cfg["incidence"])
    if not abs(alpha) < 0.5 * math.pi:
        raise UsageError("incidence angle must lie strictly inside (-pi/2, pi/2)")
    th_d = _strip_direction_angles(kd, int(cfg["basis_size"]))
    dirs = np.column_stack([np.sin(th_d), np.cos(th_d)])
    basis = mth.PlaneWaveBasis(directions=dirs, k=k)
    res = int(cfg["quad_resolution"]) or max(32, int(np.ceil(8.0 * kd / (2.0 * np.pi))))
    s = geo.make_surface(geo.Strip(width=d), res)
    u0 = mth.IncidentField(direction=np.array([math.sin(alpha), -math.cos(alpha)]), k=k)
    traces = mth.eval_basis_trace(basis, bc_solve, s)
    sys = mth.assemble_gram(traces, s).with_incident(
        mth.project_incident(traces, s, u0, bc_solve)
    )
    spectra, history = _solve_all(s, traces, u0, sys, float(cfg["lambda"]), iterate_steps, report)
    v = spectra["diagonal"]
    report.epsilon = mth.epsilon_diagnostic(sys, v)

    # Aperture density against the geometric-optics field: correlate the
    # normal-trace spectrum samples with the sinc spectrum of the aperture.
    sinc_ref = np.sinc((0.5 * kd * (np.sin(th_d) - math.sin(alpha))) / np.pi)
    density = np.cos(th_d) * v.v if bc_solve is mth.BoundaryCondition.HARD else -v.v
    corr = _normalized_corr(density, sinc_ref.astype(complex))
    factor = complex(np.vdot(sinc_ref, density) / np.vdot(sinc_ref, sinc_ref))
    report.metrics["kirchhoff_corr"] = corr
    report.metrics["kirchhoff_factor_abs"] = abs(factor)
    report.metrics["kirchhoff_factor_re"] = factor.real
    report.metrics["kirchhoff_factor_im"] = factor.imag
    report.checks.append(
        Check(
            "kirchhoff_correlation",
            corr >= float(cfg["kirchhoff_corr_min"]),
            f"correlation {corr:.6f} >= {float(cfg['kirchhoff_corr_min'])}",
        )
    )

    n_angles = int(cfg["angles"])
    th_grid = np.linspace(-np.pi, np.pi, n_angles)
    pattern_amp = _strip_pattern(th_grid, th_d, v.v, kd, bc_solve)
    pattern = mth.FarFieldPattern(angles=th_grid, amplitude=pattern_amp)

    if bool(cfg["with_bem"]):
        nb = int(cfg["bem_nodes"]) or int(round(240.0 * kd / np.pi))
        nb += nb % 2
        try:
            contour = orc.bem_strip_contour(d, k, nb)
            _, ff = orc.bem_dense_solve(contour, bc_solve, k, u0, far_angles=th_grid)
            upper = np.abs(th_grid) < 0.5 * np.pi - 1e-9
            th_up = th_grid[upper]
            a_m = np.abs(pattern_amp[upper])
            a_b = np.abs(ff.amplitude[upper])
            rel = math.sqrt(max(0.0, 1.0 - _normalized_corr(a_m, a_b) ** 2))
            report.metrics["bem_pattern_rel_l2"] = rel
            report.metrics["bem_nodes_used"] = nb
            tol = int(cfg["null_step_tol"])
            for side, tag in ((1, "pos"), (-1, "neg")):
                im = _first_null_index(a_m, th_up, side)
                ib = _first_null_index(a_b, th_up, side)
                if im is None and ib is None:
                    report.checks.append(
                        Check(
                            f"first_null_{tag}",
                            True,
                            "no null on this side for either solver",
                        )
                    )
                    continue
                if im is None or ib is None:
                    which = "method" if im is None else "oracle"
                    report.checks.append(
                        Check(f"first_null_{tag}", False, f"{which} pattern has no null here")
                    )
                    continue
                report.metrics[f"first_null_{tag}_method_rad"] = float(th_up[im])
                report.metrics[f"first_null_{tag}_bem_rad"] = float(th_up[ib])
                report.checks.append(
                    Check(
                        f"first_null_{tag}",
                        abs(im - ib) <= tol,
                        f"method {th_up[im]:.4f} rad, oracle {th_up[ib]:.4f} rad, "
                        f"{abs(im - ib)} grid steps apart",
                    )
                )
            wm, wb = _half_power_steps(a_m), _half_power_steps(a_b)
            report.metrics["main_lobe_steps_method"] = wm
            report.metrics["main_lobe_steps_bem"] = wb
            report.checks.append(
                Check(
                    "main_lobe_width",
                    abs(wm - wb) <= tol,
                    f"half-power width {wm} vs {wb} grid steps",
                )
            )
        except (SingularSystemError, ValueError) as e:
            report.checks.append(Check("bem_oracle", False, f"oracle failed: {e}"))

    if cfg["out"]:
        emit_pattern(str(cfg["out"]), str(cfg["format"]), pattern)
        report.outputs.append(str(cfg["out"]))
    _write_history(cfg, report, history)
    report.wall_clock_s = time.perf_counter() - t0
    return report


def run_strip(cfg: Dict[str, object]) -> RunReport:
    return _run_strip_pipeline(cfg, "strip", mth.BoundaryCondition.from_string(str(cfg["bc"])))


def run_slit(cfg: Dict[str, object]) -> RunReport:
    """Slit in a screen via the Babinet complement of the strip problem."""
    bc = mth.BoundaryCondition.from_string(str(cfg["bc"]))
    comp = (
        mth.BoundaryCondition.SOFT
        if bc is mth.BoundaryCondition.HARD
        else mth.BoundaryCondition.HARD
    )
    report = _run_strip_pipeline(cfg, "slit", comp)
    report.warnings.append(
        f"slit diffraction computed as the Babinet complement: {comp.value} strip"
    )
    return report


# ---------------------------------------------------------------------------
# Spheroid scenario


def run_spheroid(cfg: Dict[str, object]) -> RunReport:
    report = RunReport(scenario="spheroid", config=dict(cfg))
    t0 = time.perf_counter()
    ka = float(cfg["ka"])
    c_over_a = float(cfg["c_over_a"])
    if c_over_a <= 1.0:
        raise UsageError("c_over_a must exceed 1 (prolate)")
    a, c = 1.0, c_over_a
    k = ka
    bc = mth.BoundaryCondition.from_string(str(cfg["bc"]))
    n_src = int(cfg["n_sources"])
    if n_src < 1:
        raise UsageError("n_sources must be >= 1")
    res = int(cfg["quad_resolution"]) or max(32, 8 * math.ceil(ka))
    s = geo.make_surface(geo.Spheroid(equatorial_radius=a, polar_radius=c), res)
    u0 = mth.IncidentField(direction=np.array([0.0, 0.0, -1.0]), k=k)

    # axial sources on the focal chord, placed at Gauss nodes
    focal = math.sqrt(c * c - a * a)
    nodes, _ = geo.gauss_legendre(n_src)
    locs = np.zeros((n_src, 3))
    locs[:, 2] = focal * nodes
    basis = mth.PointSourceBasis(locations=locs, k=k)
    traces = mth.eval_basis_trace(basis, bc, s)
    sys = mth.assemble_gram(traces, s).with_incident(
        mth.project_incident(traces, s, u0, bc)
    )
    spectra, history = _solve_all(s, traces, u0, sys, float(cfg["lambda"]), 50, report)
    report.epsilon = mth.epsilon_diagnostic(sys, spectra["diagonal"])

    r_d = report.residuals["diagonal"]
    r_g = report.residuals["galerkin"]
    rmax = float(cfg["residual_max"])
    ratio_max = float(cfg["ratio_max"])
    report.checks.append(
        Check("diagonal_residual_small", r_d <= rmax, f"{r_d:.4f} <= {rmax}")
    )
    if r_g is None:
        report.checks.append(Check("galerkin_residual_small", False, "galerkin unavailable"))
    else:
        report.checks.append(
            Check("galerkin_residual_small", r_g <= rmax, f"{r_g:.4f} <= {rmax}")
        )
        report.checks.append(
            Check(
                "diagonal_within_ratio_of_galerkin",
                r_d <= ratio_max * r_g,
                f"{r_d:.4f} <= {ratio_max} x {r_g:.4f}",
            )
        )
    if cfg["out"]:
        angles = np.linspace(-np.pi, np.pi, int(cfg["angles"]))
        pattern = mth.far_field(basis, spectra["diagonal"], angles)
        emit_pattern(str(cfg["out"]), str(cfg["format"]), pattern)
        report.outputs.append(str(cfg["out"]))
    _write_history(cfg, report, history)
    report.wall_clock_s = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# Born scenario


def run_born(cfg: Dict[str, object]) -> RunReport:
    report = RunReport(scenario="born", config=dict(cfg))
    t0 = time.perf_counter()
    k = float(cfg["k"])
    pot = orc.gaussian_potential(
        float(cfg["amplitude"]), float(cfg["width"]), float(cfg["half_extent"]),
        float(cfg["h"]), dim=2,
    )
    u0 = mth.IncidentField(direction=np.array([0.0, -1.0]), k=k)
    r_ring = float(cfg["ring_radius"]) or 6.0 * float(cfg["half_extent"])
    n_ring = int(cfg["ring_points"])
    ring_th = np.linspace(-np.pi, np.pi, n_ring, endpoint=False)
    pts = np.column_stack([r_ring * np.sin(ring_th), r_ring * np.cos(ring_th)])
    alt = bool(cfg["alt_second_reading"])

    res = {
        order: brn.born_approximation(
            pot, u0, k, order, pts, alt_second_reading=alt
        )
        for order in ("first", "second-standard", "second-modified")
    }
    report.metrics["beta_min"] = float(res["first"].beta_used.min())
    report.metrics["beta_max"] = float(res["first"].beta_used.max())

    # plain first order, with the weight overridden to one, against the
    # directly summed first scattering integral
    plain = brn.born_approximation(pot, u0, k, "first", pts, beta_override=1.0)
    gout = brn._exterior_green(pot, k, pts)
    direct = u0.values(pts) - gout @ (pot.flat() * u0.values(pot.points()))
    dev = float(np.max(np.abs(plain.field - direct)))
    report.metrics["first_unit_beta_dev"] = dev
    report.checks.append(
        Check("first_equals_plain_born", dev <= float(cfg["first_tol"]),
              f"max deviation {dev:.2e} <= {float(cfg['first_tol']):.0e}")
    )

    # global phase rotation of the disturbance
    phi = 0.7
    pot_rot = orc.VolumePotential(
        origin=pot.origin, h=pot.h, values=np.exp(1j * phi) * pot.values
    )
    mod_rot = brn.born_approximation(pot_rot, u0, k, "second-modified", pts,
                                     alt_second_reading=alt)
    std_rot = brn.born_approximation(pot_rot, u0, k, "second-standard", pts,
                                     alt_second_reading=alt)
    scale = float(np.max(np.abs(res["second-modified"].second_term)))
    inv_dev = float(np.max(np.abs(mod_rot.second_term - res["second-modified"].second_term)))
    std_dev = float(np.max(np.abs(std_rot.second_term - res["second-standard"].second_term)))
    report.metrics["modified_phase_invariance_dev"] = inv_dev
    report.metrics["standard_phase_change"] = std_dev
    report.checks.append(
        Check("modified_second_term_phase_invariant",
              inv_dev <= 1e-13 * max(scale, 1e-300),
              f"deviation {inv_dev:.2e} at term scale {scale:.2e}")
    )
    report.checks.append(
        Check("standard_second_term_phase_sensitive",
              std_dev > 1e-6 * scale,
              f"changed by {std_dev:.2e} under the same rotation")
    )

    ip = float(np.vdot(res["second-standard"].second_term,
                       res["second-modified"].second_term).real)
    nrm = float(np.linalg.norm(res["second-standard"].second_term)
                * np.linalg.norm(res["second-modified"].second_term))
    report.metrics["second_terms_cosine"] = ip / nrm if nrm > 0 else 0.0
    report.checks.append(
        Check("second_terms_opposite_sign", ip < 0.0,
              f"Re inner product {ip:.3e} (normalized {ip / nrm if nrm else 0.0:+.3f})")
    )

    # comparative errors against the volume-equation oracle
    records: List[logging.LogRecord] = []
    handler = logging.Handler()
    handler.emit = records.append  # type: ignore[assignment]
    orc.logger.addHandler(handler)
    try:
        u_grid = orc.lippmann_schwinger(pot, u0, k, mode=str(cfg["ls_mode"]))
    finally:
        orc.logger.removeHandler(handler)
    for rec in records:
        report.warnings.append(rec.getMessage())
    ref = orc.scattered_field_at(pot, u_grid, u0, k, pts)
    for order in ("first", "second-standard", "second-modified"):
        err = _relative_l2(res[order].field, ref)
        report.metrics[f"err_vs_oracle_{order}"] = err

    if cfg["out"]:
        pattern = mth.FarFieldPattern(angles=ring_th, amplitude=res["second-modified"].field)
        emit_pattern(str(cfg["out"]), str(cfg["format"]), pattern)
        report.outputs.append(str(cfg["out"]))
    report.wall_clock_s = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# Kernel profile scenario


def run_kernel_profile(cfg: Dict[str, object]) -> RunReport:
    report = RunReport(scenario="kernel-profile", config=dict(cfg))
    t0 = time.perf_counter()
    ka = float(cfg["ka"])
    k = ka
    bc = mth.BoundaryCondition.from_string(str(cfg["bc"]))
    n_order = int(cfg["basis_size"]) or (math.ceil(ka) + 8)
    res = int(cfg["quad_resolution"]) or max(32, math.ceil(ka) + 16)
    s = geo.make_surface(geo.Sphere(1.0), res)
    basis = mth.SphericalModeBasis(max_order=n_order, k=k)
    traces = mth.eval_basis_trace(basis, bc, s)
    sys = mth.assemble_gram(traces, s)
    anchor = int(cfg["anchor"])
    dist, absphi = mth.kernel_profile(s, traces, sys.beta, anchor)

    report.metrics["profile_points"] = int(dist.shape[0])
    report.metrics["peak_value"] = float(absphi[0])
    report.checks.append(
        Check("peak_at_zero_distance",
              bool(dist[0] == 0.0 and absphi[0] >= absphi.max()),
              f"|Phi| at d=0 is {absphi[0]:.4e}, max elsewhere {absphi[1:].max():.4e}")
    )
    herm = float(np.max(np.abs(sys.g - sys.g.conj().T)))
    report.checks.append(
        Check("gram_hermitian", herm == 0.0, f"max |G - G^H| = {herm:.2e}")
    )
    if cfg["out"]:
        emit_profile(str(cfg["out"]), str(cfg["format"]), dist, absphi)
        report.outputs.append(str(cfg["out"]))
    report.wall_clock_s = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# Riemann decay scenario


def run_riemann_decay(cfg: Dict[str, object]) -> RunReport:
    report = RunReport(scenario="riemann-decay", config=dict(cfg))
    t0 = time.perf_counter()
    bc = mth.BoundaryCondition.from_string(str(cfg["bc"]))
    sep = float(cfg["separation"])
    if not 0.0 < sep < 2.0:
        raise UsageError("separation must lie in (0, 2)")
    ka_values = [float(x) for x in str(cfg["ka_list"]).split(",") if x.strip()]
    if len(ka_values) < 2:
        raise UsageError("ka_list needs at least two values")
    sh = 0.5 * sep
    ch = math.sqrt(1.0 - sh * sh)
    dirs = np.array([[sh, 0.0, ch], [-sh, 0.0, ch]])

    offdiag = []
    for ka in ka_values:
        k = ka
        res = int(cfg["quad_resolution"]) or (math.ceil(ka) + 24)
        s = geo.make_surface(geo.Sphere(1.0), res)
        basis = mth.PlaneWaveBasis(directions=dirs, k=k)
        traces = mth.eval_basis_trace(basis, bc, s)
        sys = mth.assemble_gram(traces, s)
        g = sys.g
        val = float(np.abs(g[0, 1]) / math.sqrt(g[0, 0].real * g[1, 1].real))
        offdiag.append(val)
        report.metrics[f"offdiag_ka_{ka:g}"] = val

    rmin = float(cfg["decay_ratio_min"])
    for (ka1, v1), (ka2, v2) in zip(
        zip(ka_values, offdiag), zip(ka_values[1:], offdiag[1:])
    ):
        ratio = v1 / v2 if v2 > 0 else math.inf
        report.metrics[f"decay_ratio_{ka1:g}_to_{ka2:g}"] = ratio
        report.checks.append(
            Check(
                f"decay_ka_{ka1:g}_to_{ka2:g}",
                ratio >= rmin,
                f"|G_12| fell {ratio:.2f}x (needs >= {rmin}x)",
            )
        )
    if cfg["out"]:
        emit_report(str(cfg["out"]), report)
        report.outputs.append(str(cfg["out"]))
    report.wall_clock_s = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# Dispatch and entry point


_RUNNERS = {
    "sphere": run_sphere,
    "strip": run_strip,
    "slit": run_slit,
    "spheroid": run_spheroid,
    "born": run_born,
    "kernel-profile": run_kernel_profile,
    "riemann-decay": run_riemann_decay,
}


def run_scenario(name: str, cfg: Dict[str, object]) -> RunReport:
    if name not in _RUNNERS:
        raise UsageError(
            f"unknown scenario {name!r}; expected one of: " + ", ".join(sorted(_RUNNERS))
        )
    report = _RUNNERS[name](cfg)
    if cfg.get("report_out"):
        emit_report(str(cfg["report_out"]), report)
        report.outputs.append(str(cfg["report_out"]))
    return report


def _parse_argv(argv: Sequence[str]) -> Tuple[str, Optional[str], Dict[str, str]]:
    if not argv or argv[0] in ("-h", "--help"):
        raise UsageError(__doc__.strip())
    scenario = argv[0]
    config_path = None
    overrides: Dict[str, str] = {}
    i = 1
    while i < len(argv):
        tok = argv[i]
        if not tok.startswith("--"):
            raise UsageError(f"expected --key, got {tok!r}")
        if i + 1 >= len(argv):
            raise UsageError(f"missing value for {tok}")
        key, val = tok[2:], argv[i + 1]
        if key == "config":
            config_path = val
        else:
            overrides[key] = val
        i += 2
    return scenario, config_path, overrides


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        scenario, config_path, overrides = _parse_argv(argv)
        file_entries = parse_config_file(config_path) if config_path else None
        cfg = build_config(scenario, file_entries, overrides)
        report = run_scenario(scenario, cfg)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    print(report.render())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
