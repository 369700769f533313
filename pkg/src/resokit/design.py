"""Application profiles, spec checking, tuning evaluation, and
constrained design-space search.

Built-in profiles cover the reference-oscillator family (center frequency
N x 38.4 MHz with Q = 100000/N), a 2 GHz VCO, and standard band-pass
filter bands. Informational entries (phase noise, temperature behavior,
aging) are stored and reported, never computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import analytic, transduction
from .core import (BeamGeometry, DiskGeometry, Material, Transducer,
                   VibrationAxis)
from .errors import (InfeasibleDesignError, InstabilityError, InvariantError,
                     SchemaError, UnknownPresetError)
from .fab import ProcessModel, check_fab_constraints, release_tunnel_depth
from .units import parse_quantity

_REVERIFY_RTOL = 1e-9


def _as_interval(value, what: str):
    lo, hi = float(value[0]), float(value[1])
    if not lo <= hi:
        raise InvariantError(f"{what}: empty interval ({lo}, {hi})")
    return (lo, hi)


@dataclass(frozen=True)
class SpecProfile:
    """Application requirement set.

    center_frequency is either a single Hz value or a tuple of (lo, hi)
    Hz bands. Criteria set to None are not applicable for the profile.
    informational holds display-only strings.
    """

    name: str
    center_frequency: object
    q_required: float | None = None
    bandpass: tuple | None = None
    impedance_range: tuple | None = None
    dc_voltage_range: tuple | None = None
    tuning_required: float | None = None
    informational: tuple = ()

    def __post_init__(self):
        if isinstance(self.center_frequency, (int, float)):
            if self.center_frequency <= 0:
                raise InvariantError("center_frequency must be > 0")
            object.__setattr__(self, "center_frequency", float(self.center_frequency))
        else:
            bands = tuple(_as_interval(b, f"{self.name} band") for b in self.center_frequency)
            if not bands or any(b[0] <= 0 for b in bands):
                raise InvariantError("frequency bands must be positive and non-empty")
            object.__setattr__(self, "center_frequency", bands)
        for field_name in ("bandpass", "impedance_range", "dc_voltage_range"):
            v = getattr(self, field_name)
            if v is not None:
                object.__setattr__(self, field_name, _as_interval(v, field_name))
        if self.q_required is not None and self.q_required <= 0:
            raise InvariantError("q_required must be > 0")
        if self.tuning_required is not None and self.tuning_required <= 0:
            raise InvariantError("tuning_required must be > 0")
        if isinstance(self.informational, dict):
            object.__setattr__(self, "informational",
                               tuple(sorted(self.informational.items())))
        else:
            object.__setattr__(self, "informational", tuple(self.informational))

    @property
    def frequency_bands(self) -> tuple:
        """Target frequency intervals (a center collapses to a point)."""
        if isinstance(self.center_frequency, float):
            return ((self.center_frequency, self.center_frequency),)
        return self.center_frequency

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "center_frequency": (self.center_frequency
                                 if isinstance(self.center_frequency, float)
                                 else [list(b) for b in self.center_frequency]),
            "q_required": self.q_required,
            "bandpass": list(self.bandpass) if self.bandpass else None,
            "impedance_range": list(self.impedance_range) if self.impedance_range else None,
            "dc_voltage_range": list(self.dc_voltage_range) if self.dc_voltage_range else None,
            "tuning_required": self.tuning_required,
            "informational": dict(self.informational),
        }


def profile_from_dict(d: dict) -> SpecProfile:
    known = {"name", "center_frequency", "q_required", "bandpass",
             "impedance_range", "dc_voltage_range", "tuning_required",
             "informational", "schema_version"}
    unknown = set(d) - known
    if unknown:
        raise SchemaError(f"profile: unknown fields {sorted(unknown)}")
    if "name" not in d or "center_frequency" not in d:
        raise SchemaError("profile: name and center_frequency are required")
    cf = d["center_frequency"]
    if isinstance(cf, list):
        cf = tuple((parse_quantity(b[0]), parse_quantity(b[1])) for b in cf)
    else:
        cf = parse_quantity(cf)

    def interval(key):
        v = d.get(key)
        return None if v is None else (parse_quantity(v[0]), parse_quantity(v[1]))

    def scalar(key):
        v = d.get(key)
        return None if v is None else parse_quantity(v)

    return SpecProfile(name=str(d["name"]), center_frequency=cf,
                       q_required=scalar("q_required"), bandpass=interval("bandpass"),
                       impedance_range=interval("impedance_range"),
                       dc_voltage_range=interval("dc_voltage_range"),
                       tuning_required=scalar("tuning_required"),
                       informational=d.get("informational", {}))


# ---------------------------------------------------------------------------
# built-in profiles

_OSC_BASE_HZ = 38.4e6
_OSC_BASE_Q = 100000.0


def oscillator_profile(n: int = 1) -> SpecProfile:
    """Reference oscillator: center N x 38.4 MHz, Q = 100000/N."""
    if n < 1:
        raise InvariantError(f"oscillator multiplier must be >= 1, got {n}")
    return SpecProfile(
        name=f"oscillator-n{n}",
        center_frequency=n * _OSC_BASE_HZ,
        q_required=_OSC_BASE_Q / n,
        impedance_range=(50.0, 10e3),
        dc_voltage_range=(1.2, 5.0),
        informational={
            "phase_noise": "-117 dBc/Hz @ 400 kHz; -160 dBc/Hz @ 20 MHz",
            "temperature_range": "-40 to +100 C",
            "stability_temperature": "+/- 0.1 ppm/C (compensated quartz reference)",
            "stability_aging": "10 ppm over 10 years (quartz reference)",
            "tuning": "if possible",
        })


def vco_profile() -> SpecProfile:
    return SpecProfile(
        name="vco",
        center_frequency=2e9,
        q_required=1000.0,
        dc_voltage_range=(2.4, 2.4),
        tuning_required=200e6,
        informational={
            "phase_noise": "-140.7 dBc/Hz @ 600 kHz",
            "temperature_range": "-40 to +100 C",
            "tuning": "> 200-300 MHz required",
        })


def _filter_profile(name, bands, bandpass) -> SpecProfile:
    return SpecProfile(
        name=name, center_frequency=bands, bandpass=bandpass,
        impedance_range=(50.0, 50.0),
        informational={
            "insertion_loss": "-1.5 dB (-2.5 dB GSM)",
            "rejection": "-35 dB (-30 dB GSM)",
            "temperature_range": "-40 to +100 C",
            "tuning": "if possible",
        })


def builtin_profiles() -> tuple:
    """All built-in application profiles."""
    return (
        oscillator_profile(1), oscillator_profile(2),
        oscillator_profile(3), oscillator_profile(4),
        vco_profile(),
        _filter_profile("filter-wimax", ((2.3e9, 2.7e9), (3.3e9, 3.7e9)), (1.5e6, 10e6)),
        _filter_profile("filter-wifi", ((2.4e9, 2.5e9), (4.9e9, 5.9e9)), (20e6, 20e6)),
        _filter_profile("filter-dvbh", ((450e6, 850e6),), (5e6, 8e6)),
        _filter_profile("filter-gsm-egsb-tx", ((850e6, 915e6),), (35e6, 35e6)),
        _filter_profile("filter-gsm-egsb-rx", ((925e6, 960e6),), (35e6, 35e6)),
        _filter_profile("filter-gsm-dsc-tx", ((1710e6, 1785e6),), (75e6, 75e6)),
        _filter_profile("filter-gsm-dsc-rx", ((1805e6, 1880e6),), (75e6, 75e6)),
    )


def profile_by_name(name: str) -> SpecProfile:
    for p in builtin_profiles():
        if p.name == name:
            return p
    raise UnknownPresetError(
        f"unknown profile {name!r}; built-ins: {[p.name for p in builtin_profiles()]}")


# ---------------------------------------------------------------------------
# candidates

@dataclass(frozen=True)
class CandidateAnalysis:
    """Derived figures of one analyzed design (as-fabricated gap)."""

    frequency: float
    r_x: float
    released_gap: float
    v_pi: float
    tuning_range: float | None
    tuning_v_range: tuple | None

    def to_dict(self) -> dict:
        return {"frequency": self.frequency, "r_x": self.r_x,
                "released_gap": self.released_gap, "v_pi": self.v_pi,
                "tuning_range": self.tuning_range,
                "tuning_v_range": list(self.tuning_v_range) if self.tuning_v_range else None}


@dataclass(frozen=True)
class DesignCandidate:
    """A geometry + transducer + assumed Q with its analysis results."""

    geometry: object
    transducer: Transducer
    material: Material
    assumed_q: float
    analysis: CandidateAnalysis

    def __post_init__(self):
        if self.assumed_q <= 0:
            raise InvariantError("assumed_q must be > 0")
        if not isinstance(self.geometry, (BeamGeometry, DiskGeometry)):
            raise InvariantError("geometry must be a BeamGeometry or DiskGeometry")

    @property
    def family(self) -> str:
        return "beam" if isinstance(self.geometry, BeamGeometry) else "disk"

    @classmethod
    def analyze(cls, geometry, transducer: Transducer, material: Material,
                assumed_q: float, process: ProcessModel = ProcessModel(),
                tuning_v_range: tuple | None = None) -> "DesignCandidate":
        """Analyze a design in as-fabricated mode.

        The transducer gap is read as the drawn gap; R_x, pull-in and
        tuning use the released gap from the process model.
        """
        mode = _mode_for(geometry, material)
        fab = check_fab_constraints(geometry, transducer, process)
        t_fab = replace(transducer, gap=fab.released_gap)
        r_x = transduction.motional_resistance(mode, t_fab, assumed_q)
        v_pi = transduction.pull_in_voltage(mode, t_fab)
        if tuning_v_range is None:
            tuning_v_range = (0.0, transducer.bias_voltage)
        try:
            tuning = tuning_span(mode, t_fab, tuning_v_range[0], tuning_v_range[1])
        except InstabilityError:
            tuning = None
        return cls(geometry=geometry, transducer=transducer, material=material,
                   assumed_q=assumed_q,
                   analysis=CandidateAnalysis(frequency=mode.frequency, r_x=r_x,
                                              released_gap=fab.released_gap,
                                              v_pi=v_pi, tuning_range=tuning,
                                              tuning_v_range=tuple(tuning_v_range)))

    def reverify(self, process: ProcessModel = ProcessModel()) -> bool:
        """Recompute the analysis and compare at 1e-9 relative."""
        fresh = DesignCandidate.analyze(self.geometry, self.transducer,
                                        self.material, self.assumed_q, process,
                                        tuning_v_range=self.analysis.tuning_v_range)
        a, b = self.analysis, fresh.analysis

        def close(u, v):
            if u is None or v is None:
                return u is None and v is None
            return abs(u - v) <= _REVERIFY_RTOL * max(abs(u), abs(v), 1e-300)

        return (close(a.frequency, b.frequency) and close(a.r_x, b.r_x)
                and close(a.released_gap, b.released_gap)
                and close(a.v_pi, b.v_pi) and close(a.tuning_range, b.tuning_range))

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "geometry": self.geometry.to_dict(),
            "transducer": self.transducer.to_dict(),
            "material": self.material.to_dict(),
            "assumed_q": self.assumed_q,
            "analysis": self.analysis.to_dict(),
        }


def _mode_for(geometry, material: Material):
    if isinstance(geometry, BeamGeometry):
        return analytic.beam_mode_result(geometry, material, n=1)
    if isinstance(geometry, DiskGeometry):
        return analytic.disk_mode_result(geometry, material, n=2)
    raise InvariantError(f"unsupported geometry {type(geometry).__name__}")


# ---------------------------------------------------------------------------
# spec checking

@dataclass(frozen=True)
class CheckTolerances:
    """Matching tolerances; the default allows 0.5% frequency mismatch.

    Zero tolerance means exact-match semantics.
    """

    frequency_rel_tol: float = 0.005


@dataclass(frozen=True)
class CriterionResult:
    name: str
    applicable: bool
    passed: bool
    detail: str


@dataclass(frozen=True)
class SpecReport:
    profile_name: str
    criteria: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria if c.applicable)

    def criterion(self, name: str) -> CriterionResult:
        for c in self.criteria:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "profile": self.profile_name,
            "passed": self.passed,
            "criteria": [{"name": c.name, "applicable": c.applicable,
                          "passed": c.passed, "detail": c.detail}
                         for c in self.criteria],
        }

    def to_text(self) -> str:
        lines = [f"spec check vs '{self.profile_name}': "
                 f"{'PASS' if self.passed else 'FAIL'}"]
        for c in self.criteria:
            mark = "n/a " if not c.applicable else ("pass" if c.passed else "FAIL")
            lines.append(f"  [{mark}] {c.name}: {c.detail}")
        return "\n".join(lines)


def check_spec(candidate: DesignCandidate, profile: SpecProfile,
               tolerances: CheckTolerances = CheckTolerances()) -> SpecReport:
    """Per-criterion pass/fail of an analyzed design against a profile."""
    tol = tolerances.frequency_rel_tol
    f = candidate.analysis.frequency
    criteria = []

    in_band = any(lo * (1 - tol) <= f <= hi * (1 + tol)
                  for lo, hi in profile.frequency_bands)
    bands_txt = ", ".join(f"{lo:.6g}..{hi:.6g}" for lo, hi in profile.frequency_bands)
    criteria.append(CriterionResult(
        "frequency", True, in_band,
        f"f = {f:.6g} Hz vs target [{bands_txt}] Hz (rel tol {tol:g})"))

    if profile.q_required is None:
        criteria.append(CriterionResult("q", False, True, "no Q requirement"))
    else:
        ok = candidate.assumed_q >= profile.q_required
        criteria.append(CriterionResult(
            "q", True, ok,
            f"assumed Q = {candidate.assumed_q:.6g} vs required >= {profile.q_required:.6g}"))

    if profile.impedance_range is None:
        criteria.append(CriterionResult("impedance", False, True, "no impedance requirement"))
    else:
        lo, hi = profile.impedance_range
        r = candidate.analysis.r_x
        criteria.append(CriterionResult(
            "impedance", True, lo <= r <= hi,
            f"R_x = {r:.6g} ohm vs [{lo:.6g}, {hi:.6g}] ohm (as-fabricated)"))

    if profile.dc_voltage_range is None:
        criteria.append(CriterionResult("dc_voltage", False, True, "no DC requirement"))
    else:
        lo, hi = profile.dc_voltage_range
        v = candidate.transducer.bias_voltage
        criteria.append(CriterionResult(
            "dc_voltage", True, lo <= v <= hi,
            f"Vp = {v:.6g} V vs [{lo:.6g}, {hi:.6g}] V"))

    if profile.tuning_required is None:
        criteria.append(CriterionResult("tuning", False, True, "tuning optional"))
    else:
        tr = candidate.analysis.tuning_range
        if tr is None:
            criteria.append(CriterionResult(
                "tuning", True, False,
                f"tuning range not evaluable (unstable) vs required >= "
                f"{profile.tuning_required:.6g} Hz"))
        else:
            criteria.append(CriterionResult(
                "tuning", True, tr >= profile.tuning_required,
                f"tuning range {tr:.6g} Hz vs required >= {profile.tuning_required:.6g} Hz"))

    return SpecReport(profile_name=profile.name, criteria=tuple(criteria))


# ---------------------------------------------------------------------------
# bias tuning

def tuning_span(mode, transducer: Transducer, v_min: float, v_max: float,
                pull_in_margin: float = 0.8) -> float:
    """f(v_min) - f(v_max) with stability and pull-in margin enforced.

    Raises InstabilityError naming the largest safe bias if any voltage in
    [v_min, v_max] exceeds it.
    """
    if not 0 <= v_min <= v_max:
        raise InvariantError(f"need 0 <= v_min <= v_max, got ({v_min}, {v_max})")
    v_pi = transduction.pull_in_voltage(mode, transducer)
    v_limit = pull_in_margin * v_pi
    if v_max > v_limit:
        raise InstabilityError(
            f"bias sweep up to {v_max:.3g} V exceeds the safe limit "
            f"{v_limit:.3g} V ({pull_in_margin:g} x pull-in {v_pi:.3g} V)",
            critical_voltage=v_limit)

    def f_at(v):
        if v == 0:
            return mode.frequency
        return transduction.spring_softening_frequency(
            mode, replace(transducer, bias_voltage=v))

    return f_at(v_min) - f_at(v_max)


def tuning_range(candidate: DesignCandidate, v_min: float, v_max: float,
                 process: ProcessModel = ProcessModel(),
                 pull_in_margin: float = 0.8) -> float:
    """Bias-tuning span of an analyzed design over [v_min, v_max]."""
    mode = _mode_for(candidate.geometry, candidate.material)
    t_fab = replace(candidate.transducer, gap=candidate.analysis.released_gap)
    return tuning_span(mode, t_fab, v_min, v_max, pull_in_margin)


# ---------------------------------------------------------------------------
# design-space search

_BEAM_PARAMS = ("length", "width", "thickness", "gap", "bias_voltage")
_DISK_PARAMS = ("radius", "thickness", "gap", "bias_voltage")


def electrode_area(geometry) -> float:
    """Electrode area convention used by the optimizer.

    Beam: electrode spans the face the beam deflects toward (length x
    thickness for in-plane motion, length x width for out-of-plane).
    Disk: electrode wraps a quarter of the rim (pi*R/2 x thickness).
    """
    if isinstance(geometry, BeamGeometry):
        if geometry.vibration_axis is VibrationAxis.IN_PLANE:
            return geometry.length * geometry.thickness
        return geometry.length * geometry.width
    if isinstance(geometry, DiskGeometry):
        return math.pi * geometry.radius / 2.0 * geometry.thickness
    raise InvariantError(f"unsupported geometry {type(geometry).__name__}")


def _beam_length_for_frequency(f_target: float, flexural_dim: float,
                               mat: Material) -> float:
    c = analytic.beam_mode_coefficient(1)
    return math.sqrt(c.a_n * math.sqrt(mat.youngs_modulus / mat.density)
                     * flexural_dim / f_target)


def _disk_radius_for_frequency(f_target: float, mat: Material) -> float:
    _, c_t = analytic.plane_stress_wave_speeds(mat)
    y = analytic._disk_dimensionless_root(2, mat.poisson_ratio)
    return y * c_t / (2 * math.pi * f_target)


@dataclass
class _EvalResult:
    feasible: bool
    fail_reason: str | None
    r_x: float | None
    params: tuple


class _Evaluator:
    """Fast feasibility + R_x evaluation of one grid point."""

    def __init__(self, profile, family, bounds, process, material, assumed_q,
                 tol, pull_in_margin, vibration_axis):
        self.profile = profile
        self.family = family
        self.bounds = bounds
        self.process = process
        self.material = material
        self.assumed_q = assumed_q
        self.tol = tol
        self.pull_in_margin = pull_in_margin
        self.vibration_axis = vibration_axis
        # representative target for dimension snapping: band midpoints allowed
        cf = profile.center_frequency
        self.targets = ([cf] if isinstance(cf, float)
                        else [0.5 * (lo + hi) for lo, hi in cf])

    def snap_main_dimension(self, params: dict) -> dict:
        """Replace length/radius so the frequency hits a target band.

        Multi-band profiles: prefer the first target whose snapped value
        fits the bounds unclipped.
        """
        mat = self.material
        key = "length" if self.family == "beam" else "radius"
        lo, hi = self.bounds[key]
        best = None
        for f_target in self.targets:
            if self.family == "beam":
                dim = (params["width"] if self.vibration_axis is VibrationAxis.IN_PLANE
                       else params["thickness"])
                val = _beam_length_for_frequency(f_target, dim, mat)
            else:
                val = _disk_radius_for_frequency(f_target, mat)
            if best is None:
                best = val
            if lo <= val <= hi:
                best = val
                break
        out = dict(params)
        out[key] = min(max(best, lo), hi)
        return out

    def geometry(self, params: dict):
        if self.family == "beam":
            return BeamGeometry(length=params["length"], width=params["width"],
                                thickness=params["thickness"],
                                vibration_axis=self.vibration_axis)
        return DiskGeometry(radius=params["radius"], thickness=params["thickness"])

    def evaluate(self, params: dict) -> _EvalResult:
        key = tuple(params[k] for k in sorted(params))
        p = self.process
        try:
            geom = self.geometry(params)
        except InvariantError:
            return _EvalResult(False, "geometry", None, key)

        if params["gap"] < p.min_drawn_gap:
            return _EvalResult(False, "min_drawn_gap", None, key)
        tunnel = release_tunnel_depth(geom)
        if tunnel > p.max_tunnel_depth:
            return _EvalResult(False, "max_tunnel_depth", None, key)

        mode = _mode_for(geom, self.material)
        f = mode.frequency
        tol = self.tol
        if not any(lo * (1 - tol) <= f <= hi * (1 + tol)
                   for lo, hi in self.profile.frequency_bands):
            return _EvalResult(False, "frequency", None, key)

        gap_fab = params["gap"] + p.etch_bias + p.release_enlargement_rate * tunnel
        area = electrode_area(geom)
        v = params["bias_voltage"]
        t_fab = Transducer(gap=gap_fab, bias_voltage=v, drive_voltage=0.0,
                           electrode_area=area)

        v_pi = transduction.pull_in_voltage(mode, t_fab)
        if v > self.pull_in_margin * v_pi:
            return _EvalResult(False, "pull_in_margin", None, key)

        dc = self.profile.dc_voltage_range
        if dc is not None and not dc[0] <= v <= dc[1]:
            return _EvalResult(False, "dc_voltage", None, key)

        if (self.profile.q_required is not None
                and self.assumed_q < self.profile.q_required):
            return _EvalResult(False, "q", None, key)

        r_x = transduction.motional_resistance(mode, t_fab, self.assumed_q)
        imp = self.profile.impedance_range
        if imp is not None and not imp[0] <= r_x <= imp[1]:
            return _EvalResult(False, "impedance", None, key)

        if self.profile.tuning_required is not None:
            try:
                span = tuning_span(mode, t_fab, dc[0] if dc else 0.0,
                                   dc[1] if dc else v, self.pull_in_margin)
            except InstabilityError:
                return _EvalResult(False, "tuning_stability", None, key)
            if span < self.profile.tuning_required:
                return _EvalResult(False, "tuning", None, key)

        return _EvalResult(True, None, r_x, key)


def optimize(profile: SpecProfile, family: str, bounds: dict,
             process: ProcessModel = ProcessModel(),
             material: Material | None = None,
             assumed_q: float | None = None,
             tolerances: CheckTolerances = CheckTolerances(),
             grid_points: int = 7, refine_rounds: int = 3,
             max_results: int = 10, pull_in_margin: float = 0.8,
             vibration_axis: VibrationAxis = VibrationAxis.IN_PLANE) -> list:
    """Deterministic grid search + coordinate refinement, minimizing R_x.

    Every returned candidate passes the fab rules, keeps the bias below
    pull_in_margin x pull-in voltage, and satisfies all applicable profile
    criteria (frequency within tolerance, impedance window, DC range, Q,
    tuning when required). Candidates are ranked by ascending as-fabricated
    R_x. Raises InfeasibleDesignError with a binding-constraint summary
    when the feasible set is empty.
    """
    if family not in ("beam", "disk"):
        raise InvariantError(f"family must be 'beam' or 'disk', got {family!r}")
    if material is None:
        raise InvariantError("optimize requires a material")
    param_names = _BEAM_PARAMS if family == "beam" else _DISK_PARAMS
    missing = set(param_names) - set(bounds)
    if missing:
        raise SchemaError(f"bounds missing parameters {sorted(missing)}")
    bnd = {k: (parse_quantity(bounds[k][0]), parse_quantity(bounds[k][1]))
           for k in param_names}
    for k, (lo, hi) in bnd.items():
        if not 0 < lo <= hi:
            raise SchemaError(f"bounds[{k!r}] must be a positive interval")
    if assumed_q is None:
        assumed_q = profile.q_required if profile.q_required is not None else 1e4

    ev = _Evaluator(profile, family, bnd, process, material, assumed_q,
                    tolerances.frequency_rel_tol, pull_in_margin, vibration_axis)

    grid_names = [k for k in param_names if k not in ("length", "radius")]
    axes = [np.linspace(bnd[k][0], bnd[k][1], grid_points) for k in grid_names]

    binding = {}
    feasible = []
    for combo in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes)):
        params = dict(zip(grid_names, (float(v) for v in combo)))
        params = ev.snap_main_dimension(params)
        res = ev.evaluate(params)
        if res.feasible:
            feasible.append((res.r_x, params))
        else:
            binding[res.fail_reason] = binding.get(res.fail_reason, 0) + 1

    if not feasible:
        summary = ", ".join(f"{k}: {v}" for k, v in
                            sorted(binding.items(), key=lambda kv: -kv[1]))
        raise InfeasibleDesignError(
            f"no feasible design in bounds (binding constraints: {summary})",
            binding_constraints=binding)

    feasible.sort(key=lambda it: (it[0],) + tuple(it[1][k] for k in param_names))
    seeds = feasible[:5]

    refined = []
    for r_best, p_best in seeds:
        cur_r, cur_p = r_best, dict(p_best)
        for rnd in range(refine_rounds):
            for k in grid_names:
                lo, hi = bnd[k]
                half = (hi - lo) / grid_points * 0.5**rnd
                local = np.linspace(max(lo, cur_p[k] - half),
                                    min(hi, cur_p[k] + half), 11)
                for val in local:
                    trial = dict(cur_p)
                    trial[k] = float(val)
                    trial = ev.snap_main_dimension(trial)
                    res = ev.evaluate(trial)
                    if res.feasible and res.r_x < cur_r:
                        cur_r, cur_p = res.r_x, trial
        refined.append((cur_r, cur_p))

    refined.sort(key=lambda it: (it[0],) + tuple(it[1][k] for k in param_names))
    out, seen = [], set()
    for r_x, params in refined:
        sig = tuple(round(params[k], 15) for k in param_names)
        if sig in seen:
            continue
        seen.add(sig)
        geom = ev.geometry(params)
        t = Transducer(gap=params["gap"], bias_voltage=params["bias_voltage"],
                       drive_voltage=0.0, electrode_area=electrode_area(geom))
        dc = profile.dc_voltage_range
        v_range = dc if dc is not None else (0.0, params["bias_voltage"])
        out.append(DesignCandidate.analyze(geom, t, material, assumed_q,
                                           process, tuning_v_range=v_range))
        if len(out) >= max_results:
            break
    return out
