"""Scenario configuration, parameter sweeps and self-validation suites.

Configurations are INI files (stdlib ``configparser``) whose keys carry
their unit, e.g. ``wavelength_nm`` or ``lens_radius_m``. Angles accept
plain numbers or multiples of pi such as ``pi/3``.
"""
from __future__ import annotations

import configparser
import csv
import io
import math
import re
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .beam import BeamParams, GeometryWarning, Regime, RegimeError, effective_extents, incident_frame, regime_distances
from .channel import (
    AtmosphereParams,
    OracleMode,
    QuadratureError,
    atmospheric_loss,
    gml_far_field,
    gml_in_plane,
    gml_lens_quadrature,
    gml_out_of_plane,
    hf_oracle_field,
)
from .geometry import LinkGeometry, OrientedNode
from .irs import ProfileKind, Tile, build_layout, lp_profile, passivity_factor, tile_coefficients, tile_field
from .performance import (
    FadingParams,
    PerfInputs,
    average_ber,
    noise_power,
    outage_noise_limited,
    outage_upper_bound,
)
from .protocols import Ownership, ProtocolKind, apply_misalignment, build_assignment

__all__ = [
    "ConfigError",
    "SystemConfig",
    "AtmosphereConfig",
    "IrsConfig",
    "SourceConfig",
    "ReceiverConfig",
    "ProtocolConfig",
    "MisalignmentConfig",
    "SweepConfig",
    "McConfig",
    "PerformanceConfig",
    "ScenarioConfig",
    "ResultTable",
    "Check",
    "COMMANDS",
    "SWEEP_VARIABLES",
    "TEMPLATES",
    "load_config",
    "loads_config",
    "save_config",
    "dumps_config",
    "template",
    "run_sweep",
    "validate",
    "write_csv",
]

CSV_VERSION = 1
SWEEP_VARIABLES = ("d_p", "theta_p1", "snr_db", "r_e", "rate")
COMMANDS = ("regimes", "field-map", "gml-sweep", "interference", "ber", "outage")
SUITES = ("regimes", "fields", "gml", "perf")


class ConfigError(ValueError):
    """Unreadable or physically invalid configuration."""


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class SystemConfig:
    wavelength_nm: float = 1550.0
    bandwidth_ghz: float = 1.0
    n0_dbm_per_mhz: float = -114.0
    impedance_ohm: float = 377.0


@dataclass(frozen=True)
class AtmosphereConfig:
    kappa_db_per_m: float = 0.43e-3
    alpha: float = 2.0
    beta: float = 2.0


@dataclass(frozen=True)
class IrsConfig:
    size_x_m: float = 1.0
    size_y_m: float = 0.5
    gap_x_m: float = 0.0
    gap_y_m: float = 0.0
    zeta0: float = 1.0
    tiles_td: tuple = (1, 1)
    tiles_irsd: tuple = (2, 1)
    tiles_irsh: tuple = (8, 2)
    irsh_ownership: str = "interleaved"


@dataclass(frozen=True)
class SourceConfig:
    distance_m: float = 1000.0
    theta_rad: float = math.pi / 3
    phi_rad: float = 0.0
    waist_mm: float = 0.25
    peak_field_kv_per_m: float = 60.0


@dataclass(frozen=True)
class ReceiverConfig:
    distance_m: float = 3000.0
    theta_rad: float = math.pi / 3
    phi_rad: float = math.pi
    lens_radius_m: float = 0.15


@dataclass(frozen=True)
class ProtocolConfig:
    kind: str = "td"
    profile: str = "lp"


@dataclass(frozen=True)
class MisalignmentConfig:
    """Footprint offsets of one pair along ``direction_rad`` in the IRS plane."""

    pair: int = 1
    offsets_m: tuple = (0.0,)
    direction_rad: float = 0.0


@dataclass(frozen=True)
class SweepConfig:
    variable: str = "theta_p1"
    values: tuple = ()
    start: float = 0.6
    stop: float = 1.5
    steps: int = 10

    def points(self) -> tuple:
        if self.values:
            return tuple(self.values)
        if self.steps == 1:
            return (self.start,)
        return tuple(float(v) for v in np.linspace(self.start, self.stop, self.steps))


@dataclass(frozen=True)
class McConfig:
    trials: int = 10**6
    seed: int = 0


@dataclass(frozen=True)
class PerformanceConfig:
    rate_gbps: float = 1.7
    gml_method: str = "quadrature"


def _default_sources():
    return (SourceConfig(theta_rad=math.pi / 3), SourceConfig(theta_rad=math.pi / 4))


def _default_receivers():
    return (ReceiverConfig(theta_rad=math.pi / 3), ReceiverConfig(theta_rad=math.pi / 6))


@dataclass(frozen=True)
class ScenarioConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    atmosphere: AtmosphereConfig = field(default_factory=AtmosphereConfig)
    irs: IrsConfig = field(default_factory=IrsConfig)
    sources: tuple = field(default_factory=_default_sources)
    receivers: tuple = field(default_factory=_default_receivers)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    misalignment: MisalignmentConfig = field(default_factory=MisalignmentConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    mc: McConfig = field(default_factory=McConfig)
    performance: PerformanceConfig = field(default_factory=PerformanceConfig)

    def __post_init__(self):
        _validate(self)

    @property
    def n_pairs(self) -> int:
        return len(self.sources)

    @property
    def wavelength(self) -> float:
        return self.system.wavelength_nm * 1e-9

    @property
    def bandwidth(self) -> float:
        return self.system.bandwidth_ghz * 1e9

    def beams(self) -> list:
        return [
            BeamParams(self.wavelength, s.waist_mm * 1e-3, s.peak_field_kv_per_m * 1e3, self.system.impedance_ohm)
            for s in self.sources
        ]

    def links(self) -> list:
        return [
            LinkGeometry(
                OrientedNode(s.distance_m, s.theta_rad, s.phi_rad),
                OrientedNode(r.distance_m, r.theta_rad, r.phi_rad),
                r.lens_radius_m,
            )
            for s, r in zip(self.sources, self.receivers)
        ]

    def fading(self) -> FadingParams:
        return FadingParams(self.atmosphere.alpha, self.atmosphere.beta)

    def noise_power(self) -> float:
        return noise_power(self.system.n0_dbm_per_mhz, self.bandwidth)


_SINGLE_SECTIONS = {
    "system": "system",
    "atmosphere": "atmosphere",
    "irs": "irs",
    "protocol": "protocol",
    "misalignment": "misalignment",
    "sweep": "sweep",
    "mc": "mc",
    "performance": "performance",
}


def _fail(where: str, msg: str):
    raise ConfigError(f"{where}: {msg}")


def _positive(where, value):
    if not (value > 0 and math.isfinite(value)):
        _fail(where, f"must be positive and finite, got {value!r}")


def _validate(cfg: ScenarioConfig):
    s = cfg.system
    for name in ("wavelength_nm", "bandwidth_ghz", "impedance_ohm"):
        _positive(f"[system] {name}", getattr(s, name))
    if not math.isfinite(s.n0_dbm_per_mhz):
        _fail("[system] n0_dbm_per_mhz", "must be finite")
    a = cfg.atmosphere
    if not (a.kappa_db_per_m >= 0 and math.isfinite(a.kappa_db_per_m)):
        _fail("[atmosphere] kappa_db_per_m", "must be nonnegative")
    _positive("[atmosphere] alpha", a.alpha)
    _positive("[atmosphere] beta", a.beta)
    irs = cfg.irs
    _positive("[irs] size_x_m", irs.size_x_m)
    _positive("[irs] size_y_m", irs.size_y_m)
    for name in ("gap_x_m", "gap_y_m"):
        if getattr(irs, name) < 0:
            _fail(f"[irs] {name}", "must be nonnegative")
    if not 0 < irs.zeta0 <= 1:
        _fail("[irs] zeta0", "must lie in (0, 1]")
    for name in ("tiles_td", "tiles_irsd", "tiles_irsh"):
        q = getattr(irs, name)
        if len(q) != 2 or min(q) < 1:
            _fail(f"[irs] {name}", "must be two positive integers")
        lx = (irs.size_x_m - (q[0] - 1) * irs.gap_x_m) / q[0]
        ly = (irs.size_y_m - (q[1] - 1) * irs.gap_y_m) / q[1]
        if lx <= 0 or ly <= 0:
            _fail(f"[irs] {name}", "gaps leave no room for tiles")
    if irs.irsh_ownership not in [o.value for o in Ownership]:
        _fail("[irs] irsh_ownership", f"unknown rule {irs.irsh_ownership!r}")
    if len(cfg.sources) != len(cfg.receivers) or not 1 <= len(cfg.sources) <= 4:
        _fail("[ls*]/[pd*]", "need matching source and receiver sections for 1 to 4 pairs")
    for i, src in enumerate(cfg.sources, 1):
        _positive(f"[ls{i}] distance_m", src.distance_m)
        _positive(f"[ls{i}] waist_mm", src.waist_mm)
        _positive(f"[ls{i}] peak_field_kv_per_m", src.peak_field_kv_per_m)
        if abs(math.sin(src.theta_rad)) < 1e-9:
            _fail(f"[ls{i}] theta_rad", "source may not lie in the IRS plane")
        if src.waist_mm * 1e-3 <= cfg.wavelength:
            _fail(f"[ls{i}] waist_mm", "must exceed the wavelength")
    for i, rx in enumerate(cfg.receivers, 1):
        _positive(f"[pd{i}] distance_m", rx.distance_m)
        _positive(f"[pd{i}] lens_radius_m", rx.lens_radius_m)
        if abs(math.sin(rx.theta_rad)) < 1e-9:
            _fail(f"[pd{i}] theta_rad", "lens may not lie in the IRS plane")
    if cfg.protocol.kind not in [p.value for p in ProtocolKind]:
        _fail("[protocol] kind", f"unknown protocol {cfg.protocol.kind!r}")
    if cfg.protocol.profile not in [p.value for p in ProfileKind]:
        _fail("[protocol] profile", f"unknown profile {cfg.protocol.profile!r}")
    m = cfg.misalignment
    if not 1 <= m.pair <= len(cfg.sources):
        _fail("[misalignment] pair", "no such pair")
    if not m.offsets_m or any(v < 0 for v in m.offsets_m):
        _fail("[misalignment] offsets_m", "must be nonnegative")
    sw = cfg.sweep
    if sw.variable not in SWEEP_VARIABLES:
        _fail("[sweep] variable", f"must be one of {', '.join(SWEEP_VARIABLES)}")
    if sw.steps < 1:
        _fail("[sweep] steps", "must be at least 1")
    if cfg.mc.trials < 1:
        _fail("[mc] trials", "must be at least 1")
    if cfg.mc.seed < 0:
        _fail("[mc] seed", "must be nonnegative")
    if cfg.performance.rate_gbps < 0:
        _fail("[performance] rate_gbps", "must be nonnegative")
    if cfg.performance.gml_method not in ("quadrature", "analytic"):
        _fail("[performance] gml_method", "must be 'quadrature' or 'analytic'")


_PI_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?$")


def _to_float(text: str) -> float:
    t = text.strip()
    m = _PI_RE.match(t)
    if m:
        coef = float(m.group(1)) if m.group(1) not in (None, "", "+", "-") else (-1.0 if m.group(1) == "-" else 1.0)
        div = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / div
    return float(t)


def _parse_value(kind, text: str):
    if kind is float:
        return _to_float(text)
    if kind is int:
        return int(text.strip())
    if kind is str:
        return text.strip().lower()
    if kind == "grid":
        parts = re.split(r"[x,\s]+", text.strip().lower())
        return tuple(int(p) for p in parts if p)
    if kind == "floats":
        return tuple(_to_float(p) for p in text.split(",") if p.strip())
    raise TypeError(kind)


def _kind_of(cls, name):
    default = next(f for f in fields(cls) if f.name == name)
    if name.startswith("tiles_"):
        return "grid"
    if name in ("offsets_m", "values"):
        return "floats"
    value = default.default
    return type(value)


def _read_section(cls, section, where):
    known = {f.name for f in fields(cls)}
    kwargs = {}
    for key, text in section.items():
        if key not in known:
            _fail(f"[{where}] {key}", "unknown key")
        try:
            kwargs[key] = _parse_value(_kind_of(cls, key), text)
        except (ValueError, TypeError):
            _fail(f"[{where}] {key}", f"cannot parse {text!r}")
    return cls(**kwargs) if kwargs else cls()


def loads_config(text: str) -> ScenarioConfig:
    """Parse configuration text; omitted fields take their defaults."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    kwargs = {}
    classes = {
        "system": SystemConfig,
        "atmosphere": AtmosphereConfig,
        "irs": IrsConfig,
        "protocol": ProtocolConfig,
        "misalignment": MisalignmentConfig,
        "sweep": SweepConfig,
        "mc": McConfig,
        "performance": PerformanceConfig,
    }
    sources = list(_default_sources())
    receivers = list(_default_receivers())
    for name in parser.sections():
        if name in classes:
            kwargs[name] = _read_section(classes[name], parser[name], name)
            continue
        m = re.fullmatch(r"(ls|pd)([1-4])", name)
        if not m:
            _fail(f"[{name}]", "unknown section")
        idx = int(m.group(2)) - 1
        target, cls = (sources, SourceConfig) if m.group(1) == "ls" else (receivers, ReceiverConfig)
        while len(target) <= idx:
            target.append(cls())
        base = target[idx]
        read = _read_section(cls, parser[name], name)
        # keys given in the file override the per-index defaults
        given = {k: getattr(read, k) for k in parser[name]}
        target[idx] = replace(base, **given)
    try:
        return ScenarioConfig(sources=tuple(sources), receivers=tuple(receivers), **kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return loads_config(text)


def _format_value(v) -> str:
    if isinstance(v, tuple):
        if v and all(isinstance(x, int) for x in v):
            return "x".join(str(x) for x in v)
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dumps_config(cfg: ScenarioConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    for name in _SINGLE_SECTIONS:
        obj = getattr(cfg, name)
        parser[name] = {f.name: _format_value(getattr(obj, f.name)) for f in fields(obj)}
    for i, s in enumerate(cfg.sources, 1):
        parser[f"ls{i}"] = {f.name: _format_value(getattr(s, f.name)) for f in fields(s)}
    for i, r in enumerate(cfg.receivers, 1):
        parser[f"pd{i}"] = {f.name: _format_value(getattr(r, f.name)) for f in fields(r)}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def save_config(cfg: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_config(cfg))


# ---------------------------------------------------------------------------
# templates


def _with_angles(cfg, theta_l1, theta_p1=math.pi / 3):
    src = list(cfg.sources)
    rx = list(cfg.receivers)
    src[0] = replace(src[0], theta_rad=theta_l1)
    src[1] = replace(src[1], theta_rad=math.pi / 4)
    rx[0] = replace(rx[0], theta_rad=theta_p1)
    rx[1] = replace(rx[1], theta_rad=math.pi / 6)
    return replace(cfg, sources=tuple(src), receivers=tuple(rx))


def _interference_template(delta):
    cfg = _with_angles(ScenarioConfig(), math.pi / 4 + delta)
    return "interference", replace(cfg, sweep=SweepConfig("theta_p1", start=0.6, stop=1.5, steps=10))


def _gml_template():
    cfg = ScenarioConfig(
        irs=IrsConfig(size_x_m=0.5, size_y_m=0.5),
        sweep=SweepConfig("d_p", values=(1000.0, 2000.0, 3000.0, 5000.0, 10000.0)),
    )
    return "gml-sweep", cfg


def _ber_template(delta):
    cfg = _with_angles(ScenarioConfig(), math.pi / 4 + delta)
    return "ber", replace(cfg, sweep=SweepConfig("snr_db", start=70.0, stop=110.0, steps=9))


def _outage_template(rate):
    cfg = ScenarioConfig(
        misalignment=MisalignmentConfig(pair=1, offsets_m=(0.0, 0.17)),
        sweep=SweepConfig("theta_p1", start=0.6, stop=1.5, steps=10),
        performance=PerformanceConfig(rate_gbps=rate),
    )
    return "outage", cfg


TEMPLATES = {
    "interference-aligned": lambda: _interference_template(0.0),
    "interference-tilted": lambda: _interference_template(1e-3),
    "gml-distance": _gml_template,
    "ber-aligned": lambda: _ber_template(0.0),
    "ber-tilted": lambda: _ber_template(1e-3),
    "outage-1.7gbps": lambda: _outage_template(1.7),
    "outage-0.5gbps": lambda: _outage_template(0.5),
}


def template(name: str):
    """``(command, config)`` of a named experiment."""
    try:
        return TEMPLATES[name]()
    except KeyError:
        raise ConfigError(f"unknown template {name!r}; choose from {', '.join(TEMPLATES)}") from None


# ---------------------------------------------------------------------------
# model evaluation


@dataclass(frozen=True)
class ResultTable:
    command: str
    columns: tuple
    rows: tuple


def _layout(cfg: ScenarioConfig, kind: ProtocolKind):
    q = {ProtocolKind.TD: cfg.irs.tiles_td, ProtocolKind.IRSD: cfg.irs.tiles_irsd, ProtocolKind.IRSH: cfg.irs.tiles_irsh}[kind]
    return build_layout(cfg.irs.size_x_m, cfg.irs.size_y_m, q[0], q[1], cfg.irs.gap_x_m, cfg.irs.gap_y_m)


def _assignment(cfg: ScenarioConfig, kind, profile, offset: float = 0.0):
    kind = ProtocolKind(kind)
    assign = build_assignment(
        kind, cfg.links(), _layout(cfg, kind), cfg.beams(), ProfileKind(profile), cfg.irs.zeta0, cfg.irs.irsh_ownership
    )
    if offset:
        d = cfg.misalignment.direction_rad
        vec = (offset * math.cos(d), offset * math.sin(d), 0.0)
        assign = apply_misalignment(assign, cfg.misalignment.pair - 1, vec)
    return assign


def _gml(link, tiles, beam, method: str) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GeometryWarning)
        if method == "analytic":
            return gml_out_of_plane(link, tiles, beam)
        return gml_lens_quadrature(link, tiles, beam)


def _received_gains(assign, beams, n: int, method: str) -> list:
    """``h_irs`` from every source to receiver ``n`` (zero when the source
    transmits in another slot)."""
    out = []
    for m in range(assign.n_pairs):
        t = assign.slot_of(m)
        if n not in assign.active[t]:
            out.append(0.0)
            continue
        out.append(_gml(assign.cross_link(m, n), assign.slots[t], beams[m], method))
    return out


def _regime_label(assign, beams, pair: int, wavelength: float) -> str:
    link = assign.links[pair]
    tiles = [t for t in assign.slots[assign.slot_of(pair)] if t.owner == pair]
    frame = incident_frame(beams[pair], link.ls, link.footprint_center)
    lx = max(t.lx for t in tiles)
    ly = max(t.ly for t in tiles)
    rep = regime_distances(*effective_extents(lx, ly, frame), wavelength, link.pd.d)
    return rep.regime.value


def _apply_point(cfg: ScenarioConfig, variable: str, value: float) -> ScenarioConfig:
    if variable == "d_p":
        rx = list(cfg.receivers)
        rx[0] = replace(rx[0], distance_m=value)
        return replace(cfg, receivers=tuple(rx))
    if variable == "theta_p1":
        rx = list(cfg.receivers)
        rx[0] = replace(rx[0], theta_rad=value)
        return replace(cfg, receivers=tuple(rx))
    if variable == "r_e":
        return replace(cfg, misalignment=replace(cfg.misalignment, offsets_m=(value,)))
    if variable == "rate":
        return replace(cfg, performance=replace(cfg.performance, rate_gbps=value))
    return cfg


def _path_loss(cfg, m, n):
    return atmospheric_loss(cfg.sources[m].distance_m, cfg.receivers[n].distance_m, cfg.atmosphere.kappa_db_per_m)


def _gammas(cfg, h_irs, n, snr_linear=None):
    sigma2 = cfg.noise_power()
    beams = cfg.beams()
    out = []
    for m, h in enumerate(h_irs):
        p_over_n = snr_linear if snr_linear is not None else beams[m].power / sigma2
        out.append(p_over_n * (h * _path_loss(cfg, m, n)) ** 2)
    return out


def _near_field_note(label):
    return "near field: closed form not applicable" if label == Regime.NEAR.value else ""


def _rows_regimes(cfg, protocols, profiles):
    rows = []
    beams = cfg.beams()
    for kind in protocols:
        assign = _assignment(cfg, kind, profiles[0])
        for m in range(cfg.n_pairs):
            link = assign.links[m]
            tiles = [t for t in assign.slots[assign.slot_of(m)] if t.owner == m]
            frame = incident_frame(beams[m], link.ls, link.footprint_center)
            lx, ly = max(t.lx for t in tiles), max(t.ly for t in tiles)
            rep = regime_distances(*effective_extents(lx, ly, frame), cfg.wavelength, link.pd.d)
            rows.append(
                dict(pair=m + 1, protocol=kind.value, tile_lx_m=lx, tile_ly_m=ly, w_x_m=frame.w_x, w_y_m=frame.w_y,
                     x_e_m=rep.x_e, y_e_m=rep.y_e, d_f_m=rep.d_f, d_n_m=rep.d_n, d_p_m=link.pd.d, regime=rep.regime.value)
            )
    return rows


def _rows_field_map(cfg, protocols, profiles, oracle, grid=5):
    rows = []
    beam = cfg.beams()[0]
    for kind in protocols:
        for prof in profiles:
            assign = _assignment(cfg, kind, prof)
            link = assign.links[0]
            tiles = assign.slots[assign.slot_of(0)]
            label = _regime_label(assign, cfg.beams(), 0, cfg.wavelength)
            a = link.lens_radius
            coords = np.linspace(-a / math.sqrt(2), a / math.sqrt(2), grid)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", GeometryWarning)
                coeffs = [tile_coefficients(link, t, beam) for t in tiles]
                for x in coords:
                    for y in coords:
                        r = (float(x), float(y))
                        e = sum(complex(tile_field(r, c)) for c in coeffs)
                        row = dict(protocol=kind.value, profile=prof, x_m=r[0], y_m=r[1],
                                   field_abs=abs(e), field_phase=math.atan2(e.imag, e.real),
                                   oracle_abs="", rel_err="", regime=label, note=_near_field_note(label))
                        if oracle != "none":
                            try:
                                eo = sum(complex(hf_oracle_field(r, link, t, beam, oracle)) for t in tiles)
                                row["oracle_abs"] = abs(eo)
                                if oracle == OracleMode.EXACT2D.value:
                                    # the closed form drops the lens-plane path phase
                                    row["rel_err"] = abs(abs(eo) - abs(e)) / max(abs(eo), 1e-300)
                                else:
                                    row["rel_err"] = abs(eo - e) / max(abs(eo), 1e-300)
                            except (QuadratureError, RegimeError, ValueError) as exc:
                                row["note"] = f"oracle: {exc}"
                        rows.append(row)
    return rows


def _gml_point(cfg, value):
    pt = _apply_point(cfg, cfg.sweep.variable, value)
    beam = pt.beams()[0]
    link = pt.links()[0]
    prof = ProfileKind(pt.protocol.profile)
    assign = _assignment(pt, ProtocolKind.TD, prof)
    link = assign.links[0]
    tiles = assign.slots[0]
    label = _regime_label(assign, pt.beams(), 0, pt.wavelength)
    row = dict(variable=cfg.sweep.variable, value=value, tile_lx_m=tiles[0].lx, tile_ly_m=tiles[0].ly,
               h_irs_analytic="", h_irs_quadrature="", h_irs_far_field="", rel_err="", regime=label, note="")
    if label == Regime.NEAR.value:
        row["note"] = _near_field_note(label)
        return row
    notes = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GeometryWarning)
        try:
            if abs(link.ls.phi) < 1e-15 and abs(abs(link.pd.phi) - math.pi) < 1e-15:
                row["h_irs_analytic"] = gml_in_plane(link, tiles, beam)
            else:
                row["h_irs_analytic"] = gml_out_of_plane(link, tiles, beam)
        except (RegimeError, ValueError) as exc:
            notes.append(f"analytic: {exc}")
        try:
            row["h_irs_quadrature"] = gml_lens_quadrature(link, tiles, beam)
        except (RegimeError, QuadratureError) as exc:
            notes.append(f"quadrature: {exc}")
        if prof is ProfileKind.LP:
            row["h_irs_far_field"] = gml_far_field(link, beam, tiles[0].zeta)
    if row["h_irs_analytic"] != "" and row["h_irs_quadrature"] != "":
        row["rel_err"] = abs(row["h_irs_analytic"] - row["h_irs_quadrature"]) / row["h_irs_quadrature"]
    row["note"] = "; ".join(notes)
    return row


def _interference_point(cfg, value, protocols, profiles):
    pt = _apply_point(cfg, cfg.sweep.variable, value)
    beams = pt.beams()
    rows = []
    for kind in protocols:
        for prof in profiles:
            assign = _assignment(pt, kind, prof)
            h = _received_gains(assign, beams, 0, pt.performance.gml_method)
            g = _gammas(pt, h, 0)
            db = [10 * math.log10(v) if v > 0 else float("-inf") for v in g]
            rows.append(dict(variable=cfg.sweep.variable, value=value, protocol=kind.value, profile=prof,
                             h_irs_11=h[0], h_irs_21=h[1] if len(h) > 1 else 0.0,
                             gamma1_db=db[0], gamma2_db=db[1] if len(db) > 1 else float("-inf"),
                             regime=_regime_label(assign, beams, 0, pt.wavelength)))
    return rows


def _perf_setup(pt, kind, prof, offset):
    beams = pt.beams()
    assign = _assignment(pt, kind, prof, offset)
    h = _received_gains(assign, beams, 0, pt.performance.gml_method)
    return assign, h, _regime_label(assign, beams, 0, pt.wavelength)


def _ber_point(cfg, value, protocols, profiles, trials, seed):
    pt = _apply_point(cfg, cfg.sweep.variable, value)
    rows = []
    for kind in protocols:
        for prof in profiles:
            assign, h, label = _perf_setup(pt, kind, prof, pt.misalignment.offsets_m[0])
            snr = 10 ** (value / 10) if cfg.sweep.variable == "snr_db" else None
            g = _gammas(pt, h, 0, snr)
            perf = PerfInputs(tuple(g), 0, pt.bandwidth)
            fading = pt.fading()
            quad = average_ber(perf, fading, "quad")
            mc = average_ber(perf, fading, "mc", trials=trials, seed=seed)
            rows.append(dict(variable=cfg.sweep.variable, value=value, protocol=kind.value, profile=prof,
                             gamma1=g[0], gamma2=g[1] if len(g) > 1 else 0.0, ber_quad=quad,
                             ber_mc=mc.value, ber_mc_se=mc.stderr, regime=label))
    return rows


def _outage_point(cfg, value, protocols, profiles, trials, seed):
    pt = _apply_point(cfg, cfg.sweep.variable, value)
    rows = []
    for offset in pt.misalignment.offsets_m:
        for kind in protocols:
            for prof in profiles:
                assign, h, label = _perf_setup(pt, kind, prof, offset)
                g = _gammas(pt, h, 0)
                # one slot in n_slots: the slot rate must carry n_slots times the rate
                rate = pt.performance.rate_gbps * 1e9 * assign.n_slots
                perf = PerfInputs(tuple(g), 0, pt.bandwidth, rate)
                fading = pt.fading()
                if all(v == 0 for i, v in enumerate(g) if i != 0):
                    quad = outage_noise_limited(perf, fading)
                else:
                    quad = outage_upper_bound(perf, fading, "quad")
                mc = outage_upper_bound(perf, fading, "mc", trials=trials, seed=seed)
                rows.append(dict(variable=cfg.sweep.variable, value=value, protocol=kind.value, profile=prof,
                                 r_e_m=offset, rate_gbps=pt.performance.rate_gbps, gamma1=g[0],
                                 gamma2=g[1] if len(g) > 1 else 0.0, outage_quad=quad,
                                 outage_mc=mc.value, outage_mc_se=mc.stderr, regime=label))
    return rows


_COLUMNS = {
    "regimes": ("pair", "protocol", "tile_lx_m", "tile_ly_m", "w_x_m", "w_y_m", "x_e_m", "y_e_m", "d_f_m", "d_n_m", "d_p_m", "regime"),
    "field-map": ("protocol", "profile", "x_m", "y_m", "field_abs", "field_phase", "oracle_abs", "rel_err", "regime", "note"),
    "gml-sweep": ("variable", "value", "tile_lx_m", "tile_ly_m", "h_irs_analytic", "h_irs_quadrature", "h_irs_far_field", "rel_err", "regime", "note"),
    "interference": ("variable", "value", "protocol", "profile", "h_irs_11", "h_irs_21", "gamma1_db", "gamma2_db", "regime"),
    "ber": ("variable", "value", "protocol", "profile", "gamma1", "gamma2", "ber_quad", "ber_mc", "ber_mc_se", "regime"),
    "outage": ("variable", "value", "protocol", "profile", "r_e_m", "rate_gbps", "gamma1", "gamma2", "outage_quad", "outage_mc", "outage_mc_se", "regime"),
}


def _resolve(values, enum_cls, default):
    if values is None:
        return list(default)
    if isinstance(values, str):
        values = [values]
    return [enum_cls(v) for v in values]


def run_sweep(cfg: ScenarioConfig, command: str, protocols=None, profiles=None, oracle: str = "none",
              trials: int | None = None, seed: int | None = None, workers: int = 1) -> ResultTable:
    """Evaluate ``command`` over the sweep of ``cfg``.

    ``protocols`` and ``profiles`` default to all protocols and the
    configured profile (both profiles for ``ber``). Sweep points run on
    ``workers`` threads; rows keep sweep order.
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    kinds = _resolve(protocols, ProtocolKind, list(ProtocolKind))
    prof_default = [ProfileKind.LP, ProfileKind.QP] if command == "ber" else [ProfileKind(cfg.protocol.profile)]
    profs = [p.value for p in _resolve(profiles, ProfileKind, prof_default)]
    trials = cfg.mc.trials if trials is None else trials
    seed = cfg.mc.seed if seed is None else seed
    if command == "regimes":
        rows = _rows_regimes(cfg, kinds, profs)
    elif command == "field-map":
        rows = _rows_field_map(cfg, kinds, profs, oracle)
    else:
        pts = cfg.sweep.points()
        if command == "gml-sweep":
            fn = lambda v: [_gml_point(cfg, v)]
        elif command == "interference":
            fn = lambda v: _interference_point(cfg, v, kinds, profs)
        elif command == "ber":
            fn = lambda v: _ber_point(cfg, v, kinds, profs, trials, seed)
        else:
            fn = lambda v: _outage_point(cfg, v, kinds, profs, trials, seed)
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                chunks = list(pool.map(fn, pts))
        else:
            chunks = [fn(v) for v in pts]
        rows = [r for chunk in chunks for r in chunk]
    cols = _COLUMNS[command]
    return ResultTable(command, cols, tuple(tuple(r[c] for c in cols) for r in rows))


def _cell(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def write_csv(table: ResultTable, fh) -> None:
    """CSV with a versioned header comment; floats in ``.12g``."""
    fh.write(f"# irsfso {table.command} csv v{CSV_VERSION}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(v) for v in row])


# ---------------------------------------------------------------------------
# validation suites


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    expected: float
    actual: float
    tolerance: float
    passed: bool


def _rel_check(suite, name, expected, actual, tol):
    err = abs(actual - expected) / abs(expected)
    return Check(suite, name, expected, actual, tol, bool(err <= tol))


def _suite_regimes(cfg):
    out = []
    lam = 1550e-9
    b = BeamParams(lam, 2.5e-3, 60e3)
    fr = incident_frame(b, OrientedNode(1000.0, math.pi / 8))
    rep = regime_distances(*effective_extents(0.5, 0.5, fr), lam)
    out.append(_rel_check("regimes", "d_f narrow beam [m]", 32.7e3, rep.d_f, 0.01))
    out.append(_rel_check("regimes", "d_n narrow beam [m]", 85.6, rep.d_n, 0.01))
    out.append(Check("regimes", "w_x narrow beam [m]", 0.52, fr.w_x, 0.01, abs(fr.w_x - 0.52) <= 0.01))
    out.append(Check("regimes", "w_y narrow beam [m]", 0.19, fr.w_y, 0.01, abs(fr.w_y - 0.19) <= 0.01))
    b = cfg.beams()[0]
    fr = incident_frame(b, cfg.links()[0].ls)
    rep = regime_distances(*effective_extents(0.5, 0.5, fr), cfg.wavelength)
    out.append(_rel_check("regimes", "d_f configured link 1 [m]", 40.3e3, rep.d_f, 0.01))
    out.append(Check("regimes", "w_x configured link 1 [m]", 2.28, fr.w_x, 0.01, abs(fr.w_x - 2.28) <= 0.01))
    out.append(Check("regimes", "w_y configured link 1 [m]", 1.97, fr.w_y, 0.01, abs(fr.w_y - 1.97) <= 0.01))
    return out


def _suite_fields(cfg):
    out = []
    beam = cfg.beams()[0]
    link = cfg.links()[0]
    a = link.lens_radius
    coords = np.linspace(-a / math.sqrt(2), a / math.sqrt(2), 5)
    for prof in ProfileKind:
        assign = _assignment(cfg, ProtocolKind.TD, prof)
        lk, tile = assign.links[0], assign.slots[0][0]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GeometryWarning)
            cf = tile_coefficients(lk, tile, beam)
            worst = 0.0
            for x in coords:
                for y in coords:
                    e = complex(tile_field((x, y), cf))
                    eo = complex(hf_oracle_field((x, y), lk, tile, beam, "separable1d"))
                    worst = max(worst, abs(e - eo) / abs(eo))
        out.append(Check("fields", f"closed form vs separable oracle, {prof.value}, max rel err over 25 points", 0.0, worst, 1e-6, worst <= 1e-6))
    return out


def _suite_gml(cfg):
    out = []
    beam = cfg.beams()[0]
    base = cfg.links()[0]
    values = []
    for dp in (1000.0, 2000.0, 3000.0, 5000.0, 10000.0):
        pd = OrientedNode(dp, base.pd.theta, base.pd.phi)
        link = replace(base, pd=pd)
        tile = Tile((0.0, 0.0, 0.0), 0.5, 0.5, lp_profile(link.ls, pd), cfg.irs.zeta0, passivity_factor(pd.theta))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GeometryWarning)
            ref = gml_lens_quadrature(link, [tile], beam)
            values.append(ref)
            try:
                ana = gml_out_of_plane(link, [tile], beam)
            except RegimeError:
                ana = float("nan")
        err = abs(ana - ref) / ref if math.isfinite(ana) else float("inf")
        out.append(Check("gml", f"analytic vs lens quadrature at d_p={dp:g} m (rel err)", ref, ana, 1e-3, err <= 1e-3))
    mono = all(b < a for a, b in zip(values, values[1:]))
    out.append(Check("gml", "quadrature GML decreasing in d_p", 1.0, float(mono), 0.0, mono))
    out.append(Check("gml", "GML at most one", 1.0, max(values), 0.0, max(values) <= 1.0))
    return out


def _suite_perf(cfg, trials=10**4):
    out = []
    assign = _assignment(cfg, ProtocolKind.IRSD, ProfileKind(cfg.protocol.profile))
    h = _received_gains(assign, cfg.beams(), 0, "quadrature")
    fading = cfg.fading()
    for snr_db in (80.0, 90.0):
        g = _gammas(cfg, h, 0, 10 ** (snr_db / 10))
        perf = PerfInputs(tuple(g), 0, cfg.bandwidth, cfg.performance.rate_gbps * 1e9)
        quad = average_ber(perf, fading, "quad")
        mc = average_ber(perf, fading, "mc", trials=trials, seed=cfg.mc.seed)
        ok = abs(mc.value - quad) <= 3 * mc.stderr
        out.append(Check("perf", f"BER mc vs quad at {snr_db:g} dB (3 SE)", quad, mc.value, 3 * mc.stderr, ok))
        oq = outage_upper_bound(perf, fading, "quad")
        om = outage_upper_bound(perf, fading, "mc", trials=trials, seed=cfg.mc.seed)
        ok = abs(om.value - oq) <= 3 * om.stderr + 1e-12
        out.append(Check("perf", f"outage mc vs quad at {snr_db:g} dB (3 SE)", oq, om.value, 3 * om.stderr, ok))
    return out


def validate(cfg: ScenarioConfig, suite: str = "all") -> list:
    """Run validation suites and return their :class:`Check` records."""
    suites = SUITES if suite == "all" else (suite,)
    runners = {"regimes": _suite_regimes, "fields": _suite_fields, "gml": _suite_gml, "perf": _suite_perf}
    out = []
    for s in suites:
        if s not in runners:
            raise ValueError(f"unknown suite {s!r}")
        out.extend(runners[s](cfg))
    return out
