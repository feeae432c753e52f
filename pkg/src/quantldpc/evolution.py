"""Discrete density evolution for quantized message-passing ensembles.

Tracks joint PMFs of (code bit, message) through check and variable node
updates of a regular (dv, dc) ensemble, redesigning the node quantizers at
every iteration.  Check nodes either work in the translated sum domain
(``comp`` with threshold quantization, ``comp_uni`` with the shift-based
uniform quantizer) or approximate the update by the extrinsic minimum
(``min``).  An offset-min-sum baseline (``omsq``) evolves plain uniform-LLR
integer messages with no designed tables at all.

The per-iteration designs are collected into a DesignArtifact that the
fixed-point decoder executes verbatim; de_threshold wraps the whole design
pipeline in a bisection over the design SNR.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .pmf import (
    ChannelModel,
    JointPMF,
    ValidationError,
    apply_quantizer,
    awgn_llr_pmf,
    mutual_information,
    symmetrize_vn_sum,
)
from .quantizers import (
    QuantizerSpec,
    TranslationTable,
    build_delta_grid,
    build_translation_table,
    design_channel_quantizer,
    design_nonuniform,
    design_uniform,
    llr_saturation_delta,
    phi_saturation_delta,
    threshold_edges_llr,
)

CN_VARIANTS = ("comp", "comp_uni", "min", "omsq")
VN_VARIANTS = ("comp", "comp_uni", "omsq")

#: mi_vn level treated as converged
EARLY_STOP_MI = 1.0 - 1e-6


@dataclass(frozen=True)
class EnsembleConfig:
    """Regular ensemble and design-procedure parameters.

    ``delta_search_points``: 0 leaves the non-uniform designs at the
    saturation step size (largest finite translation value lands exactly on
    the top of the wphi-bit range); n > 1 searches an n-point logarithmic
    grid around it for the MI-best step instead.  The uniform designs
    always search ``uniform_grid_points`` steps spanning a factor-64 range.
    """

    dc: int
    dv: int
    w: int
    wphi: int
    iterations: int
    cn_variant: str
    vn_variant: str
    design_ebn0_db: float
    rate: float
    channel_grid_size: int = 2000
    clip_llr: float | None = None
    prune_tol: float = 1e-12
    delta_search_points: int = 0
    uniform_grid_points: int = 256
    uniform_warm_window: int = 10
    beta: int = 1

    def __post_init__(self):
        if self.dc < 2:
            raise ValidationError("check degree must be at least 2")
        if self.dv < 1:
            raise ValidationError("variable degree must be at least 1")
        if not (2 <= self.w <= self.wphi):
            raise ValidationError("need 2 <= w <= wphi")
        if self.iterations < 0:
            raise ValidationError("iterations must be nonnegative")
        if self.cn_variant not in CN_VARIANTS:
            raise ValidationError(f"unknown cn_variant {self.cn_variant!r}")
        if self.vn_variant not in VN_VARIANTS:
            raise ValidationError(f"unknown vn_variant {self.vn_variant!r}")
        if (self.cn_variant == "omsq") != (self.vn_variant == "omsq"):
            raise ValidationError("the omsq baseline fixes both node variants together")
        if self.beta < 0:
            raise ValidationError("beta must be nonnegative")
        if self.uniform_grid_points < 2:
            raise ValidationError("uniform_grid_points must be at least 2")
        if self.uniform_warm_window < 0:
            raise ValidationError("uniform_warm_window must be nonnegative")

    def channel_model(self) -> ChannelModel:
        return ChannelModel(self.design_ebn0_db, self.rate,
                            self.channel_grid_size, self.clip_llr)


@dataclass(frozen=True)
class OmsqChannelQuantizer:
    """Uniform LLR quantizer of the offset-min-sum baseline.

    Maps a real LLR to round-half-up(|L| / step) with the input sign,
    clipped to +/-(2**(w-1) - 1); zero is a valid output.
    """

    step: float
    width_w: int

    def __post_init__(self):
        if not (self.step > 0):
            raise ValidationError("step must be positive")

    @property
    def levels(self):
        return (1 << (self.width_w - 1)) - 1

    def map_llr(self, llr):
        llr = np.asarray(llr, dtype=np.float64)
        mags = np.floor(np.abs(llr) / self.step + 0.5)
        t = np.sign(llr) * np.minimum(mags, self.levels)
        return t.astype(np.int64)


@dataclass
class IterationDesign:
    """Quantizers, tables and achieved MI of one designed iteration."""

    mi_cn: float
    mi_vn: float
    cn_tables: TranslationTable | None = None
    cn_quantizer: QuantizerSpec | None = None
    vn_tables: dict | None = None           # keys "phi_ch", "phi_c"
    vn_quantizer: QuantizerSpec | None = None


@dataclass
class DesignArtifact:
    """Everything the fixed-point decoder needs, serializable as JSON.

    ``channel_edges_llr`` carries the channel quantizer cell boundaries in
    raw LLR units so a simulator can quantize real channel observations
    without regenerating the fine design grid.  ``per_iteration`` may be
    shorter than the configured iteration count when the design converged
    or plateaued early; executors reuse the last record beyond its end.
    """

    config: EnsembleConfig
    channel_quantizer: object
    channel_pmf: JointPMF
    channel_edges_llr: tuple | None
    per_iteration: list = field(default_factory=list)
    format_version: int = 1

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(_artifact_to_tree(self), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "DesignArtifact":
        return _artifact_from_tree(json.loads(text))

    def save(self, path):
        with open(path, "w", encoding="ascii") as f:
            f.write(self.to_json())
            f.write("\n")

    @classmethod
    def load(cls, path) -> "DesignArtifact":
        with open(path, "r", encoding="ascii") as f:
            return cls.from_json(f.read())


# ---------------------------------------------------------------------------
# node evolution
# ---------------------------------------------------------------------------

def cn_evolve_comp(p_in: JointPMF, dc: int, table: TranslationTable) -> JointPMF:
    """Distribution of the translated check node sum over dc-1 edges.

    The output symbol is (sign product, sum of translated magnitudes) with
    the relevant bit being the XOR of the dc-1 participating bits.  Sign
    and magnitude parts decouple under the parity transform, so the dc-2
    pairwise convolutions reduce to two plain power-convolutions.  The
    output uses ``mag_offset=1``: symbols +/-(m+1) carry magnitude m, which
    keeps the two signs of a zero sum distinct.
    """
    if dc < 2:
        raise ValidationError("check degree must be at least 2")
    if not p_in.symmetric:
        raise ValidationError("check node evolution expects a symmetric PMF")
    vals = table.as_array()
    _, a, b = p_in.fold_positive()
    if vals.size != a.size:
        raise ValidationError("translation table does not match the message alphabet")

    # conditional on x=0: p(t=+k) = 2 p(x=0,+k), p(t=-k) = 2 p(x=0,-k)
    vmax = int(vals.max())
    q0 = np.zeros(vmax + 1)
    q1 = np.zeros(vmax + 1)
    np.add.at(q0, vals, 2.0 * a)
    np.add.at(q1, vals, 2.0 * b)

    u = q0 + q1
    v = q0 - q1
    U, V = u, v
    for _ in range(dc - 2):
        U = np.convolve(U, u)
        V = np.convolve(V, v)
    even = 0.5 * (U + V)    # parity of sign bits even, conditioned on x=0
    odd = 0.5 * (U - V)

    n = U.size
    alphabet = np.concatenate([-np.arange(n, 0, -1), np.arange(1, n + 1)])
    mass = np.zeros((2, 2 * n))
    mass[0, n:] = 0.5 * even
    mass[0, :n] = 0.5 * odd[::-1]
    mass[1] = mass[0, ::-1]
    np.maximum(mass, 0.0, out=mass)   # convolution round-off dust
    mass /= mass.sum()
    values = np.sign(alphabet) * (np.abs(alphabet) - 1) * table.delta
    return JointPMF(alphabet, mass, llr_order=True, symmetric=True,
                    mag_offset=1, values=values)


def _min_index_matrix(k):
    i = np.arange(k)
    return np.minimum(i[:, None], i[None, :]).ravel()


def _pairwise_min(acc0, acc1, b0, b1, idx):
    """One (sign product, min magnitude) combine of two folded PMFs."""
    k = acc0.size
    z0 = np.zeros(k)
    z1 = np.zeros(k)
    np.add.at(z0, idx, (np.outer(acc0, b0) + np.outer(acc1, b1)).ravel())
    np.add.at(z1, idx, (np.outer(acc0, b1) + np.outer(acc1, b0)).ravel())
    return z0, z1


def cn_evolve_min(p_in: JointPMF, dc: int) -> JointPMF:
    """Min-approximation check node: sign product and extrinsic minimum.

    Stays on the input message alphabet; no translation or quantizer.
    """
    if dc < 2:
        raise ValidationError("check degree must be at least 2")
    if not p_in.symmetric:
        raise ValidationError("check node evolution expects a symmetric PMF")
    _, a, b = p_in.fold_positive()
    K = a.size
    base0, base1 = 2.0 * a, 2.0 * b
    q0, q1 = base0.copy(), base1.copy()
    idx = _min_index_matrix(K)
    for _ in range(dc - 2):
        q0, q1 = _pairwise_min(q0, q1, base0, base1, idx)
    alphabet = np.concatenate([np.arange(-K, 0), np.arange(1, K + 1)])
    mass = np.zeros((2, 2 * K))
    mass[0, K:] = 0.5 * q0
    mass[0, :K] = 0.5 * q1[::-1]
    mass[1] = mass[0, ::-1]
    mass /= mass.sum()
    return JointPMF(alphabet, mass, llr_order=True, symmetric=True)


def _signed_translated(p: JointPMF, table: TranslationTable):
    """Dense PMF of the translated signed value, conditioned on x=0."""
    vals = table.as_array()
    _, a, b = p.fold_positive()
    if vals.size != a.size:
        raise ValidationError("translation table does not match the message alphabet")
    S = int(vals.max())
    arr = np.zeros(2 * S + 1)
    np.add.at(arr, S + vals, 2.0 * a)
    np.add.at(arr, S - vals, 2.0 * b)
    return arr, S


def vn_evolve(p_cn: JointPMF, p_ch: JointPMF, dv: int, tables: dict) -> JointPMF:
    """Variable node update: translated adder sum, then symmetry repair.

    Convolves the channel translation with dv-1 check message translations
    on the signed integer grid (zero included), then applies
    :func:`symmetrize_vn_sum`, so the result lives on the zero-free
    sign-magnitude message domain.
    """
    if dv < 1:
        raise ValidationError("variable degree must be at least 1")
    tab_ch: TranslationTable = tables["phi_ch"]
    tab_c: TranslationTable = tables["phi_c"]
    if tab_ch.width_wphi != tab_c.width_wphi:
        raise ValidationError("translation tables disagree on the internal width")
    if tab_ch.delta != tab_c.delta:
        raise ValidationError("translation tables disagree on the step size")

    h, Sh = _signed_translated(p_ch, tab_ch)
    span = Sh + (dv - 1) * ((1 << (tab_c.width_wphi - 1)) - 1)
    adder_limit = 1 << (tab_c.width_wphi - 1 + max(1, math.ceil(math.log2(max(dv, 2)))) + 1)
    if span >= adder_limit:
        raise ValidationError("sum range exceeds the declared adder width")

    acc, S = h, Sh
    if dv > 1:
        c, Sc = _signed_translated(p_cn, tab_c)
        for _ in range(dv - 1):
            acc = np.convolve(acc, c)
            S += Sc
    alphabet = np.arange(-S, S + 1)
    mass = np.zeros((2, alphabet.size))
    mass[0] = 0.5 * acc
    mass[1] = 0.5 * acc[::-1]
    np.maximum(mass, 0.0, out=mass)
    mass /= mass.sum()
    raw = JointPMF(alphabet, mass, symmetric=True,
                   values=alphabet * tab_c.delta)
    return symmetrize_vn_sum(raw)


# ---------------------------------------------------------------------------
# offset-min-sum baseline evolution
# ---------------------------------------------------------------------------

def _omsq_channel_design(fine: JointPMF, w: int):
    """Uniform channel step for the baseline, picked by MI grid search."""
    M = (1 << (w - 1)) - 1
    centers = fine.values
    spread = float(np.sqrt(np.sum(fine.p_y() * centers ** 2)))
    ref = spread / M
    best = None
    for step in np.geomspace(ref / 32.0, 2.0 * ref, 200):
        mags = np.floor(np.abs(centers) / step + 0.5)
        mapping = (np.sign(centers) * np.minimum(mags, M)).astype(np.int64)
        mi = mutual_information(apply_quantizer(fine, mapping))
        if best is None or mi > best[0]:
            best = (mi, float(step))
    _, step = best
    quant = OmsqChannelQuantizer(step, w)
    mags = np.floor(np.abs(centers) / step + 0.5)
    mapping = (np.sign(centers) * np.minimum(mags, M)).astype(np.int64)
    return quant, apply_quantizer(fine, mapping)


def _omsq_fold(p: JointPMF):
    """(sign bit, magnitude) split of a signed-alphabet PMF given x=0."""
    M = int(p.alphabet[-1])
    cond = 2.0 * p.mass[0]
    q0 = cond[M:].copy()          # symbols 0..M (zero counts as +)
    q1 = np.zeros(M + 1)
    q1[1:] = cond[:M][::-1]       # symbols -1..-M
    return q0, q1, M


def _omsq_cn_evolve(p_in: JointPMF, dc: int, beta: int) -> JointPMF:
    """Sign product and extrinsic min magnitude, offset by beta (floor 0)."""
    if dc < 2:
        raise ValidationError("check degree must be at least 2")
    base0, base1, M = _omsq_fold(p_in)
    idx = _min_index_matrix(M + 1)
    q0, q1 = base0.copy(), base1.copy()
    for _ in range(dc - 2):
        q0, q1 = _pairwise_min(q0, q1, base0, base1, idx)
    if beta:
        z0 = np.zeros(M + 1)
        z1 = np.zeros(M + 1)
        dest = np.maximum(np.arange(M + 1) - beta, 0)
        np.add.at(z0, dest, q0)
        np.add.at(z1, dest, q1)
        q0, q1 = z0, z1
    alphabet = np.arange(-M, M + 1)
    mass = np.zeros((2, alphabet.size))
    mass[0, M] = 0.5 * (q0[0] + q1[0])      # zero magnitude loses its sign
    mass[0, M + 1:] = 0.5 * q0[1:]
    mass[0, :M] = 0.5 * q1[1:][::-1]
    mass[1] = mass[0, ::-1]
    mass /= mass.sum()
    return JointPMF(alphabet, mass, symmetric=True)


def _omsq_vn_evolve(p_cn: JointPMF, p_ch: JointPMF, dv: int) -> JointPMF:
    """Saturating integer sum of the channel and dv-1 check messages."""
    if dv < 1:
        raise ValidationError("variable degree must be at least 1")
    M = int(p_ch.alphabet[-1])
    acc = 2.0 * p_ch.mass[0]
    S = M
    if dv > 1:
        c = 2.0 * p_cn.mass[0]
        for _ in range(dv - 1):
            acc = np.convolve(acc, c)
            S += M
    # clip the sum back to +/-M
    clipped = np.zeros(2 * M + 1)
    lo = S - M
    clipped[:] = acc[lo:lo + 2 * M + 1]
    clipped[0] += acc[:lo].sum()
    clipped[-1] += acc[lo + 2 * M + 1:].sum()
    alphabet = np.arange(-M, M + 1)
    mass = np.vstack([0.5 * clipped, 0.5 * clipped[::-1]])
    row = 0.5 * (mass[0] + mass[1][::-1])   # exact symmetry
    mass = np.vstack([row, row[::-1]])
    mass /= mass.sum()
    return JointPMF(alphabet, mass, symmetric=True)


# ---------------------------------------------------------------------------
# decoder design
# ---------------------------------------------------------------------------

def _search_subgrid(grid, prev_best, half_width):
    """Window of a sorted grid around a previous optimum (None = full)."""
    if prev_best is None or half_width <= 0:
        return grid, False
    c = int(np.searchsorted(grid, prev_best))
    lo = max(0, c - half_width)
    hi = min(grid.size, c + half_width + 1)
    return grid[lo:hi], (lo > 0 or hi < grid.size)


def _design_cn_comp(p_in, cfg):
    """Non-uniform CN stage: tables at the chosen step, aggregate, DP design."""
    dstar = phi_saturation_delta(p_in, cfg.wphi)
    if cfg.delta_search_points > 1:
        candidates = build_delta_grid(dstar, cfg.delta_search_points)
    else:
        candidates = [dstar]
    best = None
    cache = {}
    for step in candidates:
        step = float(step)
        tab = build_translation_table(p_in, "cn_phi", step, cfg.wphi)
        agg = cache.get(tab.values)
        if agg is None:
            agg = cn_evolve_comp(p_in, cfg.dc, tab)
            cache[tab.values] = agg
        spec, mi = design_nonuniform(agg, cfg.w, delta=step, prune_tol=cfg.prune_tol)
        if best is None or mi > best[0]:
            best = (mi, tab, spec, agg)
    mi, tab, spec, agg = best
    return tab, spec, mi, apply_quantizer(agg, spec)


def _design_cn_uniform(p_in, cfg, prev_delta):
    """Uniform CN stage: joint (step, shift, offset) search with rebuilds."""
    dstar = phi_saturation_delta(p_in, cfg.wphi)
    grid = build_delta_grid(dstar, cfg.uniform_grid_points)
    cache = {}

    def rebuild(step):
        tab = build_translation_table(p_in, "cn_phi", step, cfg.wphi)
        agg = cache.get(tab.values)
        if agg is None:
            agg = cn_evolve_comp(p_in, cfg.dc, tab)
            cache[tab.values] = agg
        return agg

    sub, windowed = _search_subgrid(grid, prev_delta, cfg.uniform_warm_window)
    spec, mi = design_uniform(p_in, cfg.w, wphi=cfg.wphi, kappa_search=True,
                              rebuild=rebuild, delta_grid=sub)
    if windowed and (spec.delta <= sub[0] or spec.delta >= sub[-1]):
        spec, mi = design_uniform(p_in, cfg.w, wphi=cfg.wphi, kappa_search=True,
                                  rebuild=rebuild, delta_grid=grid)
    tab = build_translation_table(p_in, "cn_phi", spec.delta, cfg.wphi)
    return tab, spec, mi, apply_quantizer(rebuild(spec.delta), spec)


def _vn_tables(p_cn, p_ch, step, wphi):
    return {
        "phi_ch": build_translation_table(p_ch, "vn_llr", step, wphi),
        "phi_c": build_translation_table(p_cn, "vn_llr", step, wphi),
    }


def _design_vn_comp(p_cn, p_ch, cfg):
    dstar = llr_saturation_delta([p_cn, p_ch], cfg.wphi)
    if cfg.delta_search_points > 1:
        candidates = build_delta_grid(dstar, cfg.delta_search_points)
    else:
        candidates = [dstar]
    best = None
    cache = {}
    for step in candidates:
        step = float(step)
        tabs = _vn_tables(p_cn, p_ch, step, cfg.wphi)
        key = (tabs["phi_ch"].values, tabs["phi_c"].values)
        sym = cache.get(key)
        if sym is None:
            sym = vn_evolve(p_cn, p_ch, cfg.dv, tabs)
            cache[key] = sym
        spec, mi = design_nonuniform(sym, cfg.w, delta=step, prune_tol=cfg.prune_tol)
        if best is None or mi > best[0]:
            best = (mi, tabs, spec, sym)
    mi, tabs, spec, sym = best
    return tabs, spec, mi, apply_quantizer(sym, spec)


def _design_vn_uniform(p_cn, p_ch, cfg, prev_delta):
    dstar = llr_saturation_delta([p_cn, p_ch], cfg.wphi)
    grid = build_delta_grid(dstar, cfg.uniform_grid_points)
    cache = {}

    def rebuild(step):
        tabs = _vn_tables(p_cn, p_ch, step, cfg.wphi)
        key = (tabs["phi_ch"].values, tabs["phi_c"].values)
        sym = cache.get(key)
        if sym is None:
            sym = vn_evolve(p_cn, p_ch, cfg.dv, tabs)
            cache[key] = sym
        return sym

    sub, windowed = _search_subgrid(grid, prev_delta, cfg.uniform_warm_window)
    spec, mi = design_uniform(p_ch, cfg.w, wphi=cfg.wphi, kappa_search=False,
                              rebuild=rebuild, delta_grid=sub)
    if windowed and (spec.delta <= sub[0] or spec.delta >= sub[-1]):
        spec, mi = design_uniform(p_ch, cfg.w, wphi=cfg.wphi, kappa_search=False,
                                  rebuild=rebuild, delta_grid=grid)
    tabs = _vn_tables(p_cn, p_ch, spec.delta, cfg.wphi)
    return tabs, spec, mi, apply_quantizer(rebuild(spec.delta), spec)


def design_decoder(cfg: EnsembleConfig):
    """Run discrete density evolution at the design SNR.

    Iteration 1 forwards the channel messages straight into the check
    nodes; every iteration then designs the variant-specific quantizers on
    the evolved distributions.  Returns the DesignArtifact and the MI
    trajectory, a list of (mi_cn, mi_vn) pairs.  The loop leaves early once
    mi_vn reaches 1 - 1e-6 or stalls for several iterations, so the
    artifact may cover fewer than ``cfg.iterations`` iterations.
    """
    fine = awgn_llr_pmf(cfg.channel_model())
    if cfg.cn_variant == "omsq":
        chq, t_ch = _omsq_channel_design(fine, cfg.w)
        edges = None
    else:
        chq, t_ch = design_channel_quantizer(fine, cfg.w)
        edges = threshold_edges_llr(chq, fine)
    artifact = DesignArtifact(cfg, chq, t_ch, edges)
    trajectory = []

    p_v2c = t_ch
    prev_cn_delta = None
    prev_vn_delta = None
    prev_mi_vn = None
    stall = 0
    dips = 0
    for _ in range(cfg.iterations):
        rec = IterationDesign(mi_cn=0.0, mi_vn=0.0)
        if cfg.cn_variant == "comp":
            rec.cn_tables, rec.cn_quantizer, rec.mi_cn, p_c2v = _design_cn_comp(p_v2c, cfg)
            prev_cn_delta = rec.cn_quantizer.delta
        elif cfg.cn_variant == "comp_uni":
            rec.cn_tables, rec.cn_quantizer, rec.mi_cn, p_c2v = \
                _design_cn_uniform(p_v2c, cfg, prev_cn_delta)
            prev_cn_delta = rec.cn_quantizer.delta
        elif cfg.cn_variant == "min":
            p_c2v = cn_evolve_min(p_v2c, cfg.dc)
            rec.mi_cn = mutual_information(p_c2v)
        else:  # omsq
            p_c2v = _omsq_cn_evolve(p_v2c, cfg.dc, cfg.beta)
            rec.mi_cn = mutual_information(p_c2v)

        if cfg.vn_variant == "comp":
            rec.vn_tables, rec.vn_quantizer, rec.mi_vn, p_v2c = \
                _design_vn_comp(p_c2v, t_ch, cfg)
            prev_vn_delta = rec.vn_quantizer.delta
        elif cfg.vn_variant == "comp_uni":
            rec.vn_tables, rec.vn_quantizer, rec.mi_vn, p_v2c = \
                _design_vn_uniform(p_c2v, t_ch, cfg, prev_vn_delta)
            prev_vn_delta = rec.vn_quantizer.delta
        else:  # omsq
            p_v2c = _omsq_vn_evolve(p_c2v, t_ch, cfg.dv)
            rec.mi_vn = mutual_information(p_v2c)

        artifact.per_iteration.append(rec)
        trajectory.append((rec.mi_cn, rec.mi_vn))

        if prev_mi_vn is not None and rec.mi_vn < prev_mi_vn - 1e-9:
            dips += 1
        if rec.mi_vn >= EARLY_STOP_MI:
            break
        if prev_mi_vn is not None and abs(rec.mi_vn - prev_mi_vn) < 1e-11:
            stall += 1
            if stall >= 3:
                break
        else:
            stall = 0
        prev_mi_vn = rec.mi_vn
    if dips:
        warnings.warn(
            f"mi_vn decreased on {dips} of {len(trajectory)} iterations "
            "(quantizer redesign oscillation)", RuntimeWarning, stacklevel=2)
    return artifact, trajectory


# ---------------------------------------------------------------------------
# threshold search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of a DE threshold bisection.

    status "ok": ``snr_db`` is the smallest probed SNR that converges, at
    the requested resolution.  status "lo_boundary": the whole window
    converges, the true threshold lies at or below its lower edge.  status
    "no_convergence": nothing in the window converges.  ``probes`` records
    every (snr_db, converged) pair in evaluation order.
    """

    snr_db: float | None
    status: str
    probes: tuple = ()


def de_threshold(cfg: EnsembleConfig, target_mi: float, snr_window,
                 resolution_db: float = 0.005) -> ThresholdResult:
    """Bisection for the smallest design SNR whose DE trajectory converges.

    Each probe redesigns the full decoder at that SNR and asks whether
    mi_vn reaches ``target_mi`` within cfg.iterations.
    """
    lo, hi = float(snr_window[0]), float(snr_window[1])
    if not lo < hi:
        raise ValidationError("snr window must satisfy lo < hi")
    if not (0.9 < target_mi < 1.0):
        raise ValidationError("target_mi must lie in (0.9, 1)")

    probes = []

    def converges(snr):
        probe_cfg = EnsembleConfig(
            dc=cfg.dc, dv=cfg.dv, w=cfg.w, wphi=cfg.wphi,
            iterations=cfg.iterations, cn_variant=cfg.cn_variant,
            vn_variant=cfg.vn_variant, design_ebn0_db=snr, rate=cfg.rate,
            channel_grid_size=cfg.channel_grid_size, clip_llr=cfg.clip_llr,
            prune_tol=cfg.prune_tol, delta_search_points=cfg.delta_search_points,
            uniform_grid_points=cfg.uniform_grid_points,
            uniform_warm_window=cfg.uniform_warm_window, beta=cfg.beta)
        _, traj = design_decoder(probe_cfg)
        ok = bool(traj) and max(mi_vn for _, mi_vn in traj) >= target_mi
        probes.append((snr, ok))
        return ok

    if converges(lo):
        return ThresholdResult(lo, "lo_boundary", tuple(probes))
    if not converges(hi):
        return ThresholdResult(None, "no_convergence", tuple(probes))
    while hi - lo > resolution_db:
        mid = 0.5 * (lo + hi)
        if converges(mid):
            hi = mid
        else:
            lo = mid
    return ThresholdResult(hi, "ok", tuple(probes))


# ---------------------------------------------------------------------------
# artifact serialization (bit-exact: floats stored as repr strings)
# ---------------------------------------------------------------------------

def _f2s(x):
    return repr(float(x))


def _s2f(s):
    return float(s)


def _spec_to_tree(spec):
    if spec is None:
        return None
    if isinstance(spec, OmsqChannelQuantizer):
        return {"kind": "omsq_uniform_llr", "step": _f2s(spec.step),
                "width_w": spec.width_w}
    tree = {"kind": spec.kind, "out_width_w": spec.out_width_w,
            "delta": _f2s(spec.delta)}
    if spec.kind == "non_uniform":
        tree["thresholds"] = list(spec.thresholds)
    else:
        tree["shift_r"] = spec.shift_r
        tree["offset_kappa"] = spec.offset_kappa
    return tree


def _spec_from_tree(tree):
    if tree is None:
        return None
    if tree["kind"] == "omsq_uniform_llr":
        return OmsqChannelQuantizer(_s2f(tree["step"]), int(tree["width_w"]))
    if tree["kind"] == "non_uniform":
        return QuantizerSpec("non_uniform", int(tree["out_width_w"]),
                             delta=_s2f(tree["delta"]),
                             thresholds=tuple(tree["thresholds"]))
    return QuantizerSpec("uniform", int(tree["out_width_w"]),
                         delta=_s2f(tree["delta"]),
                         shift_r=int(tree["shift_r"]),
                         offset_kappa=int(tree["offset_kappa"]))


def _table_to_tree(tab):
    if tab is None:
        return None
    return {"values": list(tab.values), "width_wphi": tab.width_wphi,
            "delta": _f2s(tab.delta), "sign_rule": tab.sign_rule,
            "clipped": list(tab.clipped)}


def _table_from_tree(tree):
    if tree is None:
        return None
    return TranslationTable(tuple(tree["values"]), int(tree["width_wphi"]),
                            _s2f(tree["delta"]), sign_rule=bool(tree["sign_rule"]),
                            clipped=tuple(tree["clipped"]))


def _pmf_to_tree(p):
    return {
        "alphabet": [int(y) for y in p.alphabet],
        "mass": [[_f2s(v) for v in row] for row in p.mass],
        "llr_order": p.llr_order,
        "symmetric": p.symmetric,
        "mag_offset": p.mag_offset,
        "values": None if p.values is None else [_f2s(v) for v in p.values],
    }


def _pmf_from_tree(tree):
    mass = np.array([[_s2f(v) for v in row] for row in tree["mass"]])
    values = tree["values"]
    return JointPMF(np.array(tree["alphabet"], dtype=np.int64), mass,
                    llr_order=bool(tree["llr_order"]),
                    symmetric=bool(tree["symmetric"]),
                    mag_offset=int(tree["mag_offset"]),
                    values=None if values is None else [_s2f(v) for v in values])


def _config_to_tree(cfg):
    return {
        "dc": cfg.dc, "dv": cfg.dv, "w": cfg.w, "wphi": cfg.wphi,
        "iterations": cfg.iterations, "cn_variant": cfg.cn_variant,
        "vn_variant": cfg.vn_variant, "design_ebn0_db": _f2s(cfg.design_ebn0_db),
        "rate": _f2s(cfg.rate), "channel_grid_size": cfg.channel_grid_size,
        "clip_llr": None if cfg.clip_llr is None else _f2s(cfg.clip_llr),
        "prune_tol": _f2s(cfg.prune_tol),
        "delta_search_points": cfg.delta_search_points,
        "uniform_grid_points": cfg.uniform_grid_points,
        "beta": cfg.beta,
    }


def _config_from_tree(tree):
    return EnsembleConfig(
        dc=int(tree["dc"]), dv=int(tree["dv"]), w=int(tree["w"]),
        wphi=int(tree["wphi"]), iterations=int(tree["iterations"]),
        cn_variant=tree["cn_variant"], vn_variant=tree["vn_variant"],
        design_ebn0_db=_s2f(tree["design_ebn0_db"]), rate=_s2f(tree["rate"]),
        channel_grid_size=int(tree["channel_grid_size"]),
        clip_llr=None if tree["clip_llr"] is None else _s2f(tree["clip_llr"]),
        prune_tol=_s2f(tree["prune_tol"]),
        delta_search_points=int(tree["delta_search_points"]),
        uniform_grid_points=int(tree["uniform_grid_points"]),
        beta=int(tree["beta"]),
    )


def _artifact_to_tree(art):
    return {
        "format_version": art.format_version,
        "config": _config_to_tree(art.config),
        "channel_quantizer": _spec_to_tree(art.channel_quantizer),
        "channel_edges_llr": (None if art.channel_edges_llr is None
                              else [_f2s(e) for e in art.channel_edges_llr]),
        "channel_pmf": _pmf_to_tree(art.channel_pmf),
        "per_iteration": [
            {
                "cn_tables": _table_to_tree(r.cn_tables),
                "cn_quantizer": _spec_to_tree(r.cn_quantizer),
                "vn_tables": None if r.vn_tables is None else {
                    "phi_ch": _table_to_tree(r.vn_tables["phi_ch"]),
                    "phi_c": _table_to_tree(r.vn_tables["phi_c"]),
                },
                "vn_quantizer": _spec_to_tree(r.vn_quantizer),
                "mi_cn": _f2s(r.mi_cn),
                "mi_vn": _f2s(r.mi_vn),
            }
            for r in art.per_iteration
        ],
    }


def _artifact_from_tree(tree):
    if tree.get("format_version") != 1:
        raise ValidationError(f"unsupported artifact format {tree.get('format_version')!r}")
    per_iteration = []
    for r in tree["per_iteration"]:
        vt = r["vn_tables"]
        per_iteration.append(IterationDesign(
            mi_cn=_s2f(r["mi_cn"]), mi_vn=_s2f(r["mi_vn"]),
            cn_tables=_table_from_tree(r["cn_tables"]),
            cn_quantizer=_spec_from_tree(r["cn_quantizer"]),
            vn_tables=None if vt is None else {
                "phi_ch": _table_from_tree(vt["phi_ch"]),
                "phi_c": _table_from_tree(vt["phi_c"]),
            },
            vn_quantizer=_spec_from_tree(r["vn_quantizer"]),
        ))
    edges = tree["channel_edges_llr"]
    return DesignArtifact(
        config=_config_from_tree(tree["config"]),
        channel_quantizer=_spec_from_tree(tree["channel_quantizer"]),
        channel_pmf=_pmf_from_tree(tree["channel_pmf"]),
        channel_edges_llr=None if edges is None else tuple(_s2f(e) for e in edges),
        per_iteration=per_iteration,
        format_version=1,
    )
