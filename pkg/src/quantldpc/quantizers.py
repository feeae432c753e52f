"""Quantizer design for symmetric binary-input message distributions.

Two quantizer families act on symbol magnitudes of a symmetric joint PMF:

* non-uniform threshold quantizers, designed by dynamic programming that is
  exact over all contiguous magnitude partitions and maximizes the mutual
  information of the quantized output;
* uniform shift-and-offset quantizers (add an offset, drop the r low bits,
  saturate), whose free parameters are searched exhaustively.

Both designs return a :class:`QuantizerSpec` consumable by
``pmf.apply_quantizer`` together with the mutual information achieved.
:class:`TranslationTable` maps quantizer output cells back to fixed-point
computational-domain values (check node phi sums or variable node LLRs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pmf import JointPMF, ValidationError, _xlog2x


@dataclass(frozen=True)
class QuantizerSpec:
    """Symmetric magnitude quantizer with pass-through sign.

    The magnitude of each input symbol maps to a cell index 1..2**(w-1):

    * kind ``"non_uniform"``: cell(m) = 1 + #{thresholds <= m}, so a
      magnitude equal to a threshold lands in the upper cell;
    * kind ``"uniform"``: cell(m) = min(((m + offset_kappa) >> shift_r) + 1,
      2**(w-1)).

    ``delta`` records the real value of one unit of the input magnitude
    axis so downstream consumers can convert back to LLR-like scales; it
    does not affect the mapping itself.
    """

    kind: str
    out_width_w: int
    delta: float = 1.0
    thresholds: tuple = ()
    shift_r: int = 0
    offset_kappa: int = 0

    def __post_init__(self):
        if self.out_width_w < 2:
            raise ValidationError("output width must be at least 2 bits")
        if not (self.delta > 0):
            raise ValidationError("delta must be positive")
        if self.kind == "non_uniform":
            t = tuple(int(v) for v in self.thresholds)
            object.__setattr__(self, "thresholds", t)
            if len(t) != self.n_cells - 1:
                raise ValidationError(
                    f"need {self.n_cells - 1} thresholds for {self.n_cells} cells, got {len(t)}")
            if any(v <= 0 for v in t) or any(t[i] >= t[i + 1] for i in range(len(t) - 1)):
                raise ValidationError("thresholds must be positive and strictly increasing")
        elif self.kind == "uniform":
            if not (0 <= self.shift_r < 32):
                raise ValidationError("shift_r out of range")
            if not (0 <= self.offset_kappa < (1 << self.shift_r) * self.n_cells):
                raise ValidationError("offset_kappa out of range for this shift")
        else:
            raise ValidationError(f"unknown quantizer kind {self.kind!r}")

    @property
    def n_cells(self):
        return 1 << (self.out_width_w - 1)

    def map_symbols(self, p: JointPMF):
        """Signed output cell index for every symbol of ``p``."""
        if np.any(p.alphabet == 0):
            raise ValidationError("alphabet contains 0; fold it into a signed domain first")
        mags = np.abs(p.alphabet) - p.mag_offset
        if np.any(mags < 0):
            raise ValidationError("negative magnitudes under this mag_offset")
        if self.kind == "non_uniform":
            cells = 1 + np.searchsorted(
                np.asarray(self.thresholds, dtype=np.int64), mags, side="right")
        else:
            cells = np.minimum((mags + self.offset_kappa) >> self.shift_r,
                               self.n_cells - 1) + 1
        return np.sign(p.alphabet) * cells


@dataclass(frozen=True)
class TranslationTable:
    """Per-cell fixed-point magnitudes for message translation.

    ``values[k-1]`` is the nonnegative integer assigned to cell k; under
    ``sign_rule`` the table extends oddly, the value for symbol -t being
    the negated value for +t.  One integer unit corresponds to ``delta`` in
    the real domain, and values saturate at 2**(width_wphi - 1) - 1.
    Values must be monotone in the cell index (in either direction, since
    reliability may grow or shrink with magnitude depending on the domain).
    ``clipped`` records 1-based cells whose raw value was infinite and got
    clipped to the range limit.
    """

    values: tuple
    width_wphi: int
    delta: float
    sign_rule: bool = True
    clipped: tuple = ()

    def __post_init__(self):
        v = tuple(int(x) for x in self.values)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "clipped", tuple(int(c) for c in self.clipped))
        if not v:
            raise ValidationError("translation table is empty")
        if min(v) < 0 or max(v) > self.vmax:
            raise ValidationError(f"table values must lie in [0, {self.vmax}]")
        d = np.diff(v)
        if not (np.all(d >= 0) or np.all(d <= 0)):
            raise ValidationError("table values must be monotone in the cell index")
        if not (self.delta > 0):
            raise ValidationError("delta must be positive")

    @property
    def vmax(self):
        return (1 << (self.width_wphi - 1)) - 1

    @property
    def saturated(self):
        return self.vmax in self.values

    def as_array(self):
        return np.asarray(self.values, dtype=np.int64)


def cell_llr_magnitudes(p: JointPMF):
    """|L_k| per positive symbol of a symmetric message PMF.

    One-sided cells give inf, unpopulated cells nan.
    """
    _, a, b = p.fold_positive()
    out = np.full(a.size, np.nan)
    for i in range(a.size):
        if a[i] > 0.0 and b[i] > 0.0:
            out[i] = abs(math.log(a[i]) - math.log(b[i]))
        elif a[i] > 0.0 or b[i] > 0.0:
            out[i] = math.inf
    return out


def cn_phi_values(p: JointPMF):
    """Raw phi = -ln tanh(|L_k| / 2) per positive cell (nan if unpopulated).

    A one-sided cell (infinite |L|) has phi 0; an uninformative cell
    (|L| = 0) has phi inf.
    """
    L = cell_llr_magnitudes(p)
    out = np.full(L.size, np.nan)
    for i, v in enumerate(L):
        if math.isnan(v):
            continue
        if v == 0.0:
            out[i] = math.inf
        elif math.isinf(v):
            out[i] = 0.0
        else:
            out[i] = -math.log(math.tanh(0.5 * v))
    return out


def phi_saturation_delta(p: JointPMF, wphi: int) -> float:
    """Step size putting the largest finite phi exactly at the wphi-bit top."""
    phis = cn_phi_values(p)
    finite = phis[np.isfinite(phis)]
    if finite.size == 0 or float(finite.max()) <= 0.0:
        raise ValidationError("no cell yields a usable phi value")
    return float(finite.max()) / ((1 << (wphi - 1)) - 1)


def llr_saturation_delta(pmfs, wphi: int) -> float:
    """Step size putting the largest finite cell LLR across PMFs at the top."""
    peak = 0.0
    for p in pmfs:
        L = cell_llr_magnitudes(p)
        finite = L[np.isfinite(L)]
        if finite.size:
            peak = max(peak, float(finite.max()))
    if peak <= 0.0:
        raise ValidationError("no finite cell LLR found")
    return peak / ((1 << (wphi - 1)) - 1)


def build_translation_table(p: JointPMF, mode: str, delta: float, wphi: int) -> TranslationTable:
    """Fixed-point translation values for each cell of a message PMF.

    Per positive cell the conditional LLR L_k is read off ``p``, converted
    to the requested domain and rounded half-up to a multiple of ``delta``:

    * mode ``"cn_phi"``: phi_k = -ln tanh(|L_k| / 2), the check node sum
      domain (a one-sided cell has phi 0, an uninformative cell infinity);
    * mode ``"vn_llr"``: |L_k| itself, the variable node adder domain.

    Values saturate at 2**(wphi-1) - 1; cells whose raw value is infinite
    are clipped there and listed in the table's ``clipped`` metadata.
    Cells with no probability mass inherit the value of the nearest
    populated cell below (or above, for a leading gap), which keeps the
    table monotone.
    """
    if mode not in ("cn_phi", "vn_llr"):
        raise ValidationError(f"unknown translation mode {mode!r}")
    raw = cn_phi_values(p) if mode == "cn_phi" else cell_llr_magnitudes(p)
    vmax = (1 << (wphi - 1)) - 1
    vals = np.full(raw.size, -1, dtype=np.int64)
    clipped = []
    for i, x in enumerate(raw):
        if math.isnan(x):
            continue
        if math.isinf(x):
            vals[i] = vmax
            clipped.append(i + 1)
        else:
            vals[i] = min(int(math.floor(x / delta + 0.5)), vmax)
    if np.all(vals < 0):
        raise ValidationError("every cell of the PMF is unpopulated")
    for i in range(1, vals.size):          # forward fill gaps
        if vals[i] < 0:
            vals[i] = vals[i - 1]
    for i in range(vals.size - 2, -1, -1):  # leading gap, if any
        if vals[i] < 0:
            vals[i] = vals[i + 1]
    return TranslationTable(tuple(int(v) for v in vals), wphi, delta,
                            clipped=tuple(clipped))


# ---------------------------------------------------------------------------
# non-uniform design: exact DP over contiguous magnitude partitions
# ---------------------------------------------------------------------------

def _folded_prune(mags, a, b, prune_tol, min_keep):
    """Fold the high-magnitude tail of joint mass <= prune_tol into the last
    kept symbol.  At least ``min_keep`` symbols survive."""
    if prune_tol <= 0.0:
        return mags, a, b
    tail = np.cumsum((a + b)[::-1])[::-1]
    keep = np.nonzero(tail > prune_tol)[0]
    t = int(keep[-1]) if keep.size else 0
    t = max(t, min_keep - 1)
    if t < mags.size - 1:
        a2 = a[: t + 1].copy()
        b2 = b[: t + 1].copy()
        a2[t] += a[t + 1:].sum()
        b2[t] += b[t + 1:].sum()
        return mags[: t + 1], a2, b2
    return mags, a, b


def _partition_scores(a, b):
    """G[i, e] = MI contribution of a cluster holding folded symbols i..e-1.

    The total mutual information of a partition of the positive half-axis
    is 2 * sum of its cluster scores.  Entries with e <= i are -inf.
    """
    A = np.concatenate([[0.0], np.cumsum(a)])
    B = np.concatenate([[0.0], np.cumsum(b)])
    pa = A[None, :] - A[:, None]
    pb = B[None, :] - B[:, None]
    G = _xlog2x(pa)
    G += _xlog2x(pb)
    s = pa + pb
    G -= _xlog2x(s)
    G += s
    idx = np.arange(A.size)
    G[idx[:, None] >= idx[None, :]] = -np.inf
    return G


def design_nonuniform(p: JointPMF, w: int, *, delta: float = 1.0,
                      prune_tol: float = 1e-12):
    """MI-optimal magnitude-threshold quantizer for a symmetric PMF.

    Dynamic programming over contiguous partitions of the magnitude axis
    into exactly 2**(w-1) nonempty cells, which is no loss: refining a
    partition never lowers mutual information.  Among MI ties the
    lexicographically smallest threshold vector wins.  A high-magnitude
    tail of joint mass at most ``prune_tol`` is folded into the last
    retained symbol before the search.

    Returns ``(QuantizerSpec, mutual_information_of_quantized_output)``.
    """
    if not p.symmetric:
        raise ValidationError("threshold design expects a symmetric PMF")
    if not p.llr_order:
        raise ValidationError("threshold design expects reliability-ordered magnitudes")
    K = 1 << (w - 1)
    mags, a, b = p.fold_positive()
    if mags.size < K:
        raise ValidationError(f"{mags.size} magnitudes cannot fill {K} cells")
    mags, a, b = _folded_prune(mags, a, b, prune_tol, K)
    n = mags.size

    G = _partition_scores(a, b)
    s = G[:, n].copy()            # one cell covering symbols j..n-1
    rows = np.arange(n + 1)
    choices = []
    for _ in range(K - 1):        # grow to 2, 3, ... K cells
        cand = G + s[None, :]
        pick = np.argmax(cand, axis=1)   # first max: smallest boundary
        s = cand[rows, pick]
        choices.append(pick)

    if not math.isfinite(s[0]):
        raise RuntimeError("partition search found no feasible solution")

    bounds = []
    j = 0
    for pick in reversed(choices):
        j = int(pick[j])
        bounds.append(j)
    thresholds = tuple(int(mags[e]) for e in bounds)
    spec = QuantizerSpec("non_uniform", w, delta=delta, thresholds=thresholds)
    return spec, float(2.0 * s[0])


def design_channel_quantizer(fine: JointPMF, w: int, *, prune_tol: float = 0.0):
    """Threshold quantizer for a fine channel-LLR grid.

    Same search as :func:`design_nonuniform`; the returned spec's ``delta``
    is the grid bin width, so integer thresholds convert to LLR units via
    :func:`threshold_edges_llr`.  Returns the spec together with the
    quantized channel message PMF.
    """
    from .pmf import apply_quantizer

    if fine.values is None:
        raise ValidationError("fine channel grid must carry bin-center values")
    step = float(fine.values[1] - fine.values[0])
    spec, _ = design_nonuniform(fine, w, delta=step, prune_tol=prune_tol)
    return spec, apply_quantizer(fine, spec)


def threshold_edges_llr(spec: QuantizerSpec, fine: JointPMF):
    """LLR positions of a channel threshold quantizer's cell boundaries.

    Reported as the lower edge of the first grid bin of each upper cell:
    bins left of the edge quantize down, bins at or right of it up.
    """
    if spec.kind != "non_uniform":
        raise ValidationError("only threshold quantizers have LLR edges")
    step = float(fine.values[1] - fine.values[0])
    edges = []
    for t in spec.thresholds:
        i = int(np.searchsorted(fine.alphabet, t))
        edges.append(float(fine.values[i]) - 0.5 * step)
    return tuple(edges)


# ---------------------------------------------------------------------------
# uniform design: exhaustive shift / offset / step-size search
# ---------------------------------------------------------------------------

def _dense_folded(p: JointPMF):
    """Positive-half masses on a dense magnitude-indexed grid 0..M."""
    mags, a, b = p.fold_positive()
    M = int(mags[-1])
    da = np.zeros(M + 1)
    db = np.zeros(M + 1)
    da[mags] = a
    db[mags] = b
    return da, db


def _magnitude_unit(p: JointPMF) -> float:
    """Real value of one magnitude step, read off a PMF's values array."""
    if p.values is None:
        return 1.0
    mags = np.abs(p.alphabet) - p.mag_offset
    nz = mags >= 1
    if not np.any(nz):
        return 1.0
    i = int(np.argmax(nz))
    return float(abs(p.values[i]) / mags[i])


def _uniform_sweep(da, db, w, r_limit, kappa_search):
    """Best (mi, shift, offset) for dropping low bits of a magnitude PMF."""
    K = 1 << (w - 1)
    M = da.size - 1
    cumA = np.concatenate([[0.0], np.cumsum(da)])
    cumB = np.concatenate([[0.0], np.cumsum(db)])
    cells = np.arange(K + 1)
    best = (-1.0, 0, 0)
    for r in range(r_limit):
        width = 1 << r
        for kappa in range(width) if kappa_search else (0,):
            bnd = cells * width - kappa
            bnd[0] = 0
            bnd[K] = M + 1
            np.clip(bnd, 0, M + 1, out=bnd)
            pa = cumA[bnd[1:]] - cumA[bnd[:-1]]
            pb = cumB[bnd[1:]] - cumB[bnd[:-1]]
            mi = 2.0 * float(np.sum(
                _xlog2x(pa) + _xlog2x(pb) - _xlog2x(pa + pb) + (pa + pb)))
            if mi > best[0]:
                best = (mi, r, kappa)
    return best


def build_delta_grid(delta_star: float, n_points: int = 256,
                     lo: float = 1.0 / 16.0, hi: float = 4.0):
    """Geometric step-size grid around a saturation-derived reference."""
    if not (delta_star > 0.0):
        raise ValidationError("delta_star must be positive")
    return np.geomspace(delta_star * lo, delta_star * hi, n_points)


def design_uniform(p: JointPMF, w: int, *, wphi: int | None = None,
                   kappa_search: bool = False, rebuild=None,
                   delta_grid=None, delta: float | None = None):
    """MI-best uniform shift/offset quantizer for a symmetric PMF.

    Without ``rebuild`` the search runs on ``p`` itself over all shifts
    r < wphi (and offsets kappa < 2**r when ``kappa_search`` is set);
    ``delta`` merely labels the resulting spec.  With ``rebuild``, every
    step size in ``delta_grid`` is tried: ``rebuild(step)`` must return the
    integer-domain PMF obtained when the underlying translation tables are
    rebuilt at that step.  Ties prefer the smaller step, then the smaller
    shift, then the smaller offset (the iteration order guarantees this
    under strict improvement).

    Returns ``(QuantizerSpec, mutual_information_of_quantized_output)``.
    """
    if rebuild is None:
        if not p.symmetric:
            raise ValidationError("uniform design expects a symmetric PMF")
        if not p.llr_order:
            raise ValidationError("uniform design expects reliability-ordered magnitudes")

    def limit(da):
        if wphi is not None:
            return wphi
        return max(1, int(da.size - 1).bit_length() + 1)

    if rebuild is None:
        if delta is None:
            delta = _magnitude_unit(p)
        da, db = _dense_folded(p)
        mi, r, kappa = _uniform_sweep(da, db, w, limit(da), kappa_search)
        spec = QuantizerSpec("uniform", w, delta=delta,
                             shift_r=r, offset_kappa=kappa)
        return spec, mi

    if delta_grid is None:
        raise ValidationError("rebuild search needs a delta_grid")
    best = None
    for step in np.asarray(delta_grid, dtype=np.float64):
        q = rebuild(float(step))
        da, db = _dense_folded(q)
        mi, r, kappa = _uniform_sweep(da, db, w, limit(da), kappa_search)
        if best is None or mi > best[0]:
            best = (mi, float(step), r, kappa)
    mi, step, r, kappa = best
    spec = QuantizerSpec("uniform", w, delta=step, shift_r=r, offset_kappa=kappa)
    return spec, mi
