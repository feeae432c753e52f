"""Bit-faithful execution of designed decoders on actual frames.

Messages are signed integers in sign-magnitude semantics with no zero; a
check or variable node works by translating message magnitudes through the
iteration's integer tables, combining in a wide adder, and re-quantizing to
w bits.  Scalar node updates (cn_update_comp, cn_update_min, vn_update)
define the semantics one node at a time; DecoderState/decode run the same
arithmetic vectorized over all edges and a batch of frames under a flooding
schedule.  cn_exact_llr is the high-precision reference used only by tests.
"""

from __future__ import annotations

import math
from bisect import bisect_right

import numpy as np

from .pmf import ValidationError
from .quantizers import QuantizerSpec

__all__ = [
    "cn_update_comp",
    "cn_update_min",
    "vn_update",
    "cn_exact_llr",
    "DecoderState",
    "decode",
    "decode_batch",
    "omsq_decode",
    "omsq_decode_batch",
]


# ---------------------------------------------------------------------------
# scalar node updates
# ---------------------------------------------------------------------------

def _check_messages(inputs, w):
    limit = 1 << (w - 1)
    for t in inputs:
        if t == 0 or abs(t) > limit:
            raise ValidationError(f"invalid {w}-bit message {t}")


def _quantize_cell(mag, quantizer: QuantizerSpec):
    """Magnitude cell index 1..2^(w-1) of a nonnegative integer."""
    if quantizer.kind == "non_uniform":
        return 1 + bisect_right(quantizer.thresholds, mag)
    cell = (mag + quantizer.offset_kappa) >> quantizer.shift_r
    return 1 + min(cell, quantizer.n_cells - 1)


def cn_update_comp(inputs, table, quantizer: QuantizerSpec):
    """Check node in the translated sum domain, one node.

    Output j carries the sign product and quantized translation sum of all
    inputs but j; both are formed once over the full set and each member is
    removed, which is exactly equivalent to per-output exclusion.
    """
    _check_messages(inputs, quantizer.out_width_w)
    vals = table.values
    trans = [vals[abs(t) - 1] for t in inputs]
    total = sum(trans)
    neg = sum(1 for t in inputs if t < 0)
    out = []
    for t, tr in zip(inputs, trans):
        y = total - tr
        parity = neg - (1 if t < 0 else 0)
        sign = -1 if parity % 2 else 1
        out.append(sign * _quantize_cell(y, quantizer))
    return out

def cn_update_min(inputs):
    """Min-approximation check node: sign product, extrinsic minimum.

    Uses the usual first/second minimum search so each output costs O(1)
    after one pass.
    """
    mags = [abs(t) for t in inputs]
    m1 = min(mags)
    i1 = mags.index(m1)
    m2 = min(mags[:i1] + mags[i1 + 1:])
    neg = sum(1 for t in inputs if t < 0)
    out = []
    for i, t in enumerate(inputs):
        parity = neg - (1 if t < 0 else 0)
        sign = -1 if parity % 2 else 1
        mag = m2 if i == i1 else m1
        out.append(sign * mag)
    return out


def vn_update(ch, inputs, tables, quantizer: QuantizerSpec, vn_type: int):
    """Variable node update, one node.

    Returns (per-edge outputs, app_sum).  All addends are the signed
    translations of the channel and check messages; each output excludes
    its own edge from the full sum.  A zero extrinsic sum quantizes to the
    weakest magnitude with sign +1 for the non-inverting node type and -1
    for the inverting one (the two's-complement negate-and-reinvert
    variants differ only there).  app_sum keeps the channel term and feeds
    the hard decision.
    """
    vals_ch = tables["phi_ch"].values
    vals_c = tables["phi_c"].values
    _check_messages([ch], quantizer.out_width_w)
    _check_messages(inputs, quantizer.out_width_w)
    sgn = lambda t: 1 if t > 0 else -1
    trans = [sgn(t) * vals_c[abs(t) - 1] for t in inputs]
    app_sum = sgn(ch) * vals_ch[abs(ch) - 1] + sum(trans)
    out = []
    for tr in trans:
        ext = app_sum - tr
        if ext > 0:
            sign = 1
        elif ext < 0:
            sign = -1
        else:
            sign = -1 if vn_type else 1
        out.append(sign * _quantize_cell(abs(ext), quantizer))
    return out, app_sum


def cn_exact_llr(llrs):
    """2 atanh(prod tanh(L/2)) in the log domain; test oracle only.

    Inputs are clipped to |L| <= 40 first, which keeps log1p/expm1 exact
    enough while bounding the output.
    """
    sign = 1.0
    acc = 0.0
    for L in llrs:
        L = min(max(float(L), -40.0), 40.0)
        if L == 0.0:
            return 0.0
        if L < 0:
            sign = -sign
            L = -L
        # log tanh(L/2) = log1p(-e^-L) - log1p(e^-L)
        e = math.exp(-L)
        acc += math.log1p(-e) - math.log1p(e)
    # 2 atanh(e^acc) = log((1+e^acc)/(1-e^acc))
    e = math.exp(acc)
    if e >= 1.0:
        return sign * 80.0
    return sign * (math.log1p(e) - math.log1p(-e))


# ---------------------------------------------------------------------------
# batched decoder
# ---------------------------------------------------------------------------

class DecoderState:
    """Immutable edge layout and per-iteration tables for one decoder.

    Precomputes the CSR-style edge orderings of the parity-check matrix
    and converts every iteration's tables into flat integer arrays, so
    repeated decode calls only pay for the message arithmetic.  vn_type
    alternates with node index; ``vn_phase=1`` swaps the two roles.
    """

    def __init__(self, code, artifact, *, vn_phase=0):
        if not artifact.per_iteration and artifact.config.iterations > 0:
            raise ValidationError("artifact carries no designed iterations")
        self.code = code
        self.artifact = artifact
        self.w = artifact.config.w
        self.cn_variant = artifact.config.cn_variant
        if self.cn_variant == "omsq":
            raise ValidationError("the omsq baseline runs through omsq_decode")

        # edges in check-major order
        self.edge_var = np.concatenate([np.asarray(r, dtype=np.int64)
                                        for r in code.row_adjacency])
        deg_c = np.array([len(r) for r in code.row_adjacency], dtype=np.int64)
        if np.any(deg_c < 2):
            raise ValidationError("every check node needs degree at least 2")
        self.cn_ptr = np.concatenate([[0], np.cumsum(deg_c)])[:-1]
        self.cn_rep = np.repeat(np.arange(code.n_checks), deg_c)
        # permutation into variable-major order
        self.vn_perm = np.argsort(self.edge_var, kind="stable")
        self.vn_inv = np.argsort(self.vn_perm, kind="stable")
        deg_v = np.bincount(self.edge_var, minlength=code.n_vars)
        if np.any(deg_v == 0):
            raise ValidationError("every variable node needs at least one edge")
        self.vn_ptr = np.concatenate([[0], np.cumsum(deg_v)])[:-1]
        self.vn_rep = np.repeat(np.arange(code.n_vars), deg_v)
        self.vn_type = ((np.arange(code.n_vars) + vn_phase) % 2).astype(np.int8)

        self._iters = []
        for rec in artifact.per_iteration:
            self._iters.append({
                "cn_vals": None if rec.cn_tables is None
                else np.asarray(rec.cn_tables.values, dtype=np.int64),
                "cn_spec": rec.cn_quantizer,
                "vn_ch": np.asarray(rec.vn_tables["phi_ch"].values, dtype=np.int64),
                "vn_c": np.asarray(rec.vn_tables["phi_c"].values, dtype=np.int64),
                "vn_spec": rec.vn_quantizer,
            })

    def tables_for(self, iteration):
        """Iteration's arrays; reuses the last designed record beyond it."""
        idx = min(iteration, len(self._iters) - 1)
        return self._iters[idx]


def _quantize_cells_array(mag, spec: QuantizerSpec):
    if spec.kind == "non_uniform":
        thr = np.asarray(spec.thresholds, dtype=np.int64)
        return 1 + np.searchsorted(thr, mag, side="right")
    cell = (mag + spec.offset_kappa) >> spec.shift_r
    return 1 + np.minimum(cell, spec.n_cells - 1)


def _syndrome_ok(bits, state):
    par = np.bitwise_xor.reduceat(bits[:, state.edge_var], state.cn_ptr, axis=1)
    return ~par.any(axis=1)


def decode_batch(channel_msgs, code, artifact, max_iter, *, state=None):
    """Flooding decode of a batch of frames.

    channel_msgs: (B, N) integer array of w-bit channel messages.  Returns
    (bits (B, N) uint8, iterations_used (B,), syndrome_ok (B,)).  Frames
    whose syndrome clears drop out of the working set immediately;
    iterations_used counts the message-passing iterations actually run for
    each frame.  max_iter=0 slices the channel signs only.
    """
    if state is None:
        state = DecoderState(code, artifact)
    ch = np.asarray(channel_msgs, dtype=np.int64)
    if ch.ndim != 2 or ch.shape[1] != code.n_vars:
        raise ValidationError("channel message array must be (frames, n_vars)")
    if np.any(ch == 0) or np.any(np.abs(ch) > (1 << (state.w - 1))):
        raise ValidationError("channel messages must be nonzero w-bit values")

    B = ch.shape[0]
    bits = (ch < 0).astype(np.uint8)
    iters_used = np.zeros(B, dtype=np.int64)
    ok = _syndrome_ok(bits, state)
    if max_iter == 0:
        return bits, iters_used, ok

    active = np.flatnonzero(~ok)
    ch_act = ch[active]
    v2c = ch_act[:, state.edge_var]            # iteration 1: channel forwarded
    for it in range(max_iter):
        tabs = state.tables_for(it)
        # --- check nodes ---------------------------------------------------
        neg = (v2c < 0).astype(np.int64)
        par_tot = np.add.reduceat(neg, state.cn_ptr, axis=1)[:, state.cn_rep]
        sign = 1 - 2 * ((par_tot - neg) & 1)
        if state.cn_variant == "min":
            mag = np.abs(v2c)
            m1e = np.minimum.reduceat(mag, state.cn_ptr, axis=1)[:, state.cn_rep]
            is_min = mag == m1e
            cnt = np.add.reduceat(is_min.astype(np.int64),
                                  state.cn_ptr, axis=1)[:, state.cn_rep]
            masked = np.where(is_min, np.iinfo(np.int64).max, mag)
            m2 = np.minimum.reduceat(masked, state.cn_ptr, axis=1)[:, state.cn_rep]
            # a unique minimum sees the runner-up; everything else sees the min
            c2v = sign * np.where(is_min & (cnt == 1), m2, m1e)
        else:
            phi = tabs["cn_vals"][np.abs(v2c) - 1]
            tot = np.add.reduceat(phi, state.cn_ptr, axis=1)[:, state.cn_rep]
            c2v = sign * _quantize_cells_array(tot - phi, tabs["cn_spec"])
        # --- variable nodes ------------------------------------------------
        sgn_c = np.where(c2v > 0, 1, -1)
        psi = (sgn_c * tabs["vn_c"][np.abs(c2v) - 1])[:, state.vn_perm]
        sgn_ch = np.where(ch_act > 0, 1, -1)
        psi_ch = sgn_ch * tabs["vn_ch"][np.abs(ch_act) - 1]
        app = np.add.reduceat(psi, state.vn_ptr, axis=1) + psi_ch
        ext = app[:, state.vn_rep] - psi
        sign_v = np.where(ext > 0, 1, np.where(ext < 0, -1, 0))
        tie = 1 - 2 * state.vn_type[state.vn_rep].astype(np.int64)
        sign_v = np.where(sign_v == 0, tie, sign_v)
        out = sign_v * _quantize_cells_array(np.abs(ext), tabs["vn_spec"])
        v2c = out[:, state.vn_inv]

        bits_act = (app < 0).astype(np.uint8)
        iters_used[active] = it + 1
        bits[active] = bits_act
        done = _syndrome_ok(bits_act, state)
        ok[active] |= done
        if done.all():
            break
        keep = ~done
        active = active[keep]
        ch_act = ch_act[keep]
        v2c = v2c[keep]
    return bits, iters_used, ok


def decode(channel_msgs, code, artifact, max_iter, *, state=None):
    """Single-frame wrapper around decode_batch."""
    msgs = np.asarray(channel_msgs, dtype=np.int64)
    if msgs.ndim != 1:
        raise ValidationError("decode expects one frame; use decode_batch")
    bits, iters, ok = decode_batch(msgs[None, :], code, artifact, max_iter,
                                   state=state)
    return bits[0], int(iters[0]), bool(ok[0])


# ---------------------------------------------------------------------------
# offset-min-sum baseline
# ---------------------------------------------------------------------------

class _OmsqState:
    def __init__(self, code):
        self.edge_var = np.concatenate([np.asarray(r, dtype=np.int64)
                                        for r in code.row_adjacency])
        deg_c = np.array([len(r) for r in code.row_adjacency], dtype=np.int64)
        if np.any(deg_c < 2):
            raise ValidationError("every check node needs degree at least 2")
        self.cn_ptr = np.concatenate([[0], np.cumsum(deg_c)])[:-1]
        self.cn_rep = np.repeat(np.arange(code.n_checks), deg_c)
        self.vn_perm = np.argsort(self.edge_var, kind="stable")
        self.vn_inv = np.argsort(self.vn_perm, kind="stable")
        deg_v = np.bincount(self.edge_var, minlength=code.n_vars)
        self.vn_ptr = np.concatenate([[0], np.cumsum(deg_v)])[:-1]
        self.vn_rep = np.repeat(np.arange(code.n_vars), deg_v)
        self.n_checks = code.n_checks
        self.n_vars = code.n_vars


def omsq_decode_batch(channel_msgs, code, w, beta, max_iter, *, state=None):
    """Offset-min-sum decode on uniform-LLR integer messages.

    Messages live on {-M..M} with M = 2^(w-1) - 1 and may be zero.  Check
    nodes take the sign product times max(extrinsic min - beta, 0);
    variable nodes form the saturating integer sum.
    """
    if state is None:
        state = _OmsqState(code)
    M = (1 << (w - 1)) - 1
    ch = np.asarray(channel_msgs, dtype=np.int64)
    if ch.ndim != 2 or ch.shape[1] != state.n_vars:
        raise ValidationError("channel message array must be (frames, n_vars)")
    if np.any(np.abs(ch) > M):
        raise ValidationError(f"channel messages exceed +/-{M}")

    B = ch.shape[0]
    bits = (ch < 0).astype(np.uint8)
    iters_used = np.zeros(B, dtype=np.int64)
    par = np.bitwise_xor.reduceat(bits[:, state.edge_var], state.cn_ptr, axis=1)
    ok = ~par.any(axis=1)
    if max_iter == 0:
        return bits, iters_used, ok

    active = np.flatnonzero(~ok)
    ch_act = ch[active]
    v2c = ch_act[:, state.edge_var]
    big = np.iinfo(np.int64).max
    for it in range(max_iter):
        neg = (v2c < 0).astype(np.int64)
        par_tot = np.add.reduceat(neg, state.cn_ptr, axis=1)[:, state.cn_rep]
        sign = 1 - 2 * ((par_tot - neg) & 1)
        mag = np.abs(v2c)
        m1 = np.minimum.reduceat(mag, state.cn_ptr, axis=1)[:, state.cn_rep]
        is_min = mag == m1
        cnt = np.add.reduceat(is_min.astype(np.int64),
                              state.cn_ptr, axis=1)[:, state.cn_rep]
        masked = np.where(is_min, big, mag)
        m2 = np.minimum.reduceat(masked, state.cn_ptr, axis=1)[:, state.cn_rep]
        ext = np.where(is_min & (cnt == 1), m2, m1)
        c2v = sign * np.maximum(ext - beta, 0)

        psi = c2v[:, state.vn_perm]
        app = np.add.reduceat(psi, state.vn_ptr, axis=1) + ch_act
        ext_v = app[:, state.vn_rep] - psi
        v2c = np.clip(ext_v, -M, M)[:, state.vn_inv]

        bits_act = (app < 0).astype(np.uint8)
        iters_used[active] = it + 1
        bits[active] = bits_act
        par = np.bitwise_xor.reduceat(bits_act[:, state.edge_var],
                                      state.cn_ptr, axis=1)
        done = ~par.any(axis=1)
        ok[active] |= done
        if done.all():
            break
        keep = ~done
        active = active[keep]
        ch_act = ch_act[keep]
        v2c = v2c[keep]
    return bits, iters_used, ok


def omsq_decode(channel_msgs, code, w, beta, max_iter, *, state=None):
    """Single-frame wrapper around omsq_decode_batch."""
    msgs = np.asarray(channel_msgs, dtype=np.int64)
    if msgs.ndim != 1:
        raise ValidationError("omsq_decode expects one frame")
    bits, iters, ok = omsq_decode_batch(msgs[None, :], code, w, beta, max_iter,
                                        state=state)
    return bits[0], int(iters[0]), bool(ok[0])
