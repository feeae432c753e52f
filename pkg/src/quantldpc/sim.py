"""Monte Carlo FER/BER measurement over BPSK-AWGN.

All-zero codeword transmission (valid for the symmetric decoders built
here), counter-based seeding so every frame's noise is reproducible in
isolation, chunked decoding with early stop on a frame-error target.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .decoder import DecoderState, _OmsqState, decode_batch, omsq_decode_batch
from .evolution import OmsqChannelQuantizer
from .pmf import ValidationError

CSV_HEADER = "ebn0_db,frames,bit_errors,frame_errors,ber,fer,avg_iterations,seed"

_CHUNK = 256


@dataclass
class SimPoint:
    """Tally of one simulated SNR point."""

    ebn0_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    iterations_histogram: dict
    seed: int
    wall_time: float
    n_vars: int

    @property
    def fer(self):
        return self.frame_errors / self.frames

    @property
    def ber(self):
        return self.bit_errors / (self.frames * self.n_vars)

    @property
    def avg_iterations(self):
        total = sum(k * v for k, v in self.iterations_histogram.items())
        return total / self.frames


def wilson_interval(errors, trials, z=1.96):
    """95% (default) Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValidationError("trials must be positive")
    p = errors / trials
    den = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / den
    half = z * np.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, center - half), min(1.0, center + half)


def _frame_noise(master_seed, point_index, frame_start, count, n, sigma):
    """AWGN for frames [frame_start, frame_start+count), one stream each.

    Philox keyed by (master seed, point index, frame index) makes any
    frame reproducible on its own, in any execution order.
    """
    out = np.empty((count, n))
    for i in range(count):
        key = (int(master_seed) << 64) | (int(point_index) << 40) | (frame_start + i)
        gen = np.random.Generator(np.random.Philox(key=key))
        out[i] = gen.normal(0.0, sigma, size=n)
    return out


def _quantize_channel(llr, artifact):
    """Real LLRs to integer channel messages per the designed quantizer."""
    q = artifact.channel_quantizer
    if isinstance(q, OmsqChannelQuantizer):
        return q.map_llr(llr)
    edges = np.asarray(artifact.channel_edges_llr)
    cells = 1 + np.searchsorted(edges, np.abs(llr), side="right")
    sign = np.where(llr < 0, -1, 1)    # LLR exactly 0: boundary, take +
    return sign * cells


def simulate_point(code, artifact, ebn0_db, stop=None, seed=0, *,
                   point_index=0, max_iter=None, noiseless=False) -> SimPoint:
    """Simulate one SNR point until a stop condition triggers.

    stop: dict with max_frames (default 1e7) and/or target_frame_errors
    (default 100); whichever hits first ends the run.  The noise variance
    follows the rate carried in the artifact's config, matching the
    design-side convention.
    """
    stop = dict(stop or {})
    max_frames = int(stop.pop("max_frames", 10_000_000))
    target_errors = int(stop.pop("target_frame_errors", 100))
    if stop:
        raise ValidationError(f"unknown stop keys {sorted(stop)}")
    if max_frames < 1:
        raise ValidationError("max_frames must be positive")

    cfg = artifact.config
    if max_iter is None:
        max_iter = cfg.iterations
    sigma = np.sqrt(1.0 / (2.0 * cfg.rate * 10.0 ** (ebn0_db / 10.0)))
    llr_scale = 2.0 / sigma ** 2
    n = code.n_vars
    omsq = cfg.cn_variant == "omsq"
    if omsq:
        state = _OmsqState(code)
    else:
        state = DecoderState(code, artifact)

    frames = 0
    bit_errors = 0
    frame_errors = 0
    hist = {}
    t0 = time.perf_counter()
    while frames < max_frames and frame_errors < target_errors:
        count = min(_CHUNK, max_frames - frames)
        if noiseless:
            y = np.ones((count, n))
        else:
            y = 1.0 + _frame_noise(seed, point_index, frames, count, n, sigma)
        llr = llr_scale * y
        msgs = _quantize_channel(llr, artifact)
        if omsq:
            bits, iters, ok = omsq_decode_batch(msgs, code, cfg.w, cfg.beta,
                                                max_iter, state=state)
        else:
            bits, iters, ok = decode_batch(msgs, code, artifact, max_iter,
                                           state=state)
        errs = bits.sum(axis=1)
        bit_errors += int(errs.sum())
        frame_errors += int((errs > 0).sum())
        for k, c in zip(*np.unique(iters, return_counts=True)):
            hist[int(k)] = hist.get(int(k), 0) + int(c)
        frames += count
    return SimPoint(float(ebn0_db), frames, bit_errors, frame_errors, hist,
                    int(seed), time.perf_counter() - t0, n)


def sweep(code, artifact, ebn0_list, stop=None, seed=0, **kw):
    """simulate_point over a list of SNRs with per-point derived streams."""
    return [simulate_point(code, artifact, s, stop=stop, seed=seed,
                           point_index=i, **kw)
            for i, s in enumerate(ebn0_list)]


def write_csv(points, fh):
    """One row per SimPoint under the fixed header."""
    fh.write(CSV_HEADER + "\n")
    for p in points:
        fh.write(f"{p.ebn0_db:.10g},{p.frames},{p.bit_errors},{p.frame_errors},"
                 f"{p.ber:.10g},{p.fer:.10g},{p.avg_iterations:.10g},{p.seed}\n")
