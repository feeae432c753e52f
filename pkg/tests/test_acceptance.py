"""Release gate: every headline claim of the toolkit at its stated tolerance.

Each test covers one numbered claim, is self-contained (designs what it
needs), asserts the published numbers and budgets, and prints a single
summary line.  Criteria 4 and 9 run bisections and Monte Carlo and take a
few minutes; everything else is seconds.
"""

import itertools
import time

import numpy as np

from quantldpc import (
    EnsembleConfig,
    QuantizerSpec,
    TranslationTable,
    cn_exact_llr,
    de_threshold,
    design_decoder,
    design_nonuniform,
    generate_regular_code,
)
from quantldpc.complexity import report
from quantldpc.decoder import cn_update_comp, cn_update_min, vn_update
from quantldpc.pmf import ChannelModel, JointPMF, apply_quantizer, awgn_llr_pmf
from quantldpc.sim import simulate_point, sweep, wilson_interval

# The dc=32 / dv=6 design point all first-iteration claims refer to.
POINT = dict(dc=32, dv=6, w=4, wphi=8, iterations=1,
             design_ebn0_db=3.3, rate=0.841)


def _first_iteration(cn, vn, **kw):
    cfg = EnsembleConfig(cn_variant=cn, vn_variant=vn, **{**POINT, **kw})
    artifact, _ = design_decoder(cfg)
    return artifact, artifact.per_iteration[0]


# ---------------------------------------------------------------------------
# 1: first-iteration check node mutual information per variant
# ---------------------------------------------------------------------------

def test_criterion_1_cn_design_mi():
    t0 = time.time()
    mi = {}
    for cn in ("comp", "comp_uni", "min"):
        mi[cn] = _first_iteration(cn, "comp")[1].mi_cn
    wall = time.time() - t0

    assert abs(mi["comp"] - 0.0443) <= 0.0015
    assert abs(mi["comp_uni"] - 0.0441) <= 0.0015
    assert abs(mi["min"] - 0.0407) <= 0.0015
    assert mi["comp"] >= mi["comp_uni"] >= mi["min"]
    assert wall < 60.0
    print(f"criterion 1 PASS: mi_cn comp={mi['comp']:.6f} "
          f"comp_uni={mi['comp_uni']:.6f} min={mi['min']:.6f} ({wall:.1f}s)")


# ---------------------------------------------------------------------------
# 2: first-iteration variable node MI downstream of the min check node
# ---------------------------------------------------------------------------

def test_criterion_2_vn_design_mi():
    mi_nonuni = _first_iteration("min", "comp")[1].mi_vn
    mi_uni = _first_iteration("min", "comp_uni")[1].mi_vn

    assert abs(mi_nonuni - 0.9056) <= 0.002
    assert abs(mi_uni - 0.9053) <= 0.002
    assert mi_nonuni - mi_uni <= 0.001
    print(f"criterion 2 PASS: mi_vn non-uniform={mi_nonuni:.6f} "
          f"uniform={mi_uni:.6f} gap={mi_nonuni - mi_uni:.6f}")


# ---------------------------------------------------------------------------
# 3: step sizes selected for the check node quantizers
# ---------------------------------------------------------------------------

def test_criterion_3_cn_step_sizes():
    searched = _first_iteration("comp", "comp", delta_search_points=64)[1]
    uniform = _first_iteration("comp_uni", "comp")[1]

    d_nonuni = searched.cn_tables.delta
    d_uni = uniform.cn_tables.delta
    assert abs(d_uni / 0.02277 - 1.0) <= 0.15
    assert abs(d_nonuni / 0.02814 - 1.0) <= 0.15
    print(f"criterion 3 PASS: uniform delta={d_uni:.6f} (ref 0.02277) "
          f"non-uniform delta={d_nonuni:.6f} (ref 0.02814)")


# ---------------------------------------------------------------------------
# 4: density evolution convergence thresholds of the three decoders
# ---------------------------------------------------------------------------

def test_criterion_4_de_thresholds():
    t0 = time.time()

    def threshold(cn, vn):
        cfg = EnsembleConfig(cn_variant=cn, vn_variant=vn,
                             **{**POINT, "iterations": 150})
        res = de_threshold(cfg, 0.9999, (3.0, 3.2))
        assert res.status == "ok"
        return res.snr_db

    t_comp = threshold("comp", "comp")
    t_uni = threshold("comp_uni", "comp_uni")
    t_min = threshold("min", "comp")
    wall = time.time() - t0

    assert abs(t_uni - t_comp) <= 0.02
    assert 0.005 <= t_min - t_comp <= 0.06
    assert wall < 600.0
    print(f"criterion 4 PASS: thresholds comp={t_comp:.4f} comp_uni={t_uni:.4f} "
          f"min={t_min:.4f} dB ({wall:.0f}s)")


# ---------------------------------------------------------------------------
# 5: the threshold designer equals exhaustive enumeration, ties included
# ---------------------------------------------------------------------------

def _random_symmetric_pmf(rng, half, zero_gap=False):
    """Symmetric message PMF, reliability non-decreasing in the magnitude.

    ``zero_gap`` zeroes two interior magnitudes; boundary placements across
    the gap then score bit-identically and only the tie-break decides.
    """
    raw = rng.random(half) + 1e-6
    frac = np.sort(rng.uniform(0.5, 1.0, size=half))
    a = raw * frac
    b = raw * (1.0 - frac)
    if zero_gap:
        g = int(rng.integers(2, half - 3))
        a[g:g + 2] = 0.0
        b[g:g + 2] = 0.0
    total = 2.0 * (a.sum() + b.sum())
    a, b = a / total, b / total
    row0 = np.concatenate([b[::-1], a])
    mass = np.vstack([row0, row0[::-1]])
    alphabet = np.concatenate([np.arange(-half, 0), np.arange(1, half + 1)])
    return JointPMF(alphabet, mass, llr_order=True, symmetric=True)


def _exhaustive_partitions(a, b, K):
    """(best MI, lexicographically first optimal boundary vector).

    Enumerates every contiguous K-partition of the folded axis and scores
    it from first principles, vectorized over partitions.
    """
    n = a.size
    combos = np.array(list(itertools.combinations(range(1, n), K - 1)),
                      dtype=np.int64)
    starts = np.hstack([np.zeros((combos.shape[0], 1), np.int64), combos])
    ends = np.hstack([combos, np.full((combos.shape[0], 1), n, np.int64)])
    csa = np.concatenate([[0.0], np.cumsum(a)])
    csb = np.concatenate([[0.0], np.cumsum(b)])
    pa = csa[ends] - csa[starts]
    pb = csb[ends] - csb[starts]
    s = pa + pb

    def xlog2x(v):
        out = np.zeros_like(v)
        np.log2(v, out=out, where=v > 0.0)
        return v * out

    mi = 2.0 * (xlog2x(pa) + xlog2x(pb) - xlog2x(s) + s).sum(axis=1)
    best = float(mi.max())
    # combinations() yields boundary vectors in lexicographic order already
    first = combos[mi >= best - 1e-13][0]
    return best, first


def test_criterion_5_designer_vs_enumeration():
    t0 = time.time()
    rng = np.random.default_rng(2024)
    cases = [(2, 75, False), (3, 75, False), (4, 36, False),
             (2, 5, True), (3, 5, True), (4, 4, True)]
    total = 0
    for w, count, zero_gap in cases:
        K = 1 << (w - 1)
        for _ in range(count):
            hi = 16 if w == 4 else 32
            half = int(rng.integers(max(K + 2, 8), hi + 1))
            p = _random_symmetric_pmf(rng, half, zero_gap=zero_gap)
            spec, mi_dp = design_nonuniform(p, w, prune_tol=0.0)
            mags, a, b = p.fold_positive()
            mi_ref, bounds_ref = _exhaustive_partitions(a, b, K)
            assert abs(mi_dp - mi_ref) <= 1e-12
            assert spec.thresholds == tuple(int(mags[e]) for e in bounds_ref)
            total += 1
    wall = time.time() - t0
    assert total == 200
    assert wall < 60.0
    print(f"criterion 5 PASS: designer matched enumeration on {total} PMFs "
          f"({wall:.1f}s)")


# ---------------------------------------------------------------------------
# 6: translated-sum quantization agrees with exact-LLR quantization
# ---------------------------------------------------------------------------

def test_criterion_6_exact_llr_equivalence():
    artifact, it0 = _first_iteration("comp", "comp")
    tab = np.asarray(it0.cn_tables.values, dtype=np.int64)
    delta = it0.cn_tables.delta
    thr = np.asarray(it0.cn_quantizer.thresholds, dtype=np.int64)

    # exact conditional LLR of every incoming cell, from the design PMF
    ch = apply_quantizer(
        awgn_llr_pmf(ChannelModel(POINT["design_ebn0_db"], POINT["rate"])),
        artifact.channel_quantizer)
    _, a, b = ch.fold_positive()
    llr_mag = np.abs(np.log(np.asarray(a) / np.asarray(b)))
    phi_true = -np.log(np.tanh(llr_mag / 2.0))

    # thresholds carried to the LLR axis; the sum-to-LLR map is strictly
    # decreasing, so cell k of the sum is cell k of the LLR magnitude read
    # against the remapped boundaries in reverse order
    llr_bounds = 2.0 * np.arctanh(np.exp(-thr.astype(float) * delta))

    rng = np.random.default_rng(321)
    n_cases, n_in = 10**6, POINT["dc"] - 1
    agree = 0
    first_cells = first_signs = None
    for start in range(0, n_cases, 100_000):
        n = min(100_000, n_cases - start)
        cells = rng.integers(0, tab.size, size=(n, n_in))
        signs = rng.choice(np.array([-1, 1], np.int64), size=(n, n_in))
        if start == 0:
            first_cells, first_signs = cells[:2000], signs[:2000]
        sign_out = np.where(signs.prod(axis=1) < 0, -1, 1)

        s_int = tab[cells].sum(axis=1)
        mag_int = 1 + np.searchsorted(thr, s_int, side="right")

        llr = 2.0 * np.arctanh(np.exp(-phi_true[cells].sum(axis=1)))
        mag_llr = 1 + np.sum(llr_bounds[None, :] >= llr[:, None], axis=1)

        agree += int(np.sum(sign_out * mag_int == sign_out * mag_llr))
    fraction = agree / n_cases
    assert fraction >= 0.999

    # anchor both vectorized paths to the actual node update and the oracle
    for cells, signs in zip(first_cells, first_signs):
        msgs = (signs * (cells + 1)).tolist()
        via_node = cn_update_comp([1] + msgs, it0.cn_tables, it0.cn_quantizer)[0]
        s = int(tab[cells].sum())
        assert via_node == (1 if signs.prod() > 0 else -1) * (
            1 + int(np.searchsorted(thr, s, side="right")))
        exact = cn_exact_llr((signs * llr_mag[cells]).tolist())
        mag = 1 + int(np.sum(llr_bounds >= abs(exact)))
        sign = 1 if exact > 0 else -1
        assert sign * mag == (1 if signs.prod() > 0 else -1) * (
            1 + int(np.sum(llr_bounds >= 2.0 * np.arctanh(
                np.exp(-float(phi_true[cells].sum()))))))
    print(f"criterion 6 PASS: agreement {fraction:.6f} on {n_cases} cases")


# ---------------------------------------------------------------------------
# 7: complexity report against hand-evaluated formulas
# ---------------------------------------------------------------------------

# (dc, dv, w) -> {(node, variant): (operations, translations, memory_bits)},
# each entry worked out by hand from the closed-form cost model at wphi=8.
HAND_COSTS = {
    (32, 6, 4): {
        ("cn", "comp"): (158, 32, 152), ("cn", "comp_uni"): (62, 32, 64),
        ("cn", "min"): (35, 0, 0), ("cn", "omsq"): (37, 0, 0),
        ("vn", "comp"): (29, 7, 200), ("vn", "comp_uni"): (11, 7, 112),
        ("vn", "omsq"): (11, 0, 0),
    },
    (32, 6, 3): {
        ("cn", "comp"): (126, 32, 76), ("cn", "comp_uni"): (62, 32, 32),
        ("cn", "min"): (35, 0, 0), ("cn", "omsq"): (37, 0, 0),
        ("vn", "comp"): (23, 7, 100), ("vn", "comp_uni"): (11, 7, 56),
        ("vn", "omsq"): (11, 0, 0),
    },
    (6, 3, 4): {
        ("cn", "comp"): (28, 6, 136), ("cn", "comp_uni"): (10, 6, 64),
        ("cn", "min"): (7, 0, 0), ("cn", "omsq"): (9, 0, 0),
        ("vn", "comp"): (14, 4, 192), ("vn", "comp_uni"): (5, 4, 112),
        ("vn", "omsq"): (5, 0, 0),
    },
    (6, 3, 3): {
        ("cn", "comp"): (22, 6, 68), ("cn", "comp_uni"): (10, 6, 32),
        ("cn", "min"): (7, 0, 0), ("cn", "omsq"): (9, 0, 0),
        ("vn", "comp"): (11, 4, 96), ("vn", "comp_uni"): (5, 4, 56),
        ("vn", "omsq"): (5, 0, 0),
    },
}


def test_criterion_7_complexity_report():
    for (dc, dv, w), expect in HAND_COSTS.items():
        rows = report(dc, dv, w, 8)
        got = {(r.node, r.variant): (r.operations, r.translations, r.memory_bits)
               for r in rows}
        assert got == expect, (dc, dv, w)
    print("criterion 7 PASS: cost report matches hand values for "
          "(32,6,4) (32,6,3) (6,3,4) (6,3,3)")


# ---------------------------------------------------------------------------
# 8: noiseless frames decode clean; node updates obey their invariants
# ---------------------------------------------------------------------------

def _signed_alphabet(w):
    half = 1 << (w - 1)
    return [s * m for m in range(1, half + 1) for s in (1, -1)]


def test_criterion_8_noiseless_and_invariants():
    code = generate_regular_code(1024, 3, 6, seed=1)
    cfg = EnsembleConfig(dc=6, dv=3, w=4, wphi=8, iterations=10,
                         cn_variant="comp", vn_variant="comp",
                         design_ebn0_db=3.0, rate=0.5)
    artifact, _ = design_decoder(cfg)
    point = simulate_point(code, artifact, 3.0, noiseless=True, max_iter=10,
                           stop={"max_frames": 1000,
                                 "target_frame_errors": 10**9})
    assert point.frames == 1000
    assert point.frame_errors == 0 and point.bit_errors == 0

    # exhaustive per-edge exclusion and sign symmetry at w=2 and w=3
    setups = [
        (2, TranslationTable((9, 3), 5, 0.3), QuantizerSpec("non_uniform", 2, thresholds=(4,))),
        (3, TranslationTable((13, 6, 2, 0), 6, 0.3), QuantizerSpec("non_uniform", 3, thresholds=(3, 8, 14))),
    ]
    checked = 0
    for w, tab, spec in setups:
        alpha = _signed_alphabet(w)
        thr = spec.thresholds
        for dc in (3, 4) if w == 2 else (3,):
            flip = (-1) ** (dc - 1)
            for msgs in itertools.product(alpha, repeat=dc):
                out = cn_update_comp(list(msgs), tab, spec)
                out_min = cn_update_min(list(msgs))
                for j in range(dc):
                    rest = msgs[:j] + msgs[j + 1:]
                    sign = 1 if sum(1 for m in rest if m < 0) % 2 == 0 else -1
                    y = sum(tab.values[abs(m) - 1] for m in rest)
                    assert out[j] == sign * (1 + sum(1 for t in thr if t <= y))
                    assert out_min[j] == sign * min(abs(m) for m in rest)
                neg = cn_update_comp([-m for m in msgs], tab, spec)
                assert neg == [flip * m for m in out]
                neg_min = cn_update_min([-m for m in msgs])
                assert neg_min == [flip * m for m in out_min]
                checked += 1

    vn_setups = [
        (2, {"phi_ch": TranslationTable((7, 2), 5, 0.2),
             "phi_c": TranslationTable((5, 1), 5, 0.2)},
         QuantizerSpec("non_uniform", 2, thresholds=(3,))),
        (3, {"phi_ch": TranslationTable((14, 9, 5, 2), 6, 0.2),
             "phi_c": TranslationTable((11, 7, 3, 1), 6, 0.2)},
         QuantizerSpec("non_uniform", 3, thresholds=(4, 10, 19))),
    ]
    for w, tabs, spec in vn_setups:
        alpha = _signed_alphabet(w)
        thr = spec.thresholds
        sgn = lambda t: 1 if t > 0 else -1
        for dv in (2,) if w == 3 else (2, 3):
            for ch in alpha:
                for msgs in itertools.product(alpha, repeat=dv):
                    for vt in (0, 1):
                        out, app = vn_update(ch, list(msgs), tabs, spec, vt)
                        for j in range(dv):
                            rest = msgs[:j] + msgs[j + 1:]
                            ext = (sgn(ch) * tabs["phi_ch"].values[abs(ch) - 1]
                                   + sum(sgn(m) * tabs["phi_c"].values[abs(m) - 1]
                                         for m in rest))
                            if ext == 0:
                                sign = -1 if vt else 1
                            else:
                                sign = sgn(ext)
                            mag = 1 + sum(1 for t in thr if t <= abs(ext))
                            assert out[j] == sign * mag
                        nout, napp = vn_update(-ch, [-m for m in msgs], tabs,
                                               spec, 1 - vt)
                        assert napp == -app
                        assert nout == [-m for m in out]
                        checked += 1
    print(f"criterion 8 PASS: 1000 noiseless frames clean, "
          f"{checked} exhaustive node cases")


# ---------------------------------------------------------------------------
# 9: Monte Carlo agreement of comp and comp_uni decoders on a real code
# ---------------------------------------------------------------------------

def test_criterion_9_fer_agreement():
    t0 = time.time()
    code = generate_regular_code(1024, 3, 6, seed=1)
    artifacts = {}
    for variant in ("comp", "comp_uni"):
        cfg = EnsembleConfig(dc=6, dv=3, w=4, wphi=8, iterations=10,
                             cn_variant=variant, vn_variant=variant,
                             design_ebn0_db=3.0, rate=0.5)
        artifacts[variant], _ = design_decoder(cfg)

    # paired noise: same master seed and point index for both decoders
    intervals = {}
    fers = {}
    for variant, artifact in artifacts.items():
        p = simulate_point(code, artifact, 3.0, seed=11, max_iter=10,
                           stop={"max_frames": 10_000,
                                 "target_frame_errors": 10**9})
        fers[variant] = p.fer
        intervals[variant] = wilson_interval(p.frame_errors, p.frames)
    lo = max(intervals["comp"][0], intervals["comp_uni"][0])
    hi = min(intervals["comp"][1], intervals["comp_uni"][1])
    assert lo <= hi, (intervals, "Wilson intervals do not overlap")

    for variant, artifact in artifacts.items():
        points = sweep(code, artifact, [2.4, 2.6, 2.8, 3.0, 3.2], seed=11,
                       max_iter=10, stop={"max_frames": 2000,
                                          "target_frame_errors": 10**9})
        fer = [p.fer for p in points]
        assert all(a >= b for a, b in zip(fer, fer[1:])), (variant, fer)
    wall = time.time() - t0
    assert wall < 900.0
    print(f"criterion 9 PASS: fer comp={fers['comp']:.4f} "
          f"comp_uni={fers['comp_uni']:.4f}, intervals overlap, "
          f"sweeps monotone ({wall:.0f}s)")
