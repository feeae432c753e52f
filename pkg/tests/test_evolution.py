import itertools
import json
import math

import numpy as np
import pytest

from quantldpc.evolution import (
    DesignArtifact,
    EnsembleConfig,
    OmsqChannelQuantizer,
    cn_evolve_comp,
    cn_evolve_min,
    de_threshold,
    design_decoder,
    vn_evolve,
)
from quantldpc.pmf import JointPMF, ValidationError, mutual_information
from quantldpc.quantizers import TranslationTable


def message_pmf(seed=0, half=4):
    rng = np.random.default_rng(seed)
    raw = rng.random(half) + 0.05
    frac = np.sort(rng.uniform(0.55, 0.98, size=half))
    a = raw * frac / (2 * raw.sum())
    b = raw * (1 - frac) / (2 * raw.sum())
    row0 = np.concatenate([b[::-1], a])
    mass = np.vstack([row0, row0[::-1]])
    alphabet = np.concatenate([np.arange(-half, 0), np.arange(1, half + 1)])
    return JointPMF(alphabet, mass, llr_order=True, symmetric=True)


def brute_cn(p, dc, combine, mags_of):
    """Reference check node evolution by explicit tuple enumeration.

    ``combine`` folds a list of magnitudes into the output magnitude;
    ``mags_of`` maps the input symbol magnitude to its combining value.
    Returns a dict (x_out, out_symbol) -> probability.
    """
    half = p.alphabet[p.alphabet > 0]
    out = {}
    symbols = list(p.alphabet)
    idx = {s: i for i, s in enumerate(symbols)}
    for combo in itertools.product(symbols, repeat=dc - 1):
        for bits in itertools.product((0, 1), repeat=dc - 1):
            pr = 1.0
            for s, x in zip(combo, bits):
                pr *= p.mass[x, idx[s]]
            if pr == 0.0:
                continue
            x_out = 0
            for x in bits:
                x_out ^= x
            sign = 1
            for s in combo:
                sign *= 1 if s > 0 else -1
            mag = combine([mags_of(abs(s)) for s in combo])
            key = (x_out, sign, mag)
            out[key] = out.get(key, 0.0) + pr
    return out


def test_cn_comp_matches_enumeration_dc3():
    p = message_pmf(seed=1)
    tab = TranslationTable((9, 5, 2, 0), 6, 0.25)
    got = cn_evolve_comp(p, 3, tab)
    vals = tab.as_array()
    ref = brute_cn(p, 3, combine=sum, mags_of=lambda m: int(vals[m - 1]))
    for (x, sign, mag), pr in ref.items():
        sym = sign * (mag + 1)
        j = int(np.searchsorted(got.alphabet, sym))
        assert got.alphabet[j] == sym
        assert got.mass[x, j] == pytest.approx(pr, abs=1e-14)
    assert got.mass.sum() == pytest.approx(1.0, abs=1e-12)
    assert got.mag_offset == 1


def test_cn_comp_matches_enumeration_dc4():
    p = message_pmf(seed=2, half=3)
    tab = TranslationTable((7, 3, 1), 6, 0.5)
    got = cn_evolve_comp(p, 4, tab)
    vals = tab.as_array()
    ref = brute_cn(p, 4, combine=sum, mags_of=lambda m: int(vals[m - 1]))
    total = np.zeros_like(got.mass)
    for (x, sign, mag), pr in ref.items():
        sym = sign * (mag + 1)
        j = int(np.searchsorted(got.alphabet, sym))
        total[x, j] += pr
    assert np.allclose(got.mass, total, atol=1e-14)


def test_cn_min_matches_enumeration_dc3():
    p = message_pmf(seed=3)
    got = cn_evolve_min(p, 3)
    ref = brute_cn(p, 3, combine=min, mags_of=lambda m: m)
    total = np.zeros_like(got.mass)
    for (x, sign, mag), pr in ref.items():
        j = int(np.searchsorted(got.alphabet, sign * mag))
        total[x, j] += pr
    assert np.allclose(got.mass, total, atol=1e-14)


def test_cn_min_degree_two_is_identity():
    # with dc=2 each output repeats the single other incoming message
    p = message_pmf(seed=4)
    got = cn_evolve_min(p, 2)
    assert np.array_equal(got.alphabet, p.alphabet)
    assert np.allclose(got.mass, p.mass, atol=1e-14)


def test_cn_mi_degrades_with_degree():
    p = message_pmf(seed=5, half=6)
    tab = TranslationTable((20, 11, 6, 3, 1, 0), 8, 0.1)
    mis = [mutual_information(cn_evolve_comp(p, dc, tab)) for dc in (2, 3, 4, 5)]
    assert all(x > y - 1e-12 for x, y in zip(mis, mis[1:]))
    mis_min = [mutual_information(cn_evolve_min(p, dc)) for dc in (2, 3, 4, 5)]
    assert all(x > y - 1e-12 for x, y in zip(mis_min, mis_min[1:]))


def test_cn_min_never_below_comp_output_mi():
    # the min rule discards reliability mass; with a fine translation the
    # comp rule should carry at least as much information
    p = message_pmf(seed=6, half=4)
    tab = TranslationTable((60, 25, 9, 0), 8, 0.02)
    mi_comp = mutual_information(cn_evolve_comp(p, 8, tab))
    mi_min = mutual_information(cn_evolve_min(p, 8))
    assert mi_min <= mi_comp + 1e-9


def brute_vn(p_cn, p_ch, dv, tab_ch, tab_c):
    """Reference variable node sum distribution by enumeration (dense)."""
    vch = tab_ch.as_array()
    vc = tab_c.as_array()
    S = int(vch.max()) + (dv - 1) * int(vc.max())
    acc = {0: {}, 1: {}}
    ch_syms = list(p_ch.alphabet)
    cn_syms = list(p_cn.alphabet)
    for x in (0, 1):
        px = 0.5
        for combo in itertools.product(cn_syms, repeat=dv - 1):
            base = px
            for s in combo:
                j = int(np.searchsorted(p_cn.alphabet, s))
                base *= p_cn.mass[x, j] / px
            if base == 0.0:
                continue
            t_cn = sum(int(np.sign(s)) * int(vc[abs(s) - 1]) for s in combo)
            for s_ch in ch_syms:
                j = int(np.searchsorted(p_ch.alphabet, s_ch))
                pr = base * p_ch.mass[x, j] / px
                if pr == 0.0:
                    continue
                t = t_cn + int(np.sign(s_ch)) * int(vch[abs(s_ch) - 1])
                acc[x][t] = acc[x].get(t, 0.0) + pr
    alphabet = np.arange(-S, S + 1)
    mass = np.zeros((2, alphabet.size))
    for x in (0, 1):
        for t, pr in acc[x].items():
            mass[x, t + S] += pr
    return alphabet, mass


@pytest.mark.parametrize("dv", [2, 3])
def test_vn_matches_enumeration(dv):
    p_ch = message_pmf(seed=7)
    p_cn = message_pmf(seed=8)
    tab_ch = TranslationTable((11, 6, 3, 1), 6, 0.2)
    tab_c = TranslationTable((9, 4, 2, 0), 6, 0.2)
    got = vn_evolve(p_cn, p_ch, dv, {"phi_ch": tab_ch, "phi_c": tab_c})

    alphabet, mass = brute_vn(p_cn, p_ch, dv, tab_ch, tab_c)
    ref = JointPMF(alphabet, mass / mass.sum(), values=alphabet * 0.2)
    from quantldpc.pmf import symmetrize_vn_sum
    ref_sym = symmetrize_vn_sum(ref)

    # alphabets can differ in span when tails are empty; compare by symbol
    for sym, m0, m1 in zip(ref_sym.alphabet, ref_sym.mass[0], ref_sym.mass[1]):
        j = np.searchsorted(got.alphabet, sym)
        if j < got.n_symbols and got.alphabet[j] == sym:
            assert got.mass[0, j] == pytest.approx(m0, abs=1e-13)
            assert got.mass[1, j] == pytest.approx(m1, abs=1e-13)
        else:
            assert m0 == pytest.approx(0.0, abs=1e-15)


def test_vn_rejects_mismatched_tables():
    p = message_pmf(seed=9)
    t1 = TranslationTable((9, 5, 2, 0), 6, 0.25)
    t2 = TranslationTable((9, 5, 2, 0), 8, 0.25)
    with pytest.raises(ValidationError, match="width"):
        vn_evolve(p, p, 3, {"phi_ch": t1, "phi_c": t2})
    t3 = TranslationTable((9, 5, 2, 0), 6, 0.5)
    with pytest.raises(ValidationError, match="step"):
        vn_evolve(p, p, 3, {"phi_ch": t1, "phi_c": t3})


def base_cfg(**kw):
    args = dict(dc=4, dv=3, w=3, wphi=6, iterations=12, cn_variant="comp",
                vn_variant="comp", design_ebn0_db=3.0, rate=0.5)
    args.update(kw)
    return EnsembleConfig(**args)


def test_config_validation():
    with pytest.raises(ValidationError):
        base_cfg(cn_variant="sum_product")
    with pytest.raises(ValidationError):
        base_cfg(cn_variant="omsq", vn_variant="comp")
    with pytest.raises(ValidationError):
        base_cfg(vn_variant="omsq")
    with pytest.raises(ValidationError):
        base_cfg(w=9, wphi=8)
    with pytest.raises(ValidationError):
        base_cfg(dc=1)


@pytest.mark.parametrize("cn,vn", [("comp", "comp"), ("comp_uni", "comp_uni"),
                                   ("min", "comp"), ("omsq", "omsq")])
def test_design_converges_above_threshold(cn, vn):
    cfg = base_cfg(cn_variant=cn, vn_variant=vn, design_ebn0_db=4.0)
    artifact, traj = design_decoder(cfg)
    assert len(traj) <= cfg.iterations
    assert all(0.0 <= a <= 1.0 and 0.0 <= b <= 1.0 for a, b in traj)
    assert traj[-1][1] > 0.999  # early stop fired before the budget
    assert len(artifact.per_iteration) == len(traj)
    if cn == "omsq":
        assert isinstance(artifact.channel_quantizer, OmsqChannelQuantizer)
        assert artifact.channel_edges_llr is None
    else:
        assert len(artifact.channel_edges_llr) == 2 ** (cfg.w - 1) - 1


def test_design_trajectory_mostly_monotone():
    cfg = base_cfg(design_ebn0_db=2.2, iterations=30)
    _, traj = design_decoder(cfg)
    vn = [b for _, b in traj]
    # DE at a workable SNR should improve iteration over iteration
    assert vn[0] < vn[-1]
    drops = sum(1 for x, y in zip(vn, vn[1:]) if y < x - 1e-9)
    assert drops == 0


def test_artifact_roundtrip_is_bit_exact():
    cfg = base_cfg(iterations=3)
    artifact, _ = design_decoder(cfg)
    text = artifact.to_json()
    back = DesignArtifact.from_json(text)
    assert back.to_json() == text
    assert back.config == artifact.config
    assert np.array_equal(back.channel_pmf.mass, artifact.channel_pmf.mass)
    assert back.channel_edges_llr == artifact.channel_edges_llr
    for a, b in zip(artifact.per_iteration, back.per_iteration):
        assert a.mi_cn == b.mi_cn and a.mi_vn == b.mi_vn
        assert a.cn_quantizer == b.cn_quantizer
        assert a.cn_tables.values == b.cn_tables.values
        assert a.cn_tables.delta == b.cn_tables.delta
        assert a.vn_tables["phi_ch"].values == b.vn_tables["phi_ch"].values


def test_artifact_roundtrip_file(tmp_path):
    cfg = base_cfg(iterations=2, cn_variant="omsq", vn_variant="omsq")
    artifact, _ = design_decoder(cfg)
    path = tmp_path / "design.json"
    artifact.save(path)
    back = DesignArtifact.load(path)
    assert back.to_json() == artifact.to_json()
    assert isinstance(back.channel_quantizer, OmsqChannelQuantizer)
    assert back.channel_quantizer.step == artifact.channel_quantizer.step


def test_artifact_rejects_unknown_version(tmp_path):
    cfg = base_cfg(iterations=1)
    artifact, _ = design_decoder(cfg)
    tree = json.loads(artifact.to_json())
    tree["format_version"] = 99
    with pytest.raises(ValidationError, match="unsupported artifact format"):
        DesignArtifact.from_json(json.dumps(tree))


def test_omsq_channel_quantizer_mapping():
    q = OmsqChannelQuantizer(step=0.5, width_w=3)
    llr = np.array([0.0, 0.24, 0.26, 1.6, -1.6, 9.0, -9.0])
    got = q.map_llr(llr)
    # round-to-nearest multiples of 0.5 with clip at 3, zero maps to +0-ish
    assert list(got) == [0, 0, 1, 3, -3, 3, -3]


def test_de_threshold_statuses():
    cfg = base_cfg(iterations=25)
    easy = de_threshold(cfg, 0.9999, (8.0, 9.0), resolution_db=0.25)
    assert easy.status == "lo_boundary" and easy.snr_db == 8.0
    hopeless = de_threshold(cfg, 0.9999, (-3.0, -2.8), resolution_db=0.1)
    assert hopeless.status == "no_convergence" and hopeless.snr_db is None
    found = de_threshold(cfg, 0.9999, (-3.0, 6.0), resolution_db=0.25)
    assert found.status == "ok"
    assert -3.0 < found.snr_db < 6.0
    # the returned point converged, the point one resolution below did not
    conv = {s: ok for s, ok in found.probes}
    assert conv[found.snr_db]


def test_de_threshold_validation():
    cfg = base_cfg()
    with pytest.raises(ValidationError):
        de_threshold(cfg, 0.9999, (3.0, 3.0))
    with pytest.raises(ValidationError):
        de_threshold(cfg, 0.5, (1.0, 2.0))
