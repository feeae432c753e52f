#!/usr/bin/env python3
"""First-iteration design survey at one operating point.

Designs the check node quantizer for each variant and the variable node
for both quantizer styles downstream of the min check node, then prints
the achieved mutual information, selected step sizes, and thresholds.
"""

import argparse

from quantldpc import EnsembleConfig, design_decoder


def first_iteration(args, cn, vn, search=0):
    cfg = EnsembleConfig(
        dc=args.dc, dv=args.dv, w=args.w, wphi=args.wphi, iterations=1,
        cn_variant=cn, vn_variant=vn,
        design_ebn0_db=args.ebn0, rate=args.rate,
        delta_search_points=search,
    )
    artifact, _ = design_decoder(cfg)
    return artifact.per_iteration[0]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--dc", type=int, default=32)
    ap.add_argument("--dv", type=int, default=6)
    ap.add_argument("--w", type=int, default=4)
    ap.add_argument("--wphi", type=int, default=8)
    ap.add_argument("--ebn0", type=float, default=3.3)
    ap.add_argument("--rate", type=float, default=0.841)
    ap.add_argument("--delta-search", type=int, default=64,
                    help="step-size grid points for the searched design")
    args = ap.parse_args()

    print(f"# dc={args.dc} dv={args.dv} w={args.w} wphi={args.wphi} "
          f"Eb/N0={args.ebn0} dB rate={args.rate}")
    print("\n## check node, first iteration")
    for cn in ("comp", "comp_uni", "min"):
        it = first_iteration(args, cn, "comp")
        line = f"{cn:9s} mi_cn={it.mi_cn:.6f}"
        if it.cn_tables is not None:
            line += f"  delta={it.cn_tables.delta:.6f}"
        q = it.cn_quantizer
        if q is not None and q.kind == "non_uniform":
            line += f"  thresholds={q.thresholds}"
        elif q is not None:
            line += f"  shift={q.shift_r} offset={q.offset_kappa}"
        print(line)

    it = first_iteration(args, "comp", "comp", search=args.delta_search)
    print(f"comp with step search ({args.delta_search} points): "
          f"mi_cn={it.mi_cn:.6f} delta={it.cn_tables.delta:.6f}")

    print("\n## variable node, first iteration (min check node upstream)")
    for vn in ("comp", "comp_uni"):
        it = first_iteration(args, "min", vn)
        print(f"{vn:9s} mi_vn={it.mi_vn:.6f}")


if __name__ == "__main__":
    main()
