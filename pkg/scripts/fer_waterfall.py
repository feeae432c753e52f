#!/usr/bin/env python3
"""Frame error rate waterfalls for the quantized decoders on one code.

Generates (or loads) a regular LDPC code, designs each requested decoder
at the given SNR, sweeps the channel, and writes one CSV per decoder.
All decoders see identical noise per frame, so points are paired.
"""

import argparse
import sys

from quantldpc import EnsembleConfig, design_decoder, generate_regular_code, parse_alist
from quantldpc.sim import sweep, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--code", help="alist file; omit to generate a code")
    ap.add_argument("--gen-n", type=int, default=1024)
    ap.add_argument("--gen-dv", type=int, default=3)
    ap.add_argument("--gen-dc", type=int, default=6)
    ap.add_argument("--gen-seed", type=int, default=1)
    ap.add_argument("--rate", type=float, default=0.5)
    ap.add_argument("--w", type=int, default=4)
    ap.add_argument("--wphi", type=int, default=8)
    ap.add_argument("--design-ebn0", type=float, default=3.0)
    ap.add_argument("--iterations", type=int, default=10)
    ap.add_argument("--snrs", type=float, nargs="+",
                    default=[2.4, 2.6, 2.8, 3.0, 3.2])
    ap.add_argument("--frames", type=int, default=10_000)
    ap.add_argument("--target-errors", type=int, default=200)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--variants", default="comp,comp_uni",
                    help="comma list of cn/vn pairings, e.g. comp,min/comp")
    ap.add_argument("--out-prefix", default="fer")
    args = ap.parse_args()

    if args.code:
        with open(args.code, encoding="ascii") as f:
            code = parse_alist(f.read())
    else:
        code = generate_regular_code(args.gen_n, args.gen_dv, args.gen_dc,
                                     seed=args.gen_seed)

    stop = {"max_frames": args.frames, "target_frame_errors": args.target_errors}
    for token in args.variants.split(","):
        cn, _, vn = token.partition("/")
        vn = vn or (cn if cn != "min" else "comp")
        cfg = EnsembleConfig(
            dc=args.gen_dc, dv=args.gen_dv, w=args.w, wphi=args.wphi,
            iterations=args.iterations, cn_variant=cn, vn_variant=vn,
            design_ebn0_db=args.design_ebn0, rate=args.rate,
        )
        artifact, _ = design_decoder(cfg)
        points = sweep(code, artifact, args.snrs, stop=stop, seed=args.seed,
                       max_iter=args.iterations)
        path = f"{args.out_prefix}_{cn}_{vn}.csv"
        with open(path, "w", encoding="ascii") as f:
            write_csv(points, f)
        fers = " ".join(f"{p.fer:.3g}" for p in points)
        print(f"{cn}/{vn}: fer {fers} -> {path}", file=sys.stderr)


if __name__ == "__main__":
    main()
