#!/usr/bin/env python3
"""Generate a synthetic two-class patch corpus plus a demo image/mask pair.

Writes, under --out:
    subset<size>/            patch PGMs + manifest.json (blobs vs speckle)
    demo_image.pgm           composite image, left half infected texture
    demo_mask.pgm            matching ground-truth mask (255 = infected)

The manifests feed `ctpatch features` / `ctpatch run`; the image/mask pair
feeds `ctpatch patches` and `ctpatch classify`.
"""

import argparse
import os

from ctpatch.imaging import write_manifest, write_pgm
from ctpatch.synthetic import make_composite_image, make_texture_corpus


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--n-per-class", type=int, default=200)
    parser.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 48, 64])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    for size in args.sizes:
        patches, _ = make_texture_corpus(args.n_per_class, size, seed=args.seed + size)
        subset_dir = os.path.join(args.out, f"subset{size}")
        manifest = write_manifest(patches, subset_dir)
        print(f"subset{size}: {len(manifest.entries)} patches -> {subset_dir}")

    image, mask = make_composite_image(tiles_per_side=8, patch_size=32, seed=args.seed)
    write_pgm(os.path.join(args.out, "demo_image.pgm"), image.pixels)
    write_pgm(os.path.join(args.out, "demo_mask.pgm"), mask.labels * 255)
    print(f"demo image + mask -> {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
