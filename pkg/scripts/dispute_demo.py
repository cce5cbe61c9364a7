"""Walk through an ownership dispute on each corpus image.

Alice marks an image and publishes it. Bob takes the published copy, optionally
recompresses it, marks it with his own keyword and publishes that. The arbiter
sees only the two published images and the two keywords.

    python3 scripts/dispute_demo.py --recompress 75
"""

import argparse

from authmark import assets
from authmark.attacks import jpeg_attack
from authmark.protocol import embed_authorship, resolve_dispute, verify


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--recompress", type=int, help="JPEG QF Bob applies before re-marking")
    args = ap.parse_args()

    for name, img in sorted(assets.corpus().items()):
        a_pub = embed_authorship(img, "alice-keyword")
        stolen = a_pub if args.recompress is None else jpeg_attack(a_pub, args.recompress)
        b_pub = embed_authorship(stolen, "bob-keyword")
        ruling = resolve_dispute(a_pub, "alice-keyword", b_pub, "bob-keyword")
        swapped = resolve_dispute(b_pub, "bob-keyword", a_pub, "alice-keyword")
        print(f"== {name}")
        print(f"alice on her copy: sr={verify(a_pub, 'alice-keyword').sr:.4f}")
        print(f"bob on his copy:   sr={verify(b_pub, 'bob-keyword').sr:.4f}")
        print(ruling.to_text().rstrip())
        print(f"swapped argument order rules: {swapped.ruling}\n")


if __name__ == "__main__":
    main()
