"""Regenerate the images shipped in src/authmark/data/.

cover.pgm     256x256 cameraman (scikit-image sample, CC0), area-downsampled
logo.pgm      32x32 binary mark: a ring around a letter "A", white on black
corpus/*.pgm  256x256 grayscale test images drawn from public-domain
              scikit-image samples

Requires scikit-image, which the package itself does not depend on.
"""

from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw
from skimage import data

from authmark.imaging import GrayImage, save_image

OUT = Path(__file__).resolve().parents[1] / "src" / "authmark" / "data"


def downsample(arr, size=256):
    return np.asarray(Image.fromarray(arr).resize((size, size), Image.Resampling.BOX))


def logo():
    im = Image.new("L", (32, 32), 0)
    d = ImageDraw.Draw(im)
    d.ellipse((1, 1, 30, 30), outline=255, width=2)
    d.line((9, 24, 16, 7), fill=255, width=2)
    d.line((16, 7, 23, 24), fill=255, width=2)
    d.line((12, 18, 20, 18), fill=255, width=2)
    return (np.asarray(im) >= 128).astype(np.uint8) * 255


def main():
    (OUT / "corpus").mkdir(parents=True, exist_ok=True)
    cover = downsample(data.camera())
    save_image(GrayImage(cover), OUT / "cover.pgm")
    mark = logo()
    save_image(GrayImage(mark), OUT / "logo.pgm")
    print(f"logo: {int((mark > 0).sum())} of 1024 bits set")

    corpus = {
        "camera": cover,
        "moon": downsample(data.moon()),
        "brick": downsample(data.brick()),
        "coins": data.coins()[20:276, 60:316],
    }
    for name, arr in corpus.items():
        save_image(GrayImage(np.ascontiguousarray(arr)), OUT / "corpus" / f"{name}.pgm")
        print(f"corpus/{name}.pgm {arr.shape}")


if __name__ == "__main__":
    main()
