#!/usr/bin/env python3
"""Writes the 512x512 8-bit grayscale benchmark corpus as binary PGM (P5).

Sources are public-domain test images bundled with scikit-image and
PyWavelets, so no network download is needed beyond `pip install pywavelets`.
"""
import argparse
import pathlib

import numpy as np


def load_images():
    import pywt.data
    from skimage import color, data

    astronaut = np.round(color.rgb2gray(data.astronaut()) * 255.0)
    return {
        "camera": data.camera(),
        "ascent": pywt.data.ascent(),
        "astronaut": astronaut,
        "aero": pywt.data.aero(),
        "gravel": data.gravel(),
    }


def write_pgm(path, img):
    img = np.clip(np.asarray(img), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", nargs="?", default="data/corpus")
    args = parser.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, img in load_images().items():
        assert img.shape == (512, 512), name
        write_pgm(out / f"{name}.pgm", img)
        print(f"wrote {out / name}.pgm")


if __name__ == "__main__":
    main()
