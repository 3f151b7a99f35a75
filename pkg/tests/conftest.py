"""Shared fixtures: a session-scoped synthetic benchmark and image corpora."""

from __future__ import annotations

import numpy as np
import pytest
from PIL import Image

from hmpf import generate_synthetic_benchmark
from hmpf.descriptors import GrayImage


@pytest.fixture(scope="session")
def benchmark(tmp_path_factory):
    """The documented seed-42 synthetic benchmark, generated once."""
    out_dir = tmp_path_factory.mktemp("bench")
    return generate_synthetic_benchmark(out_dir)


def textured_image(seed: int, size: int = 300) -> GrayImage:
    """Smooth random texture with plenty of corners, deterministic per seed."""
    rng = np.random.default_rng(seed)
    noise = rng.random((size, size))
    spectrum = np.fft.fft2(noise)
    freq = np.fft.fftfreq(size)
    mask = np.exp(-((np.hypot(freq[:, None], freq[None, :]) / 0.08) ** 2))
    img = np.real(np.fft.ifft2(spectrum * mask))
    img = (img - img.min()) / (img.max() - img.min())
    return GrayImage(img)


@pytest.fixture(scope="session")
def image_corpus(tmp_path_factory):
    """Eight small grayscale PNGs plus a manifest using directory discovery.

    The query images are pixel-shifted copies of the references, so every
    descriptor method should match query i to reference i.
    """
    root = tmp_path_factory.mktemp("images")
    (root / "ref").mkdir()
    (root / "qry").mkdir()
    n = 8
    for i in range(n):
        base = textured_image(100 + i, size=90).pixels
        shifted = np.roll(base, 2, axis=1)
        for sub, pixels in (("ref", base), ("qry", shifted)):
            arr = (pixels * 255).astype(np.uint8)
            Image.fromarray(arr, mode="L").save(root / sub / f"img_{i:03d}.png")
    manifest = root / "manifest.toml"
    manifest.write_text(
        'reference_dir = "ref"\n'
        'query_dir = "qry"\n'
        "\n"
        "[ground_truth]\n"
        'mode = "frame-offset"\n'
        "frame_tolerance = 0\n"
    )
    return manifest
