import numpy as np
import pytest

from squarecut.errors import FormatError, InvalidGeometry
from squarecut.imaging import (
    BinaryMask,
    GrayImage,
    load_pgm,
    mask_from_image,
    sample_intensities,
    sample_intensity,
    save_pgm,
    synth_rectangle,
)


def test_load_pgm_direct_decode():
    data = b"P5\n2 2\n255\n" + bytes([0, 128, 255, 7])
    img = load_pgm(data)
    assert img.width == 2 and img.height == 2
    assert img.pixels.tolist() == [[0, 128], [255, 7]]


def test_pgm_round_trip_8bit():
    rng = np.random.default_rng(0)
    img = GrayImage(rng.integers(0, 256, size=(7, 5), dtype=np.uint16),
                    spacing=(0.625, 0.625), slice_thickness=0.625)
    again = load_pgm(save_pgm(img))
    assert np.array_equal(again.pixels, img.pixels)
    assert again.spacing == img.spacing
    assert again.slice_thickness == img.slice_thickness


def test_pgm_round_trip_16bit():
    rng = np.random.default_rng(1)
    img = GrayImage(rng.integers(0, 65536, size=(3, 4), dtype=np.uint16))
    again = load_pgm(save_pgm(img))
    assert np.array_equal(again.pixels, img.pixels)


def test_pgm_bad_magic():
    with pytest.raises(FormatError):
        load_pgm(b"P6\n2 2\n255\n" + bytes(12))


def test_pgm_truncated_payload():
    with pytest.raises(FormatError):
        load_pgm(b"P5\n4 4\n255\n" + bytes(3))


def test_pgm_bad_maxval():
    with pytest.raises(FormatError):
        load_pgm(b"P5\n1 1\n1000\n" + bytes(2))


def test_mask_round_trip():
    bits = np.zeros((4, 6), dtype=bool)
    bits[1:3, 2:5] = True
    mask = BinaryMask(bits, spacing=(2.0, 3.0), slice_thickness=1.5)
    img = load_pgm(save_pgm(mask))
    again = mask_from_image(img)
    assert np.array_equal(again.bits, bits)
    assert img.spacing == (2.0, 3.0)


def test_sample_nearest_exact_pixels():
    img = GrayImage(np.arange(12, dtype=np.uint16).reshape(3, 4))
    assert sample_intensity(img, (2, 1)) == 6.0


def test_sample_nearest_rounds_half_up():
    img = GrayImage(np.arange(35, dtype=np.uint16).reshape(5, 7))
    # (2.4, 3.6) -> pixel (2, 4)
    assert sample_intensity(img, (2.4, 3.6)) == float(4 * 7 + 2)
    assert sample_intensity(img, (2.5, 3.5)) == float(4 * 7 + 3)


def test_sample_out_of_bounds_replicates_border():
    img = GrayImage(np.array([[1, 2], [3, 4]], dtype=np.uint16))
    assert sample_intensity(img, (-5, -5)) == 1.0
    assert sample_intensity(img, (9, 9), "bilinear") == 4.0


def test_sample_bilinear_blends():
    img = GrayImage(np.array([[0, 10], [20, 30]], dtype=np.uint16))
    assert sample_intensity(img, (0.5, 0.0), "bilinear") == pytest.approx(5.0)
    assert sample_intensity(img, (0.5, 0.5), "bilinear") == pytest.approx(15.0)
    assert sample_intensity(img, (0.25, 0.75), "bilinear") == pytest.approx(
        0.75 * (0.75 * 20 + 0.25 * 30) + 0.25 * (0.75 * 0 + 0.25 * 10)
    )


def test_sample_intensities_shape():
    img = GrayImage(np.arange(12, dtype=np.uint16).reshape(3, 4))
    pts = np.zeros((2, 5, 2))
    assert sample_intensities(img, pts).shape == (2, 5)


def test_synth_mask_count():
    img, truth = synth_rectangle(100, 100, (30, 40, 40, 20), 200, 50)
    assert truth.count == 800
    assert int((img.pixels == 200).sum()) == 800


def test_synth_erasure_excluded_from_image_not_truth():
    img, truth = synth_rectangle(100, 100, (30, 40, 40, 20), 200, 50,
                                 erased_regions=[(62, 40, 8, 8)])
    assert img.pixels[43, 65] == 50
    assert truth.bits[43, 65]
    assert truth.count == 800


def test_synth_zero_sigma_is_noiseless():
    a, _ = synth_rectangle(50, 50, (10, 10, 20, 15), 200, 50, noise_sigma=0.0, rng_seed=7)
    b, _ = synth_rectangle(50, 50, (10, 10, 20, 15), 200, 50, noise_sigma=0.0, rng_seed=12345)
    assert np.array_equal(a.pixels, b.pixels)


def test_synth_noise_reproducible():
    a, _ = synth_rectangle(50, 50, (10, 10, 20, 15), 200, 50, noise_sigma=8.0, rng_seed=3)
    b, _ = synth_rectangle(50, 50, (10, 10, 20, 15), 200, 50, noise_sigma=8.0, rng_seed=3)
    c, _ = synth_rectangle(50, 50, (10, 10, 20, 15), 200, 50, noise_sigma=8.0, rng_seed=4)
    assert np.array_equal(a.pixels, b.pixels)
    assert not np.array_equal(a.pixels, c.pixels)


def test_synth_rect_outside_canvas():
    with pytest.raises(InvalidGeometry):
        synth_rectangle(50, 50, (40, 40, 20, 20), 200, 50)
    with pytest.raises(InvalidGeometry):
        synth_rectangle(50, 50, (10, 10, 20, 20), 99, 99)
