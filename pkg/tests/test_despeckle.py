import math

import numpy as np
import pytest

from posakit.despeckle import (
    FilterSpec,
    apply_filter,
    frost_filter,
    homomorphic_wrap,
    kuan_filter,
    lee_filter,
    median_filter,
    posashrink,
    universal_threshold,
    wavelet_threshold,
)
from posakit.image import Subbands, image_stats
from posakit.projection import span_cascade
from posakit.speckle import SpeckleModel, apply_speckle
from posakit.wavelet import DB1, DB4, dwt2, idwt2


def speckled_constant(seed, size=64, value=100.0, looks=4):
    return apply_speckle(
        np.full((size, size), value), SpeckleModel(kind="multilook", looks=looks, seed=seed)
    )


def test_filterspec_validation():
    with pytest.raises(ValueError):
        FilterSpec(kind="wiener")
    with pytest.raises(ValueError):
        FilterSpec(kind="median", kernel=4)
    with pytest.raises(ValueError):
        FilterSpec(kind="median", kernel=1)
    with pytest.raises(ValueError):
        FilterSpec(kind="lee", looks=0)
    with pytest.raises(ValueError):
        FilterSpec(kind="frost", damping=0.0)


def test_posashrink_constant_passthrough():
    const = np.full((32, 32), 100.0)
    out = posashrink(const, DB1)
    assert np.max(np.abs(out - const)) < 1e-10


def test_posashrink_is_cascade_composition():
    img = speckled_constant(0)
    bands = dwt2(img, DB1)
    lh, hl, hh = span_cascade([bands.ll, bands.lh, bands.hl, bands.hh])
    manual = idwt2(Subbands(ll=bands.ll, lh=lh, hl=hl, hh=hh), DB1)
    assert np.array_equal(posashrink(img, DB1), manual)


@pytest.mark.parametrize("basis", [DB1, DB4])
def test_posashrink_preserves_mean(basis):
    img = speckled_constant(1, size=128)
    out = posashrink(img, basis)
    assert abs(out.mean() - img.mean()) / img.mean() < 1e-6


def test_posashrink_reduces_nsd():
    img = speckled_constant(2, size=256)
    out = posashrink(img, DB1)
    assert math.sqrt(image_stats(out)[1]) < 0.8 * math.sqrt(image_stats(img)[1])


def test_posashrink_contracts_detail_energy():
    for seed in range(20):
        img = speckled_constant(seed, size=64)
        bands_in = dwt2(img, DB1)
        bands_out = dwt2(posashrink(img, DB1), DB1)
        energy_in = sum(float(np.sum(b * b)) for b in (bands_in.lh, bands_in.hl, bands_in.hh))
        energy_out = sum(float(np.sum(b * b)) for b in (bands_out.lh, bands_out.hl, bands_out.hh))
        assert energy_out <= energy_in * (1.0 + 1e-9)


def test_posashrink_rejects_odd_dims():
    with pytest.raises(ValueError):
        posashrink(np.zeros((15, 16)), DB1)


def test_median_constant_and_impulse():
    const = np.full((9, 9), 5.0)
    assert np.array_equal(median_filter(const, 3), const)
    impulse = np.zeros((9, 9))
    impulse[4, 4] = 255.0
    assert np.array_equal(median_filter(impulse, 3), np.zeros((9, 9)))


def test_median_matches_sort_oracle():
    rng = np.random.default_rng(31)
    img = rng.uniform(0.0, 255.0, size=(12, 14))
    for kernel in (3, 5):
        half = kernel // 2
        padded = np.pad(img, half, mode="edge")
        expected = np.empty_like(img)
        for i in range(img.shape[0]):
            for j in range(img.shape[1]):
                window = padded[i : i + kernel, j : j + kernel].ravel()
                expected[i, j] = np.sort(window)[kernel * kernel // 2]
        assert np.array_equal(median_filter(img, kernel), expected)


def test_median_rejects_even_kernel():
    with pytest.raises(ValueError):
        median_filter(np.zeros((8, 8)), 4)


def lee_oracle(img, kernel, looks):
    half = kernel // 2
    padded = np.pad(img, half, mode="edge")
    out = np.empty_like(img)
    cu2 = 1.0 / looks
    for i in range(img.shape[0]):
        for j in range(img.shape[1]):
            window = padded[i : i + kernel, j : j + kernel]
            mu = window.mean()
            var = ((window - mu) ** 2).mean()
            if mu == 0.0:
                out[i, j] = img[i, j]
            elif var == 0.0:
                out[i, j] = mu
            else:
                weight = min(max(1.0 - cu2 * mu * mu / var, 0.0), 1.0)
                out[i, j] = mu + weight * (img[i, j] - mu)
    return out


def test_lee_constant_passthrough():
    const = np.full((16, 16), 42.0)
    assert np.array_equal(lee_filter(const, 3, 1), const)


def test_lee_no_noise_limit():
    rng = np.random.default_rng(32)
    img = rng.uniform(10.0, 200.0, size=(16, 16))
    out = lee_filter(img, 3, looks=10**14)
    assert np.max(np.abs(out - img)) < 1e-9


def test_lee_matches_oracle():
    img = speckled_constant(3, size=20)
    for kernel in (3, 5):
        assert np.allclose(lee_filter(img, kernel, 4), lee_oracle(img, kernel, 4), atol=1e-10)


def test_lee_reduces_variance_on_speckled_constant():
    img = speckled_constant(4, size=128)
    out = lee_filter(img, 3, 4)
    assert image_stats(out)[1] < image_stats(img)[1]


def test_lee_zero_mean_window_passthrough():
    img = np.zeros((8, 8))
    img[0, 0] = -6.0
    img[0, 1] = 2.0
    img[0, 2] = 4.0
    # the window centered at (0,1) has zero mean (top edge replicates row 0)
    out = lee_filter(img, 3, 1)
    assert out[0, 1] == img[0, 1] == 2.0


def test_kuan_constant_passthrough():
    const = np.full((10, 10), 8.0)
    assert np.array_equal(kuan_filter(const, 3, 4), const)


def test_kuan_flat_region_smooths_to_local_mean():
    # gentle ramp: local variation well below the single-look noise level
    base = np.linspace(100.0, 101.0, 16)
    img = np.tile(base, (16, 1))
    out = kuan_filter(img, 3, looks=1)
    half = 1
    padded = np.pad(img, half, mode="edge")
    for i in range(16):
        for j in range(16):
            mu = padded[i : i + 3, j : j + 3].mean()
            assert out[i, j] == pytest.approx(mu, abs=1e-10)


def test_kuan_matches_oracle():
    img = speckled_constant(5, size=18)
    kernel, looks = 3, 4
    half = kernel // 2
    cu2 = 1.0 / looks
    padded = np.pad(img, half, mode="edge")
    expected = np.empty_like(img)
    for i in range(img.shape[0]):
        for j in range(img.shape[1]):
            window = padded[i : i + kernel, j : j + kernel]
            mu = window.mean()
            var = ((window - mu) ** 2).mean()
            if mu == 0.0:
                expected[i, j] = img[i, j]
            elif var == 0.0:
                expected[i, j] = mu
            else:
                weight = (1.0 - cu2 * mu * mu / var) / (1.0 + cu2)
                weight = min(max(weight, 0.0), 1.0)
                expected[i, j] = mu + weight * (img[i, j] - mu)
    assert np.allclose(kuan_filter(img, kernel, looks), expected, atol=1e-10)


def test_frost_constant_passthrough():
    const = np.full((12, 12), 3.0)
    assert np.allclose(frost_filter(const, 3, 1.0), const, atol=1e-12)


def test_frost_matches_double_loop_oracle():
    img = speckled_constant(6, size=14)
    kernel, damping = 3, 1.0
    half = kernel // 2
    padded = np.pad(img, half, mode="edge")
    expected = np.empty_like(img)
    for i in range(img.shape[0]):
        for j in range(img.shape[1]):
            window = padded[i : i + kernel, j : j + kernel]
            mu = window.mean()
            var = ((window - mu) ** 2).mean()
            if var == 0.0:
                ci2 = 0.0
            elif mu == 0.0:
                ci2 = math.inf
            else:
                ci2 = var / (mu * mu)
            num = den = 0.0
            for a in range(kernel):
                for b in range(kernel):
                    d = math.hypot(a - half, b - half)
                    weight = 1.0 if d == 0.0 else math.exp(-damping * ci2 * d)
                    num += weight * window[a, b]
                    den += weight
            expected[i, j] = num / den
    assert np.allclose(frost_filter(img, kernel, damping), expected, atol=1e-10)


def test_frost_damping_pulls_toward_center():
    img = speckled_constant(7, size=32)
    gentle = frost_filter(img, 5, 0.1)
    sharp = frost_filter(img, 5, 50.0)
    assert np.mean(np.abs(sharp - img)) < np.mean(np.abs(gentle - img))


def test_frost_rejects_bad_params():
    with pytest.raises(ValueError):
        frost_filter(np.zeros((8, 8)), 4, 1.0)
    with pytest.raises(ValueError):
        frost_filter(np.zeros((8, 8)), 3, -1.0)


def test_universal_threshold_formula():
    hh = np.array([[1.0, -2.0], [3.0, -4.0]])
    t = universal_threshold(hh, 12)
    assert t == pytest.approx((2.5 / 0.6745) * math.sqrt(2.0 * math.log(12.0)), rel=1e-12)


def test_wavelet_threshold_constant_passthrough():
    const = np.full((16, 16), 9.0)
    for rule in ("hard", "soft", "semisoft"):
        assert np.allclose(wavelet_threshold(const, rule, DB1), const, atol=1e-10)


def test_wavelet_threshold_full_shrink_equals_ll_only():
    # craft an image whose detail coefficients all sit at one magnitude m:
    # T = (m/0.6745)*sqrt(2 ln M) > m, so the soft rule kills every coefficient
    rng = np.random.default_rng(40)
    shape = (8, 8)
    ll = rng.uniform(50.0, 60.0, size=shape)
    signs = rng.choice([-1.0, 1.0], size=shape)
    m = 0.5
    bands = Subbands(ll=ll, lh=m * signs, hl=-m * signs, hh=m * signs[::-1])
    img = idwt2(bands, DB1)
    out = wavelet_threshold(img, "soft", DB1)
    ll_round = dwt2(img, DB1).ll
    expected = idwt2(
        Subbands(ll=ll_round, lh=np.zeros(shape), hl=np.zeros(shape), hh=np.zeros(shape)), DB1
    )
    assert np.allclose(out, expected, atol=1e-10)


def test_threshold_rules_coefficientwise():
    # A speckled constant is useless here: every coefficient dies below T and
    # the three rules coincide.  Synthesize subbands instead, pinning
    # median|HH| = 0.6745 so sigma-hat = 1 and T is known up front, then spread
    # magnitudes across the kill, ramp, and keep regimes.
    rng = np.random.default_rng(3)
    n = 8
    t = math.sqrt(2.0 * math.log(3 * n * n))
    hh_mags = np.concatenate([np.full(33, 0.6745), np.linspace(1.2, 3.8, 31) * t])
    rng.shuffle(hh_mags)
    hh = rng.choice([-1.0, 1.0], size=(n, n)) * hh_mags.reshape(n, n)
    lh = rng.choice([-1.0, 1.0], size=(n, n)) * np.linspace(0.1, 4.0, n * n).reshape(n, n) * t
    hl = rng.choice([-1.0, 1.0], size=(n, n)) * np.linspace(0.15, 3.7, n * n).reshape(n, n) * t
    img = idwt2(Subbands(ll=np.full((n, n), 40.0), lh=lh, hl=hl, hh=hh), DB1)

    bands = dwt2(img, DB1)
    t_hat = universal_threshold(bands.hh, 3 * bands.hh.size)
    assert abs(t_hat - t) < 1e-9
    mags = np.abs(np.concatenate([bands.lh.ravel(), bands.hl.ravel(), bands.hh.ravel()]))
    assert np.sum(mags <= t_hat) > 0
    assert np.sum((mags > t_hat) & (mags <= 2.0 * t_hat)) > 0
    assert np.sum(mags > 2.0 * t_hat) > 0

    outputs = {rule: wavelet_threshold(img, rule, DB1) for rule in ("hard", "soft", "semisoft")}
    assert np.max(np.abs(outputs["hard"] - outputs["soft"])) > 1.0
    assert np.max(np.abs(outputs["semisoft"] - outputs["soft"])) > 1.0

    def recovered_details(rule):
        out_bands = dwt2(outputs[rule], DB1)
        return out_bands.lh, out_bands.hl, out_bands.hh

    for got, w in zip(recovered_details("hard"), (bands.lh, bands.hl, bands.hh)):
        assert np.allclose(got, np.where(np.abs(w) <= t_hat, 0.0, w), atol=1e-10)
    for got, w in zip(recovered_details("soft"), (bands.lh, bands.hl, bands.hh)):
        assert np.allclose(got, np.sign(w) * np.maximum(np.abs(w) - t_hat, 0.0), atol=1e-10)
    for got, w in zip(recovered_details("semisoft"), (bands.lh, bands.hl, bands.hh)):
        a = np.abs(w)
        ramp = np.sign(w) * 2.0 * (a - t_hat)
        expected = np.where(a <= t_hat, 0.0, np.where(a <= 2.0 * t_hat, ramp, w))
        assert np.allclose(got, expected, atol=1e-10)


def test_semisoft_is_continuous_at_both_knees():
    from posakit.despeckle import _shrink_semisoft

    t = 1.0
    eps = 1e-9
    w = np.array([t - eps, t + eps, 2.0 * t - eps, 2.0 * t + eps, 3.0 * t, -3.0 * t])
    out = _shrink_semisoft(w, t)
    assert out[0] == 0.0
    assert abs(out[1]) < 1e-8  # just past the kill knee the ramp starts at 0
    assert abs(out[2] - 2.0 * t) < 1e-8  # ramp meets the identity branch at 2t
    assert out[3] == w[3]
    assert out[4] == 3.0 * t
    assert out[5] == -3.0 * t


def test_wavelet_threshold_rejects_unknown_rule():
    with pytest.raises(ValueError):
        wavelet_threshold(np.zeros((8, 8)), "garotte", DB1)


def test_homomorphic_identity_filter():
    img = speckled_constant(9, size=16)
    out = homomorphic_wrap(lambda x: x, img)
    assert np.allclose(out, img, atol=1e-9)


def test_homomorphic_fixes_constants():
    const = np.full((9, 9), 50.0)
    out = homomorphic_wrap(FilterSpec(kind="median"), const)
    assert np.allclose(out, const, atol=1e-9)


def test_homomorphic_rejects_negative_pixels():
    img = np.full((8, 8), 1.0)
    img[0, 0] = -0.5
    with pytest.raises(ValueError):
        homomorphic_wrap(FilterSpec(kind="median"), img)


def test_homomorphic_rejects_wavelet_specs():
    with pytest.raises(ValueError):
        homomorphic_wrap(FilterSpec(kind="posashrink"), np.ones((8, 8)))


def test_log_domain_noise_is_scale_free():
    # multiplicative noise becomes (nearly) additive after log1p for bright images
    variances = []
    for scale in (100.0, 1000.0):
        clean = np.full((128, 128), scale)
        noisy = apply_speckle(clean, SpeckleModel(kind="multilook", looks=4, seed=50))
        log_noise = np.log1p(noisy) - np.log1p(clean)
        variances.append(float(np.var(log_noise)))
    assert abs(variances[0] - variances[1]) < 0.05 * variances[1]


def test_apply_filter_dispatch_matches_direct_calls():
    img = speckled_constant(10, size=32)
    pairs = [
        (FilterSpec(kind="median", kernel=3, homomorphic=False), median_filter(img, 3)),
        (FilterSpec(kind="lee", kernel=3, looks=4, homomorphic=False), lee_filter(img, 3, 4)),
        (FilterSpec(kind="kuan", kernel=5, looks=4, homomorphic=False), kuan_filter(img, 5, 4)),
        (FilterSpec(kind="frost", kernel=3, damping=2.0, homomorphic=False), frost_filter(img, 3, 2.0)),
        (FilterSpec(kind="posashrink", basis=DB4), posashrink(img, DB4)),
        (FilterSpec(kind="visu_soft"), wavelet_threshold(img, "soft", DB1)),
    ]
    for spec, expected in pairs:
        assert np.array_equal(apply_filter(spec, img), expected)
    homo = apply_filter(FilterSpec(kind="lee", kernel=3, looks=4, homomorphic=True), img)
    assert np.array_equal(homo, homomorphic_wrap(FilterSpec(kind="lee", kernel=3, looks=4), img))
    assert not np.array_equal(homo, lee_filter(img, 3, 4))


@pytest.mark.parametrize(
    "make_img",
    [
        lambda: np.zeros((16, 16)),
        lambda: np.pad(np.array([[255.0]]), (7, 8)),  # lone impulse in a 16x16 field
        lambda: np.indices((16, 16)).sum(axis=0) % 2 * 200.0,  # checkerboard
    ],
)
def test_all_filters_keep_outputs_finite(make_img):
    img = make_img()
    specs = [
        FilterSpec(kind="median"),
        FilterSpec(kind="lee", looks=4),
        FilterSpec(kind="kuan", looks=4),
        FilterSpec(kind="frost"),
        FilterSpec(kind="median", homomorphic=False),
        FilterSpec(kind="lee", homomorphic=False),
        FilterSpec(kind="kuan", homomorphic=False),
        FilterSpec(kind="frost", homomorphic=False),
        FilterSpec(kind="posashrink"),
        FilterSpec(kind="visu_hard"),
        FilterSpec(kind="visu_soft"),
        FilterSpec(kind="visu_semisoft"),
    ]
    for spec in specs:
        out = apply_filter(spec, img)
        assert np.all(np.isfinite(out)), spec.kind
        assert out.shape == img.shape
