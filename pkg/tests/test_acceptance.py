"""Acceptance suite: one test per engine contract, pinned tolerances.

Each test here is a standalone pass/fail statement about a documented
behavior; the per-module suites carry the fine-grained cases.  Runtime
guards are part of the contract for the two heavy tests.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from conftest import random_phantom
from oracles.msssim_reference import ref_ms_ssim
from oracles.radiomics_bruteforce import (
    bf_halve_mask,
    bf_intensity_families,
    bf_shape,
)
from oracles.stats_enum import exact_two_sided_p, fleiss_kappa_direct
from voxeval.diffusion import (
    GaussianPosteriorDenoiser,
    PointMassDenoiser,
    SAMPLER_NAMES,
    assemble_condition,
    build_blur_mask,
    forward_noise,
    inpaint_sample,
    karras_sigmas,
    linear_schedule,
    sample,
)
from voxeval.fidelity import ccc_category, dsc, ms_ssim
from voxeval.ganmath import (
    GAN_PRESETS,
    AugmentationState,
    GanLambdas,
    ada_update,
    diffusion_losses,
    discriminator_loss,
    generator_loss,
)
from voxeval.radiomics import ExtractionConfig, build_manifest, extract_all
from voxeval.radiomics.filters import log_filter
from voxeval.volume import LabelMask, Volume, wavelet3d, wavelet3d_inverse
from voxeval.vtt import binarize, fleiss_kappa, mann_whitney_u


def test_radiomics_matches_brute_force_on_25_phantoms():
    """Every feature of the full manifest agrees with a per-definition
    loop implementation within 1e-9 relative, in under a minute."""
    start = time.monotonic()
    rng = np.random.default_rng(615)
    sigmas = (1.0, 2.0, 3.0, 4.0, 5.0)

    def _check_block(fv, covered, image_type, values, mask, voxel_volume):
        ref = bf_intensity_families(values, mask, voxel_volume, 25.0)
        for name, want in ref.items():
            key = f"{image_type}/{name}"
            got = fv[key]
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want)), key
            covered.add(key)

    for _ in range(25):
        vol, mask = random_phantom(rng, dims=(8, 8, 8), roi_max=6)
        fv = extract_all(vol, mask)
        roi = mask.binary(1)
        covered: set[str] = set()

        for name, want in bf_shape(roi, mask.spacing).items():
            key = f"shape/{name}"
            assert abs(fv[key] - want) <= 1e-9 * max(1.0, abs(want)), key
            covered.add(key)
        _check_block(fv, covered, "original", vol.values, roi, vol.voxel_volume_mm3)
        for s in sigmas:
            filt = log_filter(vol, s)
            _check_block(
                fv, covered, f"log-sigma-{s:g}mm", filt.values, roi, vol.voxel_volume_mm3
            )
        half = bf_halve_mask(roi)
        for band_name, band in wavelet3d(vol).items():
            _check_block(
                fv,
                covered,
                f"wavelet-{band_name}",
                band.values.astype(np.float64),
                half,
                band.voxel_volume_mm3,
            )
        # nothing in the manifest escaped comparison
        assert covered == set(fv.values.keys())

    assert time.monotonic() - start < 60.0


def test_default_manifest_emits_exactly_1065_features():
    manifest = build_manifest()
    assert len(manifest) == 1065
    keys = manifest.keys()
    assert len(set(keys)) == 1065
    assert manifest.family_counts() == {
        "shape": 15,
        "firstorder": 252,
        "glcm": 308,
        "glrlm": 224,
        "gldm": 196,
        "ngtdm": 70,
    }
    image_types = {k.split("/")[0] for k in keys if not k.startswith("shape/")}
    assert len(image_types) == 14  # original + 5 LoG scales + 8 wavelet bands
    assert 15 + 14 * 75 == 1065


def test_ccc_category_boundaries_are_exact():
    assert ccc_category(0.90) == "excellent"
    assert ccc_category(0.75) == "good"
    assert ccc_category(0.50) == "moderate"
    assert ccc_category(0.8999999999) == "good"
    assert ccc_category(0.7499999999) == "moderate"
    assert ccc_category(0.4999999999) == "poor"


def test_ms_ssim_identity_and_independent_reference():
    rng = np.random.default_rng(64)
    base = rng.uniform(-1.0, 1.0, size=(64, 64, 64))
    v = Volume(base, (1.0, 1.0, 1.0), "normalized")
    assert ms_ssim(v, v, scales=3) == pytest.approx(1.0, abs=1e-9)

    for _ in range(10):
        a_vals = rng.uniform(-1.0, 1.0, size=(64, 64, 64))
        b_vals = np.clip(0.7 * a_vals + 0.3 * rng.normal(size=(64, 64, 64)), -1.0, 1.0)
        a = Volume(a_vals, (1.0, 1.0, 1.0), "normalized")
        b = Volume(b_vals, (1.0, 1.0, 1.0), "normalized")
        got = ms_ssim(a, b, scales=3)
        want = ref_ms_ssim(a_vals, b_vals, 2.0, scales=3)
        assert abs(got - want) <= 1e-6


def test_dsc_equals_direct_counting_on_100_pairs():
    rng = np.random.default_rng(200)
    spacing = (1.0, 1.0, 1.0)
    for _ in range(100):
        a = rng.integers(0, 2, size=(6, 6, 6)).astype(np.int32)
        b = rng.integers(0, 2, size=(6, 6, 6)).astype(np.int32)
        rep = dsc(LabelMask(a, spacing), LabelMask(b, spacing))
        na, nb = int(a.sum()), int(b.sum())
        inter = int(np.count_nonzero((a == 1) & (b == 1)))
        if na == 0 and nb == 0:
            assert rep.mean == 1.0
        else:
            assert rep.per_structure["1"] == 2.0 * inter / (na + nb)  # exact
    # the empty-empty convention holds structure-wise too
    zero = LabelMask(np.zeros((4, 4, 4), dtype=np.int32), spacing)
    rep = dsc(zero, zero, groups={"organ": [1]})
    assert rep.per_structure["organ"] == 1.0


def test_samplers_reproduce_analytic_gaussian_target():
    start = time.monotonic()
    mu, std = 1.0, 2.0
    den = GaussianPosteriorDenoiser(mu, std)
    schedule = linear_schedule(1000)
    shape = (100, 100, 1)  # 10,000 independent scalar chains

    runs = {
        "dpmpp-2m": dict(steps=100, seed=101),
        "dpmpp-2m-sde": dict(steps=100, seed=102),
        "linear": dict(steps=None, seed=103),  # full 1000-step chain
    }
    for name, kw in runs.items():
        out = sample(name, den, schedule, shape, seed=kw["seed"], steps=kw["steps"])
        got_mu = float(out.mean())
        got_std = float(out.std())
        assert abs(got_mu - mu) <= 0.05 * abs(mu), (name, got_mu)
        assert abs(got_std - std) <= 0.05 * std, (name, got_std)

    target = np.random.default_rng(7).uniform(-0.5, 0.5, size=(8, 8, 8))
    pm = PointMassDenoiser(target)
    for name in SAMPLER_NAMES:
        steps = None if name == "linear" else 30
        out = sample(name, pm, schedule, target.shape, seed=9, steps=steps)
        assert np.max(np.abs(out - target)) <= 1e-3, name

    assert time.monotonic() - start < 120.0


def test_karras_ladder_endpoints_and_linear_collapse():
    n, smin, smax = 18, 0.02, 80.0
    sig = karras_sigmas(n, smin, smax, rho=7.0)
    assert sig[0] == smax  # exact endpoint snap
    assert sig[n - 1] == smin
    assert sig[n] == 0.0
    assert len(sig) == n + 1
    lin = karras_sigmas(n, smin, smax, rho=1.0)
    np.testing.assert_allclose(lin[:-1], np.linspace(smax, smin, n), rtol=0, atol=1e-12)
    assert lin[0] == smax and lin[n - 1] == smin


def test_repaint_known_region_replays_forward_noise_at_every_step():
    rng = np.random.default_rng(31)
    original = rng.uniform(-1.0, 1.0, size=(16, 16, 16))
    gen_mask = np.zeros((16, 16, 16))
    gen_mask[4:12, 4:12, 4:12] = 1.0  # regenerate the core, keep the shell
    known = gen_mask == 0.0
    schedule = linear_schedule(100)
    seed = 2468

    observed: list[tuple[int, np.ndarray]] = []
    inpaint_sample(
        GaussianPosteriorDenoiser(0.0, 1.0),
        schedule,
        original,
        gen_mask,
        seed=seed,
        on_step=lambda t, x: observed.append((t, x.copy())),
    )
    assert [t for t, _ in observed] == list(range(99, -1, -1))  # all 100 steps
    for t, state in observed:
        replay = forward_noise(original, t, schedule, seed)
        assert np.array_equal(state[known], replay[known])  # voxelwise exact


def test_blur_mask_edge_value_range_and_support():
    labels = np.zeros((31, 31, 31), dtype=np.int32)
    labels[15, 15, 15] = 1
    mask = build_blur_mask(LabelMask(labels, (1.0, 1.0, 1.0)))  # defaults: 5, 25.0
    assert mask.values[15, 15, 15] == 1.0
    assert mask.values.min() >= 0.0
    assert mask.values.max() <= 1.0
    # five dilation rounds grow a point into an 11-cube; all of it stays positive
    assert np.all(mask.values[10:21, 10:21, 10:21] > 0.0)

    blob = np.zeros((31, 31, 31), dtype=np.int32)
    blob[8:12, 14:17, 15] = 1
    edge = build_blur_mask(LabelMask(blob, (1.0, 1.0, 1.0)), mode="edge")
    assert np.all(edge.values[blob == 1] == 1.0)


def test_adversarial_and_diffusion_losses_match_hand_oracles():
    rng = np.random.default_rng(55)
    x = rng.uniform(-1.0, 1.0, size=(2, 3, 3, 3))
    g = rng.uniform(-1.0, 1.0, size=(2, 3, 3, 3))
    m = rng.integers(0, 2, size=(2, 3, 3, 3)).astype(bool)
    d_fake = np.array([0.3, -0.7])
    lam = GanLambdas()

    res = generator_loss(d_fake, x, g, m, lam)
    adv = -lam.l1 * float(d_fake.mean())
    rec = lam.l2 * float(np.abs(x - g).mean())
    tum = lam.l3 * float(((x - g) ** 2)[m].mean())
    assert abs(res.adversarial - adv) <= 1e-9
    assert abs(res.reconstruction - rec) <= 1e-9
    assert abs(res.tumor - tum) <= 1e-9
    assert abs(res.total - (adv + rec + tum)) <= 1e-9

    d_real = np.array([1.1, 0.4, -0.2])
    d_fake2 = np.array([0.6, -0.1, 0.8])
    gn = np.array([1.4, 0.7, 1.0])
    dres = discriminator_loss(d_real, d_fake2, gn, lam)
    wass = -lam.l4 * float(d_real.mean() - d_fake2.mean())
    gp = lam.l5 * float(((gn - 1.0) ** 2).mean())
    drift = 1e-3 * float((d_real**2).mean())
    assert abs(dres.wasserstein - wass) <= 1e-9
    assert abs(dres.gradient_penalty - gp) <= 1e-9
    assert abs(dres.drift - drift) <= 1e-9
    assert abs(dres.total - (wass + gp + drift)) <= 1e-9

    x0 = rng.uniform(-1.0, 1.0, size=(4, 4, 4))
    x0_hat = rng.uniform(-1.0, 1.0, size=(4, 4, 4))
    tm = rng.integers(0, 2, size=(4, 4, 4)).astype(bool)
    l_wdm, l_inp = diffusion_losses(x0, x0_hat, tm, l1=10.0)
    want_wdm = float(((x0 - x0_hat) ** 2).mean())
    want_inp = want_wdm + 10.0 * float(((x0 - x0_hat) ** 2)[tm].mean())
    assert abs(l_wdm - want_wdm) <= 1e-9
    assert abs(l_inp - want_inp) <= 1e-9

    assert GAN_PRESETS["ct"] == GanLambdas(1.0, 1000.0, 100.0, 1.0, 10.0)
    assert GAN_PRESETS["mri"] == GanLambdas(1.0, 100.0, 100.0, 1.0, 10.0)

    for train in (1.0, 0.0, -1.0):
        for val in (1.0, 0.0, -1.0):
            got = ada_update(AugmentationState(0.5), train, val)
            want = 0.55 if (train > 0 and val < 0) else 0.45
            assert got.p == pytest.approx(want, abs=1e-15), (train, val)
    assert ada_update(AugmentationState(0.98), 1.0, -1.0).p == 1.0
    assert ada_update(AugmentationState(0.02), 1.0, 1.0).p == 0.0


def test_wavelet_round_trip_isometry_and_condition_shapes():
    rng = np.random.default_rng(88)
    vals = rng.normal(size=(10, 8, 6))
    v = Volume(vals, (1.0, 1.0, 1.0), "arbitrary")
    bands = wavelet3d(v)
    back = wavelet3d_inverse(bands)
    assert np.max(np.abs(back.values - vals)) <= 1e-10
    total = sum(float((b.values**2).sum()) for b in bands.values())
    assert abs(total - float((vals**2).sum())) <= 1e-9 * float((vals**2).sum())

    dims = (256, 256, 256)
    roi = Volume(
        rng.uniform(-1.0, 1.0, size=dims).astype(np.float32), (1.0, 1.0, 1.0), "normalized"
    )
    contrast = Volume(
        rng.uniform(-1.0, 1.0, size=dims).astype(np.float32), (1.0, 1.0, 1.0), "normalized"
    )
    seg = LabelMask(rng.integers(0, 3, size=dims).astype(np.int16), (1.0, 1.0, 1.0))
    cond = assemble_condition(roi, contrast, seg, mode="wavelet")
    assert cond.channels.shape == (24, 128, 128, 128)
    assert cond.channels.dtype == np.float32
    down = assemble_condition(roi, contrast, seg, mode="downsample")
    assert down.channels.shape == (3, 128, 128, 128)
    assert down.channels.dtype == np.float32


def test_rating_statistics_contracts():
    for score in range(1, 6):
        assert binarize(score) == "real"
    for score in range(6, 11):
        assert binarize(score) == "synthetic"

    # unanimity across mixed categories
    perfect = [[5, 0], [0, 5], [5, 0], [0, 5]]
    res = fleiss_kappa(perfect)
    assert res.kappa == 1.0
    assert not res.degenerate

    rng = np.random.default_rng(404)
    for _ in range(20):
        table = rng.multinomial(6, [0.4, 0.35, 0.25], size=10)
        got = fleiss_kappa(table)
        want_k, want_pb, want_pe = fleiss_kappa_direct(table)
        assert abs(got.kappa - want_k) <= 1e-12
        assert abs(got.p_bar - want_pb) <= 1e-12
        assert abs(got.p_bar_e - want_pe) <= 1e-12

    for n in range(1, 12):
        for m in range(1, 13 - n):
            a = rng.integers(1, 6, size=n).astype(float)  # coarse scores force ties
            b = rng.integers(1, 6, size=m).astype(float)
            got = mann_whitney_u(a, b)
            assert got.method == "exact"
            assert abs(got.p - exact_two_sided_p(a, b)) <= 1e-12, (n, m)
