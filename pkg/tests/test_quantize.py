"""Quantizer tests: joint scaling, the three rounding rules, bit presets."""

import itertools

import numpy as np
import pytest

from spinsum.errors import ValidationError
from spinsum.model import IsingForm, ising_energy
from spinsum.quantize import (
    QuantizedIsing,
    quantize,
    quantize_bits,
    range_for_bits,
    round_by_fraction,
    round_half_split,
    round_nearest,
    scale_to_range,
)


def random_form(rng, n, spread=5.0):
    h = rng.uniform(-spread, spread, size=n)
    j = np.triu(rng.uniform(-spread, spread, size=(n, n)), 1)
    return IsingForm(h=h, j=j, offset=float(rng.normal()))


def enumerate_argmin(form):
    """All minimum-energy spin states by brute force (independent oracle)."""
    n = len(form.h)
    energies = {}
    for s in itertools.product((-1, 1), repeat=n):
        total = form.offset
        for i in range(n):
            total += form.h[i] * s[i]
            for k in range(i + 1, n):
                total += 2.0 * form.j[i, k] * s[i] * s[k]
        energies[s] = total
    floor_val = min(energies.values())
    return {s for s, e in energies.items() if e <= floor_val + 1e-9}


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------


def test_scale_factor_examples():
    form = IsingForm(h=np.array([7.0, -3.0]), j=np.zeros((2, 2)))
    scaled, scale = scale_to_range(form, 14)
    assert scale == 2.0
    np.testing.assert_allclose(scaled.h, [14.0, -6.0])

    at_limit = IsingForm(h=np.array([14.0, 1.0]), j=np.zeros((2, 2)))
    same, unit = scale_to_range(at_limit, 14)
    assert unit == 1.0
    np.testing.assert_array_equal(same.h, at_limit.h)


def test_scale_of_all_zero_form_is_one():
    form = IsingForm(h=np.zeros(3), j=np.zeros((3, 3)), offset=2.5)
    scaled, scale = scale_to_range(form, 14)
    assert scale == 1.0
    assert scaled.offset == 2.5


def test_scale_considers_couplings_too():
    j = np.zeros((2, 2))
    j[0, 1] = -28.0
    form = IsingForm(h=np.array([1.0, 1.0]), j=j)
    _, scale = scale_to_range(form, 14)
    assert scale == 0.5


def test_scaling_preserves_argmin_set():
    rng = np.random.default_rng(8)
    for _ in range(10):
        form = random_form(rng, 8)
        scaled, _ = scale_to_range(form, 14)
        assert enumerate_argmin(scaled) == enumerate_argmin(form)


def test_scale_rejects_bad_range():
    form = random_form(np.random.default_rng(0), 3)
    for bad in (0, -2, 1.5):
        with pytest.raises(ValidationError, match="range_w"):
            scale_to_range(form, bad)


# ---------------------------------------------------------------------------
# rounding rules
# ---------------------------------------------------------------------------


def test_nearest_rounding_values():
    values = np.array([1.4, -2.6, 13.5, -13.5, 0.5, -0.5, 3.0, 0.0])
    out = round_nearest(values)
    assert list(out) == [1, -3, 14, -14, 1, -1, 3, 0]


def test_nearest_rounding_idempotent_on_integers():
    ints = np.array([-14.0, -1.0, 0.0, 7.0, 14.0])
    assert np.array_equal(round_nearest(ints), ints.astype(np.int64))
    twice = round_nearest(round_nearest(ints).astype(np.float64))
    assert np.array_equal(twice, ints.astype(np.int64))


def test_half_split_leaves_integers_alone():
    rng = np.random.default_rng(0)
    out = round_half_split(np.array([3.0, -2.0, 0.0]), rng)
    assert list(out) == [3, -2, 0]


def test_half_split_is_a_fair_coin():
    rng = np.random.default_rng(123)
    out = round_half_split(np.full(100_000, 1.25), rng)
    assert set(np.unique(out)) == {1, 2}
    share_up = np.mean(out == 2)
    assert abs(share_up - 0.5) < 0.005


def test_fraction_rounding_is_unbiased():
    rng = np.random.default_rng(456)
    draws = round_by_fraction(np.full(100_000, 1.25), rng)
    assert set(np.unique(draws)) <= {1, 2}
    sigma = np.sqrt(0.25 * 0.75 / 100_000)
    assert abs(draws.mean() - 1.25) < 3 * sigma


def test_fraction_rounding_fixes_integers():
    rng = np.random.default_rng(7)
    out = round_by_fraction(np.array([2.0, -5.0]), rng)
    assert list(out) == [2, -5]


@pytest.mark.parametrize("negative", [-1.75, -0.25])
def test_fraction_rounding_unbiased_for_negatives(negative):
    rng = np.random.default_rng(99)
    draws = round_by_fraction(np.full(100_000, negative), rng)
    frac = negative - np.floor(negative)
    sigma = np.sqrt(frac * (1 - frac) / 100_000)
    assert abs(draws.mean() - negative) < 3 * sigma


# ---------------------------------------------------------------------------
# full quantization
# ---------------------------------------------------------------------------


def test_quantize_outputs_stay_in_window():
    rng = np.random.default_rng(31)
    for scheme, seed in (("deterministic", None), ("half", 5), ("stochastic", 5)):
        for _ in range(10):
            prog = quantize(random_form(rng, 9), 14, scheme=scheme, seed=seed)
            assert np.abs(prog.h).max() <= 14
            assert np.abs(prog.j).max() <= 14
            assert prog.range_w == 14


def test_quantize_records_scale_and_offset():
    form = IsingForm(h=np.array([7.0, 0.0]), j=np.zeros((2, 2)), offset=-1.25)
    prog = quantize(form, 14)
    assert prog.scale == 2.0
    assert prog.source_offset == -1.25
    assert prog.offset == -1.25  # alias used by the energy helper
    assert ising_energy(prog, np.array([-1, 1])) == pytest.approx(-14.0 - 1.25)


def test_quantize_seeded_schemes_reproduce():
    form = random_form(np.random.default_rng(55), 12)
    for scheme in ("half", "stochastic"):
        a = quantize(form, 14, scheme=scheme, seed=2024)
        b = quantize(form, 14, scheme=scheme, seed=2024)
        assert np.array_equal(a.h, b.h) and np.array_equal(a.j, b.j)
        assert a.digest() == b.digest()
        other = quantize(form, 14, scheme=scheme, seed=2025)
        assert not (
            np.array_equal(a.h, other.h) and np.array_equal(a.j, other.j)
        ), "different seeds should perturb at least one coefficient here"


def test_quantize_deterministic_is_pure():
    form = random_form(np.random.default_rng(77), 10)
    digests = {quantize(form, 14).digest() for _ in range(5)}
    assert len(digests) == 1


def test_quantize_seed_policy():
    form = random_form(np.random.default_rng(1), 4)
    with pytest.raises(ValidationError, match="seed"):
        quantize(form, 14, scheme="stochastic")
    with pytest.raises(ValidationError, match="seed"):
        quantize(form, 14, scheme="deterministic", seed=3)
    with pytest.raises(ValidationError, match="scheme"):
        quantize(form, 14, scheme="banker")


def test_bit_presets():
    assert range_for_bits(6) == 31
    assert range_for_bits(4) == 7
    assert range_for_bits(3) == 3
    assert range_for_bits(16) == 32767
    for bad in (2, 17, 4.5):
        with pytest.raises(ValidationError, match="bits"):
            range_for_bits(bad)


def test_quantize_bits_matches_equivalent_range():
    form = random_form(np.random.default_rng(3), 8)
    via_bits = quantize_bits(form, 6, scheme="stochastic", seed=11)
    via_range = quantize(form, 31, scheme="stochastic", seed=11)
    assert np.array_equal(via_bits.h, via_range.h)
    assert np.array_equal(via_bits.j, via_range.j)
    assert via_bits.scale == via_range.scale


def test_six_bit_deterministic_error_bound():
    """After unscaling, each coefficient sits within half an integer step."""
    rng = np.random.default_rng(17)
    form = random_form(rng, 10)
    prog = quantize_bits(form, 6)
    step = 0.5 / prog.scale
    h_err = np.abs(prog.h / prog.scale - form.h)
    iu = np.triu_indices(10, k=1)
    j_err = np.abs(prog.j[iu] / prog.scale - form.j[iu])
    assert h_err.max() <= step + 1e-12
    assert j_err.max() <= step + 1e-12


def test_quantized_form_validation():
    good = dict(range_w=14, scale=1.0, scheme="deterministic", seed=None)
    with pytest.raises(ValidationError, match="integer-valued"):
        QuantizedIsing(h=np.array([1.5, 0.0]), j=np.zeros((2, 2)), **good)
    with pytest.raises(ValidationError, match="±14"):
        QuantizedIsing(h=np.array([15, 0]), j=np.zeros((2, 2), dtype=int), **good)
    with pytest.raises(ValidationError, match="upper"):
        j = np.zeros((2, 2), dtype=int)
        j[1, 0] = 1
        QuantizedIsing(h=np.zeros(2, dtype=int), j=j, **good)
    with pytest.raises(ValidationError, match="scale"):
        QuantizedIsing(
            h=np.zeros(2, dtype=int),
            j=np.zeros((2, 2), dtype=int),
            range_w=14,
            scale=0.0,
            scheme="deterministic",
            seed=None,
        )


def test_digest_tracks_content_not_seed_field():
    h = np.array([1, -2], dtype=np.int64)
    j = np.zeros((2, 2), dtype=np.int64)
    a = QuantizedIsing(h=h, j=j, range_w=14, scale=1.0, scheme="stochastic", seed=1)
    b = QuantizedIsing(h=h, j=j, range_w=14, scale=1.0, scheme="stochastic", seed=2)
    assert a.digest() == b.digest()
    c = QuantizedIsing(
        h=np.array([1, -3]), j=j, range_w=14, scale=1.0, scheme="stochastic", seed=1
    )
    assert c.digest() != a.digest()
