import numpy as np
import pytest

from fusedetect.errors import (
    FusionOrderError,
    InsufficientDataError,
    StatsMismatchError,
    UnknownFamilyError,
    VersionError,
)
from fusedetect.features import FAMILY_DIMS, FeatureVector
from fusedetect.fusion import (
    CONFIG_NAMES,
    StandardizationStats,
    config_dim,
    config_name,
    fit_standardizer,
    fuse,
    parse_config,
    standardize,
)


def fam_vec(family, values=None, rng=None, version="1.0.0"):
    d = FAMILY_DIMS[family]
    if values is None:
        values = rng.standard_normal(d)
    return FeatureVector(extractor_id=family, version=version, values=values)


def training_set(rng, n=10, families=("mscn", "clip", "mlbp")):
    out = []
    for _ in range(n):
        for fam in families:
            out.append(fam_vec(fam, rng=rng))
    return out


def standardized_triple(rng, stats=None, train=None):
    if train is None:
        train = training_set(rng)
    if stats is None:
        stats = fit_standardizer(train)
    parts = [
        standardize(fam_vec(f, rng=rng), stats) for f in ("mscn", "clip", "mlbp")
    ]
    return parts, stats


# ---------------------------------------------------------------------- fit


def test_fit_two_point_moments(rng):
    a = np.zeros(72)
    b = np.zeros(72)
    a[0], b[0] = 1.0, 3.0
    stats = fit_standardizer([fam_vec("mscn", a), fam_vec("mscn", b)])
    assert stats.means["mscn"][0] == 2.0
    assert stats.variances["mscn"][0] == 1.0  # population variance of {1, 3}
    assert stats.sample_count == 2


def test_fit_identical_samples_zero_variance():
    v = np.linspace(0, 1, 36)
    stats = fit_standardizer([fam_vec("mlbp", v.copy()) for _ in range(5)])
    assert np.all(stats.variances["mlbp"] == 0.0)
    assert np.array_equal(stats.means["mlbp"], v)


def test_fit_is_permutation_invariant(rng):
    train = training_set(rng, n=13)
    stats1 = fit_standardizer(train)
    shuffled = list(train)
    np.random.default_rng(7).shuffle(shuffled)
    stats2 = fit_standardizer(shuffled)
    for fam in ("mscn", "clip", "mlbp"):
        assert stats1.means[fam].tobytes() == stats2.means[fam].tobytes()
        assert stats1.variances[fam].tobytes() == stats2.variances[fam].tobytes()
    assert stats1.fingerprint == stats2.fingerprint


def test_fit_errors(rng):
    with pytest.raises(InsufficientDataError):
        fit_standardizer([])
    with pytest.raises(InsufficientDataError):
        fit_standardizer([fam_vec("mscn", rng=rng)])
    with pytest.raises(VersionError):
        fit_standardizer(
            [fam_vec("mscn", rng=rng), fam_vec("mscn", rng=rng, version="2.0.0")]
        )


def test_stats_round_trip(rng):
    stats = fit_standardizer(training_set(rng))
    clone = StandardizationStats.from_json_dict(stats.to_json_dict())
    assert clone.fingerprint == stats.fingerprint
    assert clone.sample_count == stats.sample_count


def test_fingerprint_tracks_content(rng):
    s1 = fit_standardizer(training_set(rng, n=8))
    s2 = fit_standardizer(training_set(rng, n=8))  # different draws
    assert s1.fingerprint != s2.fingerprint


# -------------------------------------------------------------- standardize


def test_standardize_mean_vector_gives_zeros(rng):
    train = [fam_vec("mlbp", rng=rng) for _ in range(6)]
    stats = fit_standardizer(train)
    z = standardize(fam_vec("mlbp", stats.means["mlbp"].copy()), stats)
    assert np.max(np.abs(z.values)) < 1e-9


def test_standardize_one_dim_case():
    a, b = np.zeros(72), np.zeros(72)
    a[0], b[0] = 1.0, 3.0
    stats = fit_standardizer([fam_vec("mscn", a), fam_vec("mscn", b)])
    probe = np.zeros(72)
    probe[0] = 3.0
    z = standardize(fam_vec("mscn", probe), stats)
    assert z.values[0] == 1.0  # (3 - 2) / sqrt(1)


def test_standardize_zero_variance_dims_to_zero(rng):
    rows = [rng.standard_normal(36) for _ in range(5)]
    for r in rows:
        r[7] = 4.2  # constant dimension
    stats = fit_standardizer([fam_vec("mlbp", r) for r in rows])
    probe = rng.standard_normal(36)
    probe[7] = -100.0
    z = standardize(fam_vec("mlbp", probe), stats)
    assert z.values[7] == 0.0
    assert z.stats_fingerprint == stats.fingerprint


def test_standardize_training_set_has_unit_moments(rng):
    train = [fam_vec("mscn", rng=rng) for _ in range(40)]
    stats = fit_standardizer(train)
    zs = np.stack([standardize(fv, stats).values for fv in train])
    live = stats.variances["mscn"] > 0
    assert np.max(np.abs(zs.mean(axis=0)[live])) < 1e-9
    assert np.max(np.abs(zs.var(axis=0)[live] - 1.0)) < 1e-9


def test_standardize_idempotence_check(rng):
    train = [fam_vec("clip", rng=rng) for _ in range(20)]
    stats = fit_standardizer(train)
    z_train = [standardize(fv, stats) for fv in train]
    restats = fit_standardizer(z_train)
    live = stats.variances["clip"] > 0
    assert np.max(np.abs(restats.means["clip"][live])) < 1e-9
    assert np.max(np.abs(restats.variances["clip"][live] - 1.0)) < 1e-9


def test_standardize_errors(rng):
    stats = fit_standardizer([fam_vec("mscn", rng=rng) for _ in range(3)])
    with pytest.raises(UnknownFamilyError):
        standardize(fam_vec("clip", rng=rng), stats)
    with pytest.raises(VersionError):
        standardize(fam_vec("mscn", rng=rng, version="9.9.9"), stats)


# --------------------------------------------------------------------- fuse


def test_fuse_full_triple(rng):
    parts, stats = standardized_triple(rng)
    fused = fuse(parts)
    assert fused.extractor_id == "fused"
    assert len(fused) == 620
    assert np.array_equal(fused.values[:72], parts[0].values)
    assert np.array_equal(fused.values[72:584], parts[1].values)
    assert np.array_equal(fused.values[584:], parts[2].values)
    assert fused.stats_fingerprint == stats.fingerprint
    assert fused.families == ("mscn", "clip", "mlbp")


def test_fuse_pairwise_mask(rng):
    parts, _ = standardized_triple(rng)
    fused = fuse([parts[1], parts[2]], mask=("clip", "mlbp"))
    assert len(fused) == 548
    assert fused.families == ("clip", "mlbp")


def test_fuse_single_family_mask(rng):
    parts, _ = standardized_triple(rng)
    fused = fuse([parts[0]], mask=("mscn",))
    assert len(fused) == 72


def test_fuse_order_errors(rng):
    parts, _ = standardized_triple(rng)
    with pytest.raises(FusionOrderError):
        fuse([parts[1], parts[0], parts[2]])  # wrong order
    with pytest.raises(FusionOrderError):
        fuse([parts[0], parts[1]])  # omitted family
    with pytest.raises(FusionOrderError):
        fuse([parts[0], parts[0], parts[2]])  # duplicate
    with pytest.raises(FusionOrderError):
        fuse([parts[2], parts[1]], mask=("mlbp", "clip"))  # non-canonical mask


def test_fuse_stat_mismatch(rng):
    parts_a, _ = standardized_triple(rng)
    parts_b, _ = standardized_triple(rng)
    with pytest.raises(StatsMismatchError):
        fuse([parts_a[0], parts_b[1], parts_b[2]])


def test_fuse_rejects_unstandardized(rng):
    raw = [fam_vec(f, rng=rng) for f in ("mscn", "clip", "mlbp")]
    with pytest.raises(StatsMismatchError):
        fuse(raw)


def test_fuse_injective(rng):
    parts, stats = standardized_triple(rng)
    other = list(parts)
    other[2] = standardize(fam_vec("mlbp", rng=rng), stats)
    f1, f2 = fuse(parts), fuse(other)
    assert not np.array_equal(f1.values, f2.values)


# ------------------------------------------------------------------ configs


def test_parse_config_names():
    assert parse_config("all") == ("mscn", "clip", "mlbp")
    assert parse_config("mscn") == ("mscn",)
    assert parse_config("clip+mlbp") == ("clip", "mlbp")
    assert parse_config("mlbp+clip") == ("clip", "mlbp")  # normalized
    assert parse_config("MSCN+MLBP") == ("mscn", "mlbp")


def test_parse_config_errors():
    with pytest.raises(UnknownFamilyError):
        parse_config("resnet")
    with pytest.raises(UnknownFamilyError):
        parse_config("mscn+mscn")
    with pytest.raises(UnknownFamilyError):
        parse_config("")


def test_seven_configs_and_dims():
    assert len(CONFIG_NAMES) == 7
    dims = {name: config_dim(parse_config(name)) for name in CONFIG_NAMES}
    assert dims == {
        "mscn": 72,
        "clip": 512,
        "mlbp": 36,
        "mscn+clip": 584,
        "mscn+mlbp": 108,
        "clip+mlbp": 548,
        "all": 620,
    }
    for name in CONFIG_NAMES:
        assert config_name(parse_config(name)) == name
