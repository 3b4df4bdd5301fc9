"""Experiment-driver tests: canonical report serialization, the bow and
vertical-AP obstruction orderings, the Type I/II dichotomy run over the
bundled zero table, and the counting census.

The bow, AP, and dichotomy reports are session fixtures (see conftest);
tests here assert the orderings and certificates those reports exist to
demonstrate, plus full determinism of the serialized form.
"""

import json
import math
import os

import numpy as np
import pytest

from zetalab.experiments import (
    ExperimentReport,
    _canon,
    _downsample,
    ap_obstruction_experiment,
    census,
    write_report,
)
from zetalab.zerosets import gen_line_config

# ---------------------------------------------------------------------------
# canonical serialization
# ---------------------------------------------------------------------------


def _sample_report():
    return ExperimentReport(
        name="sample",
        params={"b": 2.0, "a": complex(1.0, -3.0), "n": 7},
        records={"arr": np.array([1.0, 0.5]), "flag": np.bool_(True),
                 "count": np.int64(12)},
        summary={"ok": True},
        provenance={"kernel_backend": "test"},
        traces={"t": (np.array([1.0, 2.0]), np.array([3.0, 4.0]))},
    )


def test_canon_value_forms():
    assert _canon(complex(1.5, -2.5)) == {"im": -2.5, "re": 1.5}
    assert _canon(np.float64(2.5)) == 2.5
    assert _canon(np.int32(3)) == 3
    assert _canon(np.bool_(False)) is False
    assert _canon(float("nan")) == "nan"
    assert _canon(float("inf")) == "inf"
    assert _canon({"x": np.array([1, 2])}) == {"x": [1, 2]}
    with pytest.raises(TypeError):
        _canon(object())


def test_canonical_json_is_deterministic_and_sorted():
    a = _sample_report().canonical_json()
    b = _sample_report().canonical_json()
    assert a == b
    assert a.endswith("\n")
    parsed = json.loads(a)
    assert list(parsed) == sorted(parsed)
    assert parsed["params"]["a"] == {"im": -3.0, "re": 1.0}
    assert "timestamp" not in a.lower()


def test_param_hash_tracks_params_only():
    r1 = _sample_report()
    r2 = _sample_report()
    assert r1.param_hash() == r2.param_hash()
    r2.records["extra"] = 1.0
    assert r1.param_hash() == r2.param_hash()  # records don't contribute
    r2.params["n"] = 8
    assert r1.param_hash() != r2.param_hash()
    assert len(r1.param_hash()) == 12


def test_downsample_caps_and_keeps_endpoints():
    xs = np.arange(5000.0)
    ys = 2.0 * xs
    a, b = _downsample(xs, ys)
    assert a.size <= 2000
    assert a[0] == 0.0 and a[-1] == 4999.0
    assert np.all(b == 2.0 * a)
    xs2 = np.arange(10.0)
    a2, b2 = _downsample(xs2, xs2)
    assert a2.size == 10  # under the cap: untouched


def test_write_report_files_and_reruns(tmp_path):
    rep = _sample_report()
    json_path, csv_paths = write_report(rep, tmp_path)
    assert os.path.basename(json_path) == f"sample-{rep.param_hash()}.json"
    with open(json_path) as f:
        first = f.read()
    assert json.loads(first) == rep.canonical_dict()
    assert len(csv_paths) == 1
    with open(csv_paths[0]) as f:
        lines = f.read().splitlines()
    assert lines[0] == "parameter,magnitude"
    assert lines[1:] == ["1.0,3.0", "2.0,4.0"]
    # rerun: byte-identical
    json_path2, _ = write_report(_sample_report(), tmp_path)
    with open(json_path2) as f:
        assert f.read() == first


# ---------------------------------------------------------------------------
# bow obstruction
# ---------------------------------------------------------------------------


def test_bow_orderings(bow_report):
    s = bow_report.summary
    assert s["middle_below_bottom"]
    assert s["middle_below_control"]
    assert s["middle_to_bottom_ratio"] < 1.0
    m = s["magnitudes"]
    assert m["middle"] < m["bottom"] < m["foot"]
    assert m["control"] == pytest.approx(math.log(2.0), abs=1e-10)
    assert s["control_log2_deviation"] <= s["control_tail_bound"]
    assert s["control_within_tail"]


def test_bow_indices_and_geometry(bow_report):
    idx = bow_report.records["indices"]
    # bow of length L = round((e^10)^0.55) = 245: plateau starts past L/4
    assert idx["foot"] == 0
    assert idx["ascending_ramp_length"] == 61
    assert idx["bottom"] == 61
    assert idx["middle"] == 122
    assert bow_report.params["bow_length"] == 245


def test_bow_predicate_boundary(bow_report):
    pb = bow_report.records["predicate_boundary"]
    # adjusted left gap: the plateau-bottom zero is half-isolated on the
    # full bow and with the ramp excluded; the raw desk gap rejects it
    assert pb["hf_adjusted_full_bow"]["ok"] is True
    assert pb["hf_adjusted_ramp_excluded"]["ok"] is True
    assert pb["raw_desk_full_bow"]["ok"] is False
    assert pb["hf_adjusted_full_bow"]["certifying_y"] == pytest.approx(
        math.exp(2.0))
    assert pb["left_gap_cap_hf"] == pb["c_f"]


def test_bow_sweep_traces_present(bow_report):
    for name in ("bottom", "middle", "foot", "control"):
        xs, ys = bow_report.traces[name]
        assert xs.size == ys.size
        assert xs.size > 10
        rec = bow_report.records["sweeps"][name]
        assert rec["magnitude"] == pytest.approx(float(np.max(ys)))


# ---------------------------------------------------------------------------
# vertical-AP obstruction
# ---------------------------------------------------------------------------


def test_ap_orderings(ap_report):
    s = ap_report.summary
    assert s["middle_below_bottom"]
    assert s["bottom_attains_threshold"]
    assert s["far_spacing_is_log2"]
    assert s["middle_max"] < 0.2 * s["bottom_max"]


def test_ap_bottom_sweep_reaches_aligning_scale(ap_report):
    rec = ap_report.records["bottom"]
    aligning = ap_report.params["aligning_scale"]
    assert aligning == pytest.approx(1.0e4)
    # the maximizer sits within one decade of Z* = T^{1/c}, far above the cap
    assert 0.5 * aligning < rec["z_star"] < 5.0 * aligning
    assert rec["passed"]
    assert rec["terms"] == 80


def test_ap_middle_sweep_is_capped(ap_report):
    rec = ap_report.records["middle"]
    cap = ap_report.params["middle_cap"]
    assert cap == pytest.approx(1.0e4 ** 0.8)
    assert rec["z_star"] <= cap * (1.0 + 1e-12)
    assert rec["magnitude"] < ap_report.records["bottom"]["magnitude"]


def test_ap_far_spacing_isolates_log2(ap_report):
    rec = ap_report.records["far_spacing"]
    assert rec["max_deviation_from_log2"] <= 1e-10
    assert rec["magnitude"] == pytest.approx(math.log(2.0), abs=1e-10)


def test_ap_requires_range_to_reach_aligning_scale(weight):
    with pytest.raises(ValueError, match="aligning"):
        ap_obstruction_experiment(weight=weight, y=50.0)


# ---------------------------------------------------------------------------
# dichotomy over the bundled table
# ---------------------------------------------------------------------------


def test_dichotomy_summary(dichotomy_report):
    s = dichotomy_report.summary
    assert s["zeros"] == 100
    assert s["dichotomy_holds_all"]
    assert s["holds_count"] == 100
    assert s["type1_count"] == 100
    assert s["type2_count"] == 98
    assert s["both_count"] == 98
    assert s["type1_only"] == 2
    assert s["type2_only"] == 0
    assert s["all_certified"]
    assert s["identity_all_ok"]


def test_dichotomy_per_zero_rows(dichotomy_report):
    rows = dichotomy_report.records["per_zero"]
    assert len(rows) == 100
    for row in rows:
        assert row["holds"]
        assert max(row["horn1"], row["horn2"]) >= 1.0
        assert row["horn1"] == pytest.approx(
            3.0 * math.log(row["t_batch"]) * row["type1_magnitude"])
        assert row["horn2"] == pytest.approx(3.0 * row["type2_magnitude"])
        assert row["certified"]
        assert row["residual"] <= row["tail_bound"]


def test_dichotomy_batches_cover_table(dichotomy_report, zs100):
    batches = dichotomy_report.params["batches"]
    assert sum(b["count"] for b in batches) == len(zs100)
    ts = [b["t"] for b in batches]
    assert ts == sorted(ts)
    assert ts[0] == pytest.approx(13.5)
    for a, b in zip(ts, ts[1:]):
        assert b == pytest.approx(2.0 * a)


def test_dichotomy_block_identity_checks(dichotomy_report):
    checks = dichotomy_report.records["identity_checks"]
    assert len(checks) == len(dichotomy_report.params["batches"])
    for c in checks:
        assert c["ok"]
        assert c["identity_residual"] <= c["tolerance"]


def test_dichotomy_negative_control(dichotomy_report):
    ctl = dichotomy_report.records["negative_control"]
    assert ctl["perturbed_index"] == 3
    assert ctl["delta"] == pytest.approx(1e-3)
    assert ctl["breaks_identity"]
    assert ctl["certificate_failures"] >= 1
    failed = {f["index"] for f in ctl["failures"]}
    assert 3 in failed  # the perturbed zero itself loses its certificate
    for f in ctl["failures"]:
        assert f["residual"] > f["tail_bound"]


def test_dichotomy_serializes(dichotomy_report):
    text = dichotomy_report.canonical_json()
    parsed = json.loads(text)
    assert parsed["summary"]["dichotomy_holds_all"] is True


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------


def _census_lineset():
    return gen_line_config([
        (0.5, [30.0, 31.0, 32.0]),
        (0.6, [130.0]),
        (0.55, [180.0, 181.0, 182.0, 183.0, 184.0]),
    ])


def test_census_three_line_example(tables, weight):
    from zetalab.zerosets import ScaleParams

    rep = census(_census_lineset(), tables,
                 params=ScaleParams(t_scale=100.0), weight=weight)
    assert rep.records["cluster_sizes"] == [3, 1, 5]
    s = rep.summary
    assert s["zeros"] == 9
    assert s["clusters"] == 3
    assert s["size_sum_equals_zeros"]
    assert s["classified"] == 3
    assert s["skipped"] == 0
    assert s["label_counts"] == {"A": 3, "B": 1, "D": 1}
    assert s["half_isolated"] == 3
    assert s["indeterminate"] == 0
    assert s["rnh_member_count"] == 6

    per_line = rep.records["per_line"]
    assert per_line["0.5"] == {"zeros": 3, "half_isolated": 1,
                               "indeterminate": 0}
    assert per_line["0.55"] == {"zeros": 5, "half_isolated": 1,
                                "indeterminate": 0}
    assert per_line["0.6"] == {"zeros": 1, "half_isolated": 1,
                               "indeterminate": 0}

    n_sigma = rep.records["n_sigma_2t"]
    assert n_sigma["0.5"] == 9
    assert n_sigma["0.55"] == 6
    assert n_sigma["0.6"] == 1
    assert n_sigma["0.65"] == 0

    # R_{N,H}: only the two clusters inside [T, 2T] = [100, 200] contribute;
    # the singleton enters at H = 1, the five-zero cluster at H = 4
    rnh = rep.records["r_nh"]
    assert rnh["sigma=0.6,N=2,H=1"] == 1
    assert rnh["sigma=0.55,N=2,H=4"] == 5
    assert rnh["sigma=0.5,N=2,H=4"] == 5
    assert all("H=2" not in k for k in rnh)
    assert not any(k.startswith("sigma=0.65") for k in rnh)


def test_census_on_bundled_table(tables, weight, zs100):
    rep = census(zs100, tables, weight=weight)
    # default T is the top ordinate; the whole table is one cluster whose
    # classification neighborhood escapes the complete range
    assert rep.params["scale_params"]["t_scale"] == pytest.approx(
        float(zs100.gamma.max()))
    assert rep.records["cluster_sizes"] == [100]
    s = rep.summary
    assert s["classified"] == 0
    assert s["skipped"] == 1
    assert rep.records["skipped_clusters"][0]["size"] == 100
    assert s["half_isolated"] == 1
    assert s["indeterminate"] == 17
    assert rep.records["n_sigma_2t"]["0.5"] == 100
    assert s["label_counts"] == {}


def test_census_empty_and_singleton(tables, weight):
    empty = census(gen_line_config([]), tables, weight=weight)
    assert empty.summary["zeros"] == 0
    assert empty.summary["clusters"] == 0
    assert empty.summary["size_sum_equals_zeros"]

    single = census(gen_line_config([(0.5, [120.0])]), tables, weight=weight)
    assert single.summary["zeros"] == 1
    assert single.records["cluster_sizes"] == [1]
    assert single.summary["classified"] == 1
    assert single.summary["half_isolated"] == 1
    assert single.summary["rnh_member_count"] == 1
    assert "D" in single.summary["label_counts"]
