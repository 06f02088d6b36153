"""Scenario generation, config file round-trips, and demand calibration."""

from dataclasses import replace

import pytest

from edgemarket.scenario import (
    CALIBRATION_SEEDS,
    DEFAULT_CONFIG,
    ScenarioConfig,
    calibrate,
    config_from_text,
    config_to_text,
    demand_ratio,
    follower_contexts,
    generate,
    leader_contexts,
    load_config,
    save_config,
    scenario_demand,
)


def test_same_seed_reproduces_scenario_exactly():
    a = generate(replace(DEFAULT_CONFIG, seed=42))
    b = generate(replace(DEFAULT_CONFIG, seed=42))
    assert a == b


def test_different_seeds_differ():
    a = generate(replace(DEFAULT_CONFIG, seed=1))
    b = generate(replace(DEFAULT_CONFIG, seed=2))
    assert a.tds != b.tds


def test_no_ads_config():
    sc = generate(replace(DEFAULT_CONFIG, n_ads=0))
    assert sc.ads == ()
    assert len(sc.tds) == DEFAULT_CONFIG.n_tds


def test_td_draws_do_not_depend_on_ad_count():
    a = generate(replace(DEFAULT_CONFIG, n_ads=0, seed=9))
    b = generate(replace(DEFAULT_CONFIG, n_ads=30, seed=9))
    assert a.tds == b.tds


def test_ad_draws_do_not_depend_on_td_count():
    a = generate(replace(DEFAULT_CONFIG, n_tds=50, seed=9))
    b = generate(replace(DEFAULT_CONFIG, n_tds=200, seed=9))
    assert a.ads == b.ads


def test_smaller_scenario_is_a_prefix_of_larger():
    small = generate(replace(DEFAULT_CONFIG, n_tds=80, seed=3))
    large = generate(replace(DEFAULT_CONFIG, n_tds=140, seed=3))
    assert large.tds[:80] == small.tds


def test_generated_invariants_hold():
    sc = generate(replace(DEFAULT_CONFIG, n_tds=60, n_ads=15, seed=5))
    gamma = sc.econ.energy_unit_cost
    lo, hi = DEFAULT_CONFIG.deadline_range_s
    for td in sc.tds:
        assert sc.es.energy_per_cycle > td.energy_per_cycle
        assert td.completion_value >= gamma * td.energy_per_cycle * td.task.total_cycles
        assert lo <= td.task.deadline_s <= hi
        s_lo, s_hi = DEFAULT_CONFIG.task_size_range_bits
        assert s_lo <= td.task.size_bits <= s_hi
    tuples = {(td.task.deadline_s, td.task.size_bits, td.satisfaction,
               td.energy_per_cycle, td.bs_distance_m) for td in sc.tds}
    assert len(tuples) == len(sc.tds)  # no two devices share a full tuple
    for ad in sc.ads:
        c_lo, c_hi = DEFAULT_CONFIG.ad_capacity_range_hz
        assert c_lo <= ad.capacity_hz <= c_hi


def test_contexts_align_with_devices():
    sc = generate(replace(DEFAULT_CONFIG, n_tds=10, seed=0))
    ctxs = follower_contexts(sc)
    assert [c.td.id for c in ctxs] == list(range(10))
    leads = leader_contexts(sc)
    assert all(lead.tolerance == DEFAULT_CONFIG.bisection_eps for lead in leads)


def test_config_validation_rejects_bad_values():
    with pytest.raises(ValueError):
        replace(DEFAULT_CONFIG, deadline_range_s=(3.0, 0.05)).validate()
    with pytest.raises(ValueError):
        replace(DEFAULT_CONFIG, es_energy_jpc=0.9e-9).validate()  # below TD range top
    with pytest.raises(ValueError):
        replace(DEFAULT_CONFIG, n_tds=-1).validate()
    with pytest.raises(ValueError):
        replace(DEFAULT_CONFIG, steps_l=0).validate()
    with pytest.raises(ValueError):
        replace(DEFAULT_CONFIG, completion_value_margin=0.5).validate()


# --------------------------------------------------------------------------
# flat key = value files
# --------------------------------------------------------------------------

def test_config_text_round_trip(tmp_path):
    config = replace(DEFAULT_CONFIG, n_tds=123, seed=77,
                     satisfaction_range=(111.5, 222.25), pathloss_decay=False)
    path = tmp_path / "scenario.cfg"
    save_config(config, path)
    assert load_config(path) == config


def test_config_text_format_and_comments():
    text = config_to_text(DEFAULT_CONFIG)
    assert text.startswith("#")
    assert "n_tds = 100" in text
    assert "deadline_range_s = 0.05..3.0" in text
    parsed = config_from_text("# comment\n\nn_tds = 7\nad_bid_range = 1e-10..2e-10\n")
    assert parsed.n_tds == 7
    assert parsed.ad_bid_range == (1e-10, 2e-10)


def test_config_text_diagnostics():
    with pytest.raises(ValueError, match="line 1"):
        config_from_text("nonsense line")
    with pytest.raises(ValueError, match="unknown config key"):
        config_from_text("not_a_key = 3")
    with pytest.raises(ValueError, match="low..high"):
        config_from_text("deadline_range_s = 5")
    with pytest.raises(ValueError, match="true/false"):
        config_from_text("pathloss_decay = yes")


# --------------------------------------------------------------------------
# calibration
# --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def calibrated():
    return calibrate(DEFAULT_CONFIG, 100)


def test_default_config_is_calibrated_fixed_point(calibrated):
    # stock defaults already sit in the demand band, so calibration is a no-op
    assert calibrated == DEFAULT_CONFIG
    assert calibrate(calibrated, 100) == calibrated


def test_calibrated_demand_near_capacity(calibrated):
    ratio = demand_ratio(calibrated, 100)
    assert 0.8 <= ratio <= 1.2
    assert abs(ratio - 1.0) <= 0.1  # within ten percent of capacity


def test_calibration_from_detuned_start_converges():
    detuned = replace(DEFAULT_CONFIG, satisfaction_range=(10.0, 20.0))
    out = calibrate(detuned, 100)
    assert 0.9 <= demand_ratio(out, 100) <= 1.1
    lo, hi = out.satisfaction_range
    assert hi / lo == pytest.approx(2.0)  # only the scale moves


def test_doubling_capacity_halves_utilization(calibrated):
    ratio = demand_ratio(calibrated, 100, seeds=CALIBRATION_SEEDS[:5])
    doubled = replace(calibrated, es_capacity_hz=2 * calibrated.es_capacity_hz)
    assert demand_ratio(doubled, 100, seeds=CALIBRATION_SEEDS[:5]) \
        == pytest.approx(ratio / 2, rel=1e-9)


def test_scenario_demand_positive_and_finite():
    demand = scenario_demand(generate(replace(DEFAULT_CONFIG, seed=0)))
    assert 0 < demand < float("inf")


def test_calibrate_rejects_bad_target():
    with pytest.raises(ValueError):
        calibrate(DEFAULT_CONFIG, 0)
