import math

import pytest

import misanthrope as m


def test_tasep_validates():
    ok, checks = m.validate(m.tasep())
    assert ok
    assert checks["A"] and checks["B"] and checks["C"]


def test_flux_oracles():
    fam = m.EquilibriumFamily(m.tasep())
    for v in (0.1, 0.5, 0.9):
        assert abs(fam.flux_hat(v) - v * (1 - v)) < 1e-10
    d = fam.flux_derivatives(0.5)
    assert abs(d["a0"] - 0.25) < 1e-6 and abs(d["b0"]) < 1e-6 and abs(d["c0"] + 2) < 1e-6
    zr = m.EquilibriumFamily(m.zero_range_linear())
    assert abs(zr.flux_hat(1.7) - 1.7) < 1e-10


def test_theta_round_trip_and_domain():
    fam = m.EquilibriumFamily(m.k_exclusion(2))
    for v in (0.2, 1.0, 1.7):
        assert abs(fam.v_of_theta(fam.theta_of_v(v)) - v) < 1e-12
    with pytest.raises(m.DomainError):
        fam.theta_of_v(2.5)


def test_burgers():
    n = 1024
    u0 = [0.5 * math.sin(2 * math.pi * i / n) for i in range(n)]
    assert abs(m.shock_time(u0, -2.0) - 1 / (2 * math.pi)) < 1e-6
    ch = m.solve_characteristics(u0, -2.0, 0.05, n)
    gd = m.solve_godunov(u0, -2.0, 0.05, n)
    assert sum(abs(a - b) for a, b in zip(ch, gd)) / n < 1e-3
    with pytest.raises(m.HorizonError):
        m.solve_characteristics(u0, -2.0, 0.16, n)


def test_spectral_and_kurschak():
    rows = m.gap_sweep(m.tasep(), [2, 3])
    assert min(r["gap"] for r in rows if r["l"] == 2) == pytest.approx(1.0)
    sw = m.equivalence_sweep(m.tasep(), 0.5, [2, 4, 6, 8])
    assert sw["points"][0]["abs_error"] == pytest.approx(0.25)
    k = m.kurschak_probe(64, samples=20000)
    assert k["limit"] == pytest.approx(1 / math.sqrt(0.7))
    assert k["estimate"] <= 1.8


def test_compare_small_and_refusal():
    cfg = {"model": {"kind": "tasep"}, "N": 300, "beta": 0.15, "times": [0.02], "replicas": 2, "seed": 1}
    s = m.compare(cfg)
    assert s["schema_version"] == 1
    assert len(s["times"][0]["statistics"]) == 4
    assert s["times"] == m.compare(cfg)["times"]
    with pytest.raises(m.HorizonError):
        m.compare(dict(cfg, T=0.2, times=[0.2]))
    with pytest.raises(m.ConfigError):
        m.compare(dict(cfg, colour=1))


def test_seed_plan():
    assert m.seed_plan(1, 0, 0) != m.seed_plan(1, 1, 0)
    assert m.seed_plan(1, 5, 3) == m.seed_plan(1, 5, 3)
