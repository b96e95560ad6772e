import math

import pytest

import coverage_ph as cp


def test_haversine_one_degree_latitude():
    assert cp.haversine_km(0.0, 0.0, 1.0, 0.0) == pytest.approx(6371.0 * math.pi / 180.0, rel=1e-12)


def test_k_nearest_orders_by_distance():
    adj = cp.k_nearest([(0.0, 0.0), (0.0, 0.1), (0.0, 0.3)], 1)
    assert adj == [[1], [0], [1]]


def test_travel_time_formulas():
    v = cp.vehicle_access_ratio(100, 250)
    assert v == 1.0
    t = cp.origin_weighted_time(30.0, 90.0, 400.0, 0.25)
    assert t == pytest.approx(0.25 * 30.0 + 0.75 * 90.0, abs=1e-12)
    assert cp.origin_weighted_time(30.0, None, 200.0, 0.0) == 200.0
    with pytest.raises(cp.ValidationError, match="stranded"):
        cp.origin_weighted_time(30.0, None, None, 0.5)
    assert cp.symmetrized_dissimilarity(10.0, 20.0, 1.0, 3.0) == pytest.approx(17.5)


def test_square_persistence():
    d = math.sqrt(2.0)
    pairs = cp.persistence(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0), (0, 2, d), (1, 3, d)])
    h1 = [p for p in pairs if p[0] == 1]
    assert len(h1) == 1
    assert h1[0][1] == pytest.approx(1.0, abs=1e-9)
    assert h1[0][2] == pytest.approx(d, abs=1e-9)
    h0 = [p for p in pairs if p[0] == 0]
    assert len(h0) == 4
    assert sum(math.isinf(p[2]) for p in h0) == 1


def test_rank_tests():
    r = cp.mann_whitney([1.0, 2.0], [3.0, 4.0])
    assert r["exact"]
    assert r["p_one_tailed"] == 1.0 / 6.0
    a = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10.5]
    b = [4, 6, 8, 10, 12, 14, 16, 18, 20, 22]
    bm = cp.brunner_munzel(a, b, "less")
    assert bm["statistic"] == pytest.approx(4.131446327675698, rel=1e-10)
    assert bm["p_one_tailed"] == pytest.approx(0.0004568343998574422, rel=1e-8)


def test_trim_and_log():
    assert cp.trim_short_deaths([3.0, 15.0, 40.0, 100.0]) == [40.0, 100.0]
    assert cp.log_transform([1.0, math.e]) == pytest.approx([0.0, 1.0])
    with pytest.raises(ValueError):
        cp.log_transform([0.0])
