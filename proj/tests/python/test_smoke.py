import json
import math

import pytest

import uavcov


def test_link_budget_round_trip():
    a = uavcov.link.A2AParams()
    d = uavcov.link.max_a2a_distance_m(a)
    assert math.isclose(uavcov.link.received_power_dbm(a, d), a.threshold_dbm, rel_tol=1e-9)
    assert math.isclose(uavcov.link.tuav_cover_radius_m(500, 400), 300, rel_tol=1e-12)
    with pytest.raises(uavcov.InfeasibleAltitude):
        uavcov.link.tuav_cover_radius_m(100, 150)


def test_grid_and_collision():
    grid = uavcov.GridSpace((2000, 2000, 200), 20, (120, 180))
    assert grid.shape == (100, 100, 10)
    assert grid.band_layers == (6, 8)
    heights = [0.0] * 10000
    heights[0] = 100
    obstacles = uavcov.ObstacleMap(grid, heights)
    assert uavcov.is_collision(grid, obstacles, 0, 0, 4)
    assert not uavcov.is_collision(grid, obstacles, 0, 0, 6)


def test_rewards():
    assert uavcov.step_reward(20, False, False) == -2
    assert uavcov.step_reward(20, True, False) == 100
    assert uavcov.step_reward(20, False, True) == -102


def test_clustering_meets_threshold():
    users = uavcov.generate_users(3, (2000, 2000), 40)
    assert len(users) == 40
    plan = uavcov.select_hovering_plan(users, (2000, 2000), 500, seed=3)
    assert 0.9 <= plan.coverage_rate <= 1.0
    assert not plan.below_threshold
    assert len(plan.positions) <= 10


def test_planning_matches_oracle():
    grid = uavcov.GridSpace((200, 200, 20), 20, (0, 20))
    obstacles = uavcov.ObstacleMap(grid)
    path = uavcov.shortest_path(grid, obstacles, (0, 0, 0), (4, 4, 0))
    assert len(path) == 9
    oracle = uavcov.plan_mission(grid, obstacles, [(4, 4, 0), (9, 0, 0)], (0, 0, 0), "bfs-oracle")
    learned = uavcov.plan_mission(grid, obstacles, [(4, 4, 0), (9, 0, 0)], (0, 0, 0), "qlutp-star", seed=2)
    assert learned["steps"] >= oracle["steps"]
    assert oracle["loss_m"] == 20 * oracle["steps"]
    assert learned["feasible"]


def test_config_validation():
    normalized = json.loads(uavcov.validate_config("{}"))
    assert normalized["learning"]["gamma"] == 0.6
    with pytest.raises(uavcov.InvalidConfiguration):
        uavcov.validate_config('{"learning": {"alpha": 2}}')
