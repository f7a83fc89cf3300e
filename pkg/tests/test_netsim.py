import heapq
import math

import numpy as np
import pytest

from actcomp.errors import InvalidConfig, SlaInfeasible
from actcomp.netsim import (
    SimConfig,
    bandwidth_bound_preset,
    capacity_search,
    compute_bound_preset,
    format_config,
    parse_config,
    payload_bytes,
    poisson_arrivals,
    simulate,
    single_request_latency,
)


def test_payload_bytes_anchor():
    assert payload_bytes(81920, 4096, 1) == 1342177280 == int(1.25 * 2**30)
    assert payload_bytes(1, 1, 1) == 4
    assert payload_bytes(512, 2048, 8) == 524288
    assert payload_bytes(3, 1, 8) == 2  # ceil(12 / 8)
    with pytest.raises(ValueError):
        payload_bytes(0, 1, 1)


@pytest.mark.parametrize(
    "changes",
    [
        {},
        {"link_sharing": "dedicated"},
        {"compression_ratio": 10.3, "compress_s": 0.004},
        {"per_token": True, "tokens_per_request": 64},
        {"per_token": True, "tokens_per_request": 64, "link_rate": 1e7},
    ],
)
def test_isolated_request_matches_closed_form(changes):
    cfg = SimConfig(request_rate=0.001, sim_duration=10, warmup_fraction=0, **changes)
    res = simulate(cfg, arrivals=[[1.0]])
    assert res.completed == 1
    expected = single_request_latency(cfg)
    if not cfg.per_token:
        expected_sum = cfg.client_compute_s + cfg.compress_s + cfg.request_bytes * 8 / cfg.link_rate + 1 / cfg.server_rate
        assert expected == pytest.approx(expected_sum, rel=1e-12)
    assert res.mean_response_s == pytest.approx(expected, rel=1e-9)
    assert res.breakdown["queue"] == pytest.approx(0, abs=1e-12)


def tandem_oracle(cfg, arrivals):
    """Responses by direct station recursions; independent of the event loop."""
    c = cfg.client_compute_s + cfg.compress_s
    tx = cfg.transmit_s
    svc = 1 / cfg.server_rate
    recs = []
    for client, times in enumerate(arrivals):
        free = 0.0
        for a in times:  # per-client device: Lindley recursion
            free = max(a, free) + c
            recs.append((free, a, client))
    recs.sort()
    link_free = {}
    after_link = []
    for dev_done, a, client in recs:
        key = 0 if cfg.link_sharing == "shared" else client
        t = max(dev_done, link_free.get(key, 0.0)) + tx
        link_free[key] = t
        after_link.append((t, a))
    after_link.sort()
    servers = [0.0] * cfg.n_servers
    out = []
    for t, a in after_link:
        start = max(t, heapq.heappop(servers))
        heapq.heappush(servers, start + svc)
        out.append((a, start + svc - a))
    return out


@pytest.mark.parametrize("sharing", ["shared", "dedicated"])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_event_loop_matches_tandem_recursion(sharing, seed):
    cfg = SimConfig(
        n_clients=12, link_rate=2e8, n_servers=3, server_rate=5.0, client_compute_s=0.05,
        compress_s=0.01, tokens_per_request=256, hidden_size=512, compression_ratio=2.0,
        request_rate=1.0, sim_duration=30.0, seed=seed, link_sharing=sharing,
    )
    arr = poisson_arrivals(cfg)
    res = simulate(cfg, arr)
    ref = tandem_oracle(cfg, arr)
    warm = 0.1 * cfg.sim_duration
    ref_resp = np.array([r for a, r in ref if a >= warm])
    assert res.measured == ref_resp.size
    assert res.mean_response_s == pytest.approx(ref_resp.mean(), rel=1e-9)
    assert res.p95_response_s == pytest.approx(np.percentile(ref_resp, 95), rel=1e-9)


def test_deterministic_and_conserving():
    cfg = bandwidth_bound_preset(n_clients=200)
    a, b = simulate(cfg), simulate(cfg)
    np.testing.assert_array_equal(a.responses, b.responses)
    assert a.mean_response_s == b.mean_response_s
    assert a.completed + a.dropped + a.in_flight == a.arrivals
    assert a.in_flight == 0
    assert simulate(cfg.replace(seed=8)).mean_response_s != a.mean_response_s


def test_response_lower_bound():
    cfg = compute_bound_preset(ratio=4)
    res = simulate(cfg)
    assert res.responses.min() >= single_request_latency(cfg) - 1e-12


def test_adding_clients_keeps_existing_arrivals():
    cfg = SimConfig(n_clients=3, seed=5)
    small = poisson_arrivals(cfg)
    big = poisson_arrivals(cfg.replace(n_clients=6))
    for x, y in zip(small, big):
        np.testing.assert_array_equal(x, y)


@pytest.mark.parametrize("n", [20, 100, 400])
def test_littles_law(n):
    cfg = bandwidth_bound_preset(n_clients=n, ratio=4)
    res = simulate(cfg)
    assert res.server_utilization < 0.9
    lam = n * cfg.request_rate
    assert res.mean_in_system == pytest.approx(lam * res.mean_response_s, rel=0.10)


def test_compute_bound_insensitive_to_link():
    for ratio in (1, 10.3):
        slow = simulate(compute_bound_preset(link_gbps=1, ratio=ratio))
        fast = simulate(compute_bound_preset(link_gbps=10, ratio=ratio))
        assert slow.server_utilization >= 1
        assert abs(fast.mean_response_s - slow.mean_response_s) / slow.mean_response_s < 0.01


def test_capacity_tiny_rate():
    cfg = SimConfig(request_rate=1e-3, sim_duration=100)
    sla = single_request_latency(cfg) * 1.01
    assert capacity_search(cfg, sla) >= 1


def test_capacity_infeasible():
    cfg = SimConfig()
    with pytest.raises(SlaInfeasible):
        capacity_search(cfg, single_request_latency(cfg))


def test_capacity_doubles_with_server_rate():
    # derived: utilization-limited capacity is n = rho * k * mu / lambda, linear in mu
    base = compute_bound_preset().replace(request_rate=0.05)
    for seed in (1, 2, 3):
        c1 = capacity_search(base.replace(seed=seed), 1.0)
        c2 = capacity_search(base.replace(seed=seed, server_rate=20.0), 1.0)
        assert 2 * 0.85 <= c2 / c1 <= 2 * 1.15


@pytest.mark.slow
def test_capacity_linear_in_ratio():
    caps = {}
    for r in (2, 4, 8):
        cfg = bandwidth_bound_preset(ratio=r).replace(compress_s=0.0)
        caps[r] = capacity_search(cfg, 0.5)
        assert cfg.replace(n_clients=caps[r]).offered_load <= 0.5
    assert caps[4] / caps[2] == pytest.approx(2, rel=0.10)
    assert caps[8] / caps[2] == pytest.approx(4, rel=0.10)


def test_bandwidth_bound_capacity_ratio():
    sla = 0.25
    c1 = capacity_search(bandwidth_bound_preset(ratio=1), sla)
    c10 = capacity_search(bandwidth_bound_preset(ratio=10.3), sla)
    assert c10 / c1 >= 8


def test_config_round_trip_and_errors():
    cfg = bandwidth_bound_preset(ratio=10.3).replace(per_token=True, link_sharing="dedicated")
    assert parse_config(format_config(cfg)) == cfg
    text = "n_clients = 4  # comment\n\nlink_rate = 1e10\nper_token = yes\n"
    parsed = parse_config(text)
    assert (parsed.n_clients, parsed.link_rate, parsed.per_token) == (4, 1e10, True)
    for bad in ("bogus = 1", "n_clients = two", "n_clients", "n_clients = 0", "link_sharing = mesh"):
        with pytest.raises(InvalidConfig):
            parse_config(bad)
    with pytest.raises(InvalidConfig):
        simulate(SimConfig(n_clients=2), arrivals=[[0.0]])
