"""Discrete-event simulation of multi-client split inference.

Each request visits three FIFO stations in tandem:

1. the client's own device (layer-1 forward, then compression),
2. the uplink, either one channel shared by all clients (default) or a
   dedicated link per client,
3. a pool of ``n_servers`` identical servers with deterministic service time
   ``1 / server_rate``.

Arrivals are Poisson per client. Client ``i`` draws its arrivals from child
stream ``i`` of the config seed, so adding clients never perturbs the arrival
times of the existing ones.
"""

from __future__ import annotations

import csv
import dataclasses
import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidConfig, SlaInfeasible
from .rng import SplitMix64

RESULT_HEADER = ("n_clients", "link_gbps", "ratio", "mean_s", "p95_s", "utilization")


def payload_bytes(tokens: int, D: int, ratio: float, bytes_per_value: int = 4) -> int:
    """Bytes on the wire for ``tokens`` activation rows of width D at a compression ratio.

    >>> payload_bytes(81920, 4096, 1)
    1342177280
    """
    if tokens < 1 or D < 1 or not ratio > 0:
        raise ValueError("tokens, D and ratio must be positive")
    raw = tokens * D * bytes_per_value
    if ratio == 1:
        return raw
    return math.ceil(raw / ratio)


@dataclass(frozen=True)
class SimConfig:
    n_clients: int = 1
    link_rate: float = 1e9  # bits/s
    n_servers: int = 1
    server_rate: float = 10.0  # requests/s per server
    client_compute_s: float = 0.02
    compress_s: float = 0.0
    tokens_per_request: int = 512
    hidden_size: int = 2048
    bytes_per_value: int = 4
    compression_ratio: float = 1.0
    request_rate: float = 1.0  # requests/s per client
    sim_duration: float = 60.0
    seed: int = 0
    queue_discipline: str = "fifo"
    link_sharing: str = "shared"  # or "dedicated"
    per_token: bool = False
    drain: bool = True
    warmup_fraction: float = 0.1

    def __post_init__(self):
        problems = []
        for name in ("n_clients", "n_servers", "tokens_per_request", "hidden_size", "bytes_per_value"):
            if int(getattr(self, name)) < 1:
                problems.append(f"{name} must be >= 1")
        for name in ("link_rate", "server_rate", "request_rate", "sim_duration"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be > 0")
        for name in ("client_compute_s", "compress_s"):
            if getattr(self, name) < 0:
                problems.append(f"{name} must be >= 0")
        if not self.compression_ratio >= 1:
            problems.append("compression_ratio must be >= 1")
        if self.queue_discipline != "fifo":
            problems.append("queue_discipline must be 'fifo'")
        if self.link_sharing not in ("shared", "dedicated"):
            problems.append("link_sharing must be 'shared' or 'dedicated'")
        if not 0 <= self.warmup_fraction < 1:
            problems.append("warmup_fraction must be in [0, 1)")
        if problems:
            raise InvalidConfig("; ".join(problems))

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    @property
    def request_bytes(self) -> int:
        return payload_bytes(self.tokens_per_request, self.hidden_size, self.compression_ratio, self.bytes_per_value)

    @property
    def transmit_s(self) -> float:
        return self.request_bytes * 8 / self.link_rate

    @property
    def offered_load(self) -> float:
        """Arrival rate over pooled service capacity; >= 1 means the servers saturate."""
        return self.n_clients * self.request_rate / (self.n_servers * self.server_rate)


def single_request_latency(cfg: SimConfig) -> float:
    """Response time of a request that meets no queueing anywhere."""
    if cfg.per_token:
        t = cfg.tokens_per_request
        per_tok_tx = payload_bytes(1, cfg.hidden_size, cfg.compression_ratio, cfg.bytes_per_value) * 8 / cfg.link_rate
        per_tok_dev = (cfg.client_compute_s + cfg.compress_s) / t
        # the link pipeline drains one packet per max(device, link) step
        transmit_done = per_tok_dev + per_tok_tx + (t - 1) * max(per_tok_dev, per_tok_tx)
        return transmit_done + 1.0 / cfg.server_rate
    return cfg.client_compute_s + cfg.compress_s + cfg.transmit_s + 1.0 / cfg.server_rate


@dataclass
class SimResult:
    config: SimConfig
    mean_response_s: float
    p95_response_s: float
    server_utilization: float
    completed: int
    dropped: int
    in_flight: int
    arrivals: int
    measured: int
    mean_in_system: float
    breakdown: dict = field(default_factory=dict)
    responses: Optional[np.ndarray] = field(default=None, repr=False)

    def csv_row(self) -> list:
        c = self.config
        return [
            c.n_clients,
            f"{c.link_rate / 1e9:.9g}",
            f"{c.compression_ratio:.9g}",
            f"{self.mean_response_s:.9g}",
            f"{self.p95_response_s:.9g}",
            f"{self.server_utilization:.9g}",
        ]


def poisson_arrivals(cfg: SimConfig) -> list[np.ndarray]:
    """Per-client sorted arrival times in [0, sim_duration)."""
    root = SplitMix64(cfg.seed)
    out = []
    horizon = cfg.sim_duration
    mean_count = cfg.request_rate * horizon
    for i in range(cfg.n_clients):
        stream = root.split(i)
        times = np.empty(0)
        last = 0.0
        while last < horizon:
            n = int(mean_count + 6 * math.sqrt(mean_count) + 16)
            chunk = last + np.cumsum(stream.exponential(cfg.request_rate, n))
            times = np.concatenate([times, chunk])
            last = chunk[-1]
        out.append(times[times < horizon])
    return out


class _Station:
    """FIFO queue in front of ``servers`` parallel servers."""

    __slots__ = ("servers", "busy", "queue")

    def __init__(self, servers: int):
        self.servers = servers
        self.busy = 0
        self.queue: deque = deque()


def simulate(cfg: SimConfig, arrivals: Optional[Sequence[Sequence[float]]] = None) -> SimResult:
    """Run the event loop; ``arrivals`` overrides the Poisson process (one list per client)."""
    if arrivals is None:
        arrivals = poisson_arrivals(cfg)
    elif len(arrivals) != cfg.n_clients:
        raise InvalidConfig(f"got arrival lists for {len(arrivals)} clients, config has {cfg.n_clients}")

    client_of = []
    arrive = []
    for c, times in enumerate(arrivals):
        for t in times:
            client_of.append(c)
            arrive.append(float(t))
    n_req = len(arrive)
    arrive_arr = np.array(arrive)
    order = np.argsort(arrive_arr, kind="stable")

    tokens = cfg.tokens_per_request if cfg.per_token else 1
    dev_service = (cfg.client_compute_s + cfg.compress_s) / tokens
    if cfg.per_token:
        link_service = payload_bytes(1, cfg.hidden_size, cfg.compression_ratio, cfg.bytes_per_value) * 8 / cfg.link_rate
    else:
        link_service = cfg.transmit_s
    srv_service = 1.0 / cfg.server_rate

    devices = [_Station(1) for _ in range(cfg.n_clients)]
    links = [_Station(1)] if cfg.link_sharing == "shared" else [_Station(1) for _ in range(cfg.n_clients)]
    pool = _Station(cfg.n_servers)

    tx_total = np.zeros(n_req)
    pending_tokens = np.full(n_req, tokens, dtype=np.int64)
    done = np.full(n_req, np.nan)

    # event kinds
    ARRIVE, DEV_DONE, LINK_DONE, SRV_DONE = 0, 1, 2, 3
    heap: list = []
    seq = 0

    def push(t, kind, req, tok=0):
        nonlocal seq
        heapq.heappush(heap, (t, seq, kind, req, tok))
        seq += 1

    def offer(station, now, job, service, kind):
        # job = (req, tok, enqueue_time)
        if station.busy < station.servers:
            station.busy += 1
            push(now + service, kind, job[0], job[1])
        else:
            station.queue.append(job)

    def release(station, now, service, kind):
        if station.queue:
            req, tok, _ = station.queue.popleft()
            push(now + service, kind, req, tok)
        else:
            station.busy -= 1

    for r in order:
        push(arrive[r], ARRIVE, int(r))

    end = math.inf if cfg.drain else cfg.sim_duration
    warm = cfg.warmup_fraction * cfg.sim_duration
    in_system = 0
    area = 0.0
    last_t = warm
    now = 0.0

    while heap:
        now, _, kind, req, tok = heap[0]
        if now > end:
            break
        heapq.heappop(heap)
        # time-average population over [warm, sim_duration]
        if now > last_t:
            upto = min(now, cfg.sim_duration)
            if upto > last_t:
                area += in_system * (upto - last_t)
                last_t = upto

        if kind == ARRIVE:
            in_system += 1
            dev = devices[client_of[req]]
            for k in range(tokens):
                offer(dev, now, (req, k, now), dev_service, DEV_DONE)
        elif kind == DEV_DONE:
            release(devices[client_of[req]], now, dev_service, DEV_DONE)
            link = links[0] if len(links) == 1 else links[client_of[req]]
            offer(link, now, (req, tok, now), link_service, LINK_DONE)
        elif kind == LINK_DONE:
            link = links[0] if len(links) == 1 else links[client_of[req]]
            release(link, now, link_service, LINK_DONE)
            tx_total[req] += link_service
            pending_tokens[req] -= 1
            if pending_tokens[req] == 0:
                offer(pool, now, (req, 0, now), srv_service, SRV_DONE)
        else:
            release(pool, now, srv_service, SRV_DONE)
            done[req] = now
            in_system -= 1

    if cfg.sim_duration > last_t:
        area += in_system * (cfg.sim_duration - last_t)

    completed_mask = ~np.isnan(done)
    window = (arrive_arr >= warm) & (arrive_arr < cfg.sim_duration)
    measured = window & completed_mask
    resp = (done - arrive_arr)[measured]

    if resp.size:
        mean_r = float(resp.mean())
        p95 = float(np.percentile(resp, 95))
        breakdown = {
            "compute": dev_service * tokens,
            "transmit": float(tx_total[measured].mean()),
            # contention only: excess over the unloaded pipeline latency
            "queue": max(0.0, mean_r - single_request_latency(cfg)),
            "serve": srv_service,
        }
    else:
        mean_r = p95 = math.nan
        breakdown = {"compute": math.nan, "transmit": math.nan, "queue": math.nan, "serve": math.nan}

    span = cfg.sim_duration - warm
    completed = int(completed_mask.sum())
    return SimResult(
        config=cfg,
        mean_response_s=mean_r,
        p95_response_s=p95,
        server_utilization=cfg.offered_load,
        completed=completed,
        dropped=0,
        in_flight=n_req - completed,
        arrivals=n_req,
        measured=int(measured.sum()),
        mean_in_system=area / span if span > 0 else math.nan,
        breakdown=breakdown,
        responses=resp,
    )


def capacity_search(cfg: SimConfig, sla_s: float, max_clients: int = 1 << 16) -> int:
    """Largest ``n_clients`` whose mean response stays within ``sla_s``.

    Doubles ``n_clients`` until the SLA breaks, then bisects. Each probe
    reuses the config seed, so probes share the arrivals of common clients.
    """
    base = single_request_latency(cfg.replace(n_clients=1))
    if sla_s <= base:
        raise SlaInfeasible(f"SLA {sla_s:.6g}s is not above the unloaded latency {base:.6g}s")

    def ok(n: int) -> bool:
        m = simulate(cfg.replace(n_clients=n)).mean_response_s
        return math.isnan(m) or m <= sla_s

    if not ok(1):
        raise SlaInfeasible(f"a single client already exceeds the SLA of {sla_s:.6g}s")
    lo, hi = 1, 2
    while hi <= max_clients and ok(hi):
        lo, hi = hi, hi * 2
    if hi > max_clients:
        return lo if not ok(max_clients) else max_clients
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


# --- presets ------------------------------------------------------------------


def compute_bound_preset(link_gbps: float = 1.0, ratio: float = 1.0, seed: int = 7) -> SimConfig:
    """One server, offered load twice its capacity; the link is never the bottleneck."""
    return SimConfig(
        n_clients=16,
        link_rate=link_gbps * 1e9,
        n_servers=1,
        server_rate=10.0,
        client_compute_s=0.02,
        compress_s=0.0 if ratio == 1 else 0.005,
        tokens_per_request=512,
        hidden_size=2048,
        compression_ratio=ratio,
        request_rate=1.25,
        sim_duration=60.0,
        seed=seed,
    )


def bandwidth_bound_preset(ratio: float = 1.0, link_gbps: float = 10.0, n_clients: int = 100, seed: int = 7) -> SimConfig:
    """Eight servers with ample headroom; a shared uplink carries long-context activations."""
    return SimConfig(
        n_clients=n_clients,
        link_rate=link_gbps * 1e9,
        n_servers=8,
        server_rate=100.0,
        client_compute_s=0.02,
        compress_s=0.0 if ratio == 1 else 0.005,
        tokens_per_request=4096,
        hidden_size=2048,
        compression_ratio=ratio,
        request_rate=0.25,
        sim_duration=40.0,
        seed=seed,
    )


# --- config / result files -------------------------------------------------------

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def parse_config(text: str) -> SimConfig:
    """Parse ``key = value`` lines (``#`` comments) into a SimConfig."""
    types = {f.name: f.type for f in dataclasses.fields(SimConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in types:
            raise InvalidConfig(f"line {lineno}: unknown key {key!r}")
        kind = types[key]
        try:
            if kind == "bool":
                low = raw.lower()
                if low not in _BOOL_TRUE | _BOOL_FALSE:
                    raise ValueError(raw)
                values[key] = low in _BOOL_TRUE
            elif kind == "int":
                values[key] = int(float(raw)) if "e" in raw.lower() else int(raw)
            elif kind == "float":
                values[key] = float(raw)
            else:
                values[key] = raw
        except ValueError as exc:
            raise InvalidConfig(f"line {lineno}: bad value for {key}: {raw!r}") from exc
    return SimConfig(**values)


def format_config(cfg: SimConfig) -> str:
    lines = []
    for f in dataclasses.fields(cfg):
        val = getattr(cfg, f.name)
        if isinstance(val, bool):
            val = "true" if val else "false"
        lines.append(f"{f.name} = {val}")
    return "\n".join(lines) + "\n"


def write_results_csv(results: Sequence[SimResult], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(RESULT_HEADER)
    for res in results:
        writer.writerow(res.csv_row())
