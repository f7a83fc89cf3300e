"""Multi-client split inference: when does compressing the uplink help?

Run:  python demos/network_regimes.py

Compute-bound: one overloaded server. A faster network changes nothing.
Bandwidth-bound: long-context payloads on a shared 10 Gb/s uplink. Compressing
by ~10x lets roughly 10x more clients meet the same latency target.
"""

from actcomp.netsim import (
    bandwidth_bound_preset,
    capacity_search,
    compute_bound_preset,
    payload_bytes,
    simulate,
)


def main():
    gib = payload_bytes(81920, 4096, 1) / 2**30
    print(f"81,920 tokens x 4096 hidden x 4 B = {gib:.2f} GiB per request uncompressed")

    print("\ncompute-bound (1 server, offered load 2x capacity)")
    for gbps in (1, 10):
        res = simulate(compute_bound_preset(link_gbps=gbps))
        print(f"  {gbps:2d} Gb/s: mean {res.mean_response_s:7.3f}s  p95 {res.p95_response_s:7.3f}s")

    print("\nbandwidth-bound (8 servers, shared 10 Gb/s uplink), SLA 0.25 s")
    for ratio in (1, 4, 10.3):
        cap = capacity_search(bandwidth_bound_preset(ratio=ratio), 0.25)
        print(f"  ratio {ratio:5.1f}: {cap:5d} clients")


if __name__ == "__main__":
    main()
