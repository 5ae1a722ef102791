"""Route a few permutations through each global-router network and show
how many passes the 2x2 switch fabric needs.

    python3 demos/04_router_permutations.py
"""

from itertools import permutations

from mppsoc import MpNocKind, build_network, route_permutation

N = 8
KINDS = (MpNocKind.CROSSBAR, MpNocKind.SHARED_BUS, MpNocKind.DELTA_OMEGA,
         MpNocKind.DELTA_BASELINE, MpNocKind.DELTA_BUTTERFLY)

PATTERNS = {
    "identity": list(range(N)),
    "reversal": list(reversed(range(N))),
    "bit-reversal": [int(format(i, "03b")[::-1], 2) for i in range(N)],
    "rotate-by-1": [(i + 1) % N for i in range(N)],
}


def main():
    print("Passes needed to route each pattern (N = 8):")
    print(f"{'pattern':14s}" + "".join(f"{k.value:>17s}" for k in KINDS))
    for name, perm in PATTERNS.items():
        row = f"{name:14s}"
        for kind in KINDS:
            result = route_permutation(build_network(kind, N), perm)
            row += f"{result.passes:>17d}"
        print(row)

    print("\nFraction of all 8! permutations each delta wiring routes in one pass:")
    for kind in KINDS[2:]:
        net = build_network(kind, N)
        one_pass = sum(1 for p in permutations(range(N))
                       if route_permutation(net, list(p)).passes == 1)
        print(f"  {kind.value:16s} {one_pass}/40320 = {one_pass / 40320:.3f}")


if __name__ == "__main__":
    main()
