"""Sum 64 values with the built-in recursive-doubling reduction and
compare the cycle bill across machine variants: the regular
neighbourhood networks finish in log2(N) cheap transfer-add steps, while
a machine that leans on the global router for everything pays the
per-pass setup at every step.

    python3 demos/05_reduction_case_study.py
"""

import random

from mppsoc import MpNocKind, MppSoCConfig, Neighborhood, reduce_sum

N = 64
VARIANTS = [
    ("linear 1x64", dict(rows=1, cols=64, neighborhood=Neighborhood.LINEAR)),
    ("ring 1x64", dict(rows=1, cols=64, neighborhood=Neighborhood.RING)),
    ("mesh 8x8", dict(rows=8, cols=8, neighborhood=Neighborhood.MESH2D)),
    ("torus 8x8", dict(rows=8, cols=8, neighborhood=Neighborhood.TORUS2D)),
    ("xnet 8x8", dict(rows=8, cols=8, neighborhood=Neighborhood.XNET)),
    ("crossbar only", dict(rows=8, cols=8, mpnoc=MpNocKind.CROSSBAR)),
    ("omega only", dict(rows=8, cols=8, mpnoc=MpNocKind.DELTA_OMEGA)),
    ("bus only", dict(rows=8, cols=8, mpnoc=MpNocKind.SHARED_BUS)),
]


def main():
    rng = random.Random(2024)
    values = [rng.randint(-1000, 1000) for _ in range(N)]
    print(f"Reducing {N} values, expected sum {sum(values)}\n")
    print(f"{'machine':14s} {'sum':>8s} {'steps':>6s} {'cycles':>7s}  per-step transport")
    for name, fields in VARIANTS:
        config = MppSoCConfig(acu_mem_bytes=4096, pe_mem_bytes=1024, **fields)
        report = reduce_sum(config, values)
        transport = ",".join(str(h) for h in report.per_step_hop_counts)
        print(f"{name:14s} {report.result:>8d} {report.transfer_add_steps:>6d} "
              f"{report.total_cycles:>7d}  [{transport}]")


if __name__ == "__main__":
    main()
