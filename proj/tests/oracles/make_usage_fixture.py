#!/usr/bin/env python3
"""Writes the ingestion fixtures: a 1000-row usage table, the same rows
shuffled, and a small table whose bins are easy to compute by hand."""
import pathlib
import random
import sys

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")
out.mkdir(parents=True, exist_ok=True)

rng = random.Random(1234)
machines = [f"m{rng.randrange(10**6, 10**7)}" for _ in range(8)]
rows = []
for _ in range(1000):
    m = rng.choice(machines)
    t = rng.randrange(0, 3600 * 10**6)           # one hour, microseconds
    rows.append((t, m, round(rng.random(), 6), round(rng.random(), 6), round(rng.random() * 5, 6)))

header = "start_time,machine_id,cpu,mem,disk_io\n"


def dump(name, rs):
    with open(out / name, "w") as f:
        f.write(header)
        for t, m, c, me, d in rs:
            f.write(f"{t},{m},{c},{me},{d}\n")


rows.sort()
dump("usage_1000.csv", rows)
shuffled = rows[:]
random.Random(99).shuffle(shuffled)
dump("usage_1000_shuffled.csv", shuffled)

# 60 s bins. m_b appears first (t=0); m_a starts at 30 s.
#   bin 0 [0, 60):    m_b cpu (0.2 + 0.4) / 2 = 0.3   m_a cpu 0.6
#   bin 1 [60, 120):  m_b empty -> 0.3 (filled)        m_a cpu 0.8
#   bin 2 [120, 180): m_b cpu 0.5                      m_a empty -> 0.8 (filled)
small = [
    (0, "m_b", 0.2, 0.1, 1.0),
    (30_000_000, "m_b", 0.4, 0.3, 3.0),
    (30_000_000, "m_a", 0.6, 0.5, 2.0),
    (90_000_000, "m_a", 0.8, 0.7, 4.0),
    (150_000_000, "m_b", 0.5, 0.2, 0.0),
]
dump("usage_small.csv", small)
