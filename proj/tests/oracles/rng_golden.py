#!/usr/bin/env python3
"""Independent xorshift64* reference: prints the first N draws for a seed.

Usage: rng_golden.py [seed] [count] > tests/fixtures/rng_seed42.txt
       rng_golden.py --check tests/fixtures/rng_seed42.txt
"""
import sys

MASK = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def stream(seed):
    state = splitmix64(seed) or 0x9E3779B97F4A7C15
    while True:
        state ^= state >> 12
        state ^= (state << 25) & MASK
        state ^= state >> 27
        yield (state * 0x2545F4914F6CDD1D) & MASK


def main():
    if len(sys.argv) == 3 and sys.argv[1] == "--check":
        stored = [int(v) for v in open(sys.argv[2]).read().split()]
        gen = stream(42)
        expected = [next(gen) for _ in stored]
        if stored != expected:
            print("fixture does not match the reference generator")
            sys.exit(1)
        print(f"{len(stored)} draws match")
        return
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 42
    count = int(sys.argv[2]) if len(sys.argv) > 2 else 100
    gen = stream(seed)
    for _ in range(count):
        print(next(gen))


if __name__ == "__main__":
    main()
