"""Reference MT19937-64 used to produce the golden stream in test_numeric.cpp."""
import sys

N, M = 312, 156
MATRIX_A = 0xB5026F5AA96619E9
UPPER, LOWER = 0xFFFFFFFF80000000, 0x7FFFFFFF
MASK = (1 << 64) - 1


def mt64(seed):
    mt = [0] * N
    mt[0] = seed & MASK
    for i in range(1, N):
        mt[i] = (6364136223846793005 * (mt[i - 1] ^ (mt[i - 1] >> 62)) + i) & MASK
    idx = N
    while True:
        if idx >= N:
            for i in range(N):
                x = (mt[i] & UPPER) | (mt[(i + 1) % N] & LOWER)
                xa = x >> 1
                if x & 1:
                    xa ^= MATRIX_A
                mt[i] = mt[(i + M) % N] ^ xa
            idx = 0
        x = mt[idx]
        idx += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        yield x & MASK


if __name__ == "__main__":
    seed = int(sys.argv[1])
    count = int(sys.argv[2])
    g = mt64(seed)
    vals = [next(g) for _ in range(count)]
    print(",\n".join(f"    {v}ULL" for v in vals))
