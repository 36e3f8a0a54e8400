"""Independent reference values frozen into the C++ tests.

Run: python3 tests/oracles/expected.py
"""
import hashlib
import itertools
import math

import mpmath
import sympy

mpmath.mp.prec = 256


def count_at_most(weights, cap):
    return sum(1 for r in range(len(weights) + 1) for c in itertools.combinations(weights, r) if sum(c) <= cap)


def count_band(weights, lo, hi):
    return sum(1 for r in range(len(weights) + 1) for c in itertools.combinations(weights, r) if lo < sum(c) <= hi)


def split_index(weights, cap):
    s = 0
    for i, w in enumerate(weights, 1):
        s += w
        if 2 * s >= cap:
            return i
    return len(weights)


def popular(weights, cap, ell):
    istar = split_index(weights, cap)
    sel = [w for w in weights[:istar] if cap < w * ell <= 2 * cap]
    return len(sel), sum(sel)


def find_popular_ell(weights, cap):
    top = math.ceil(math.log2(4 * len(weights)))
    best, best_w = None, 0
    for e in range(1, top + 1):
        _, w = popular(weights, cap, 2**e)
        if w > best_w:
            best, best_w = 2**e, w
    return best


def class_of(w, cap, n):
    g = math.ceil(math.log2(n))
    j = 1
    while j <= g and w * 2**j <= cap:
        j += 1
    return 2**j


small = [2, 3, 5]
mid = [3, 7, 12, 19, 25, 31, 44, 58, 60, 71, 80, 95]
powers = [2**i for i in range(20)]
mixed = [17, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103]

print("count small T=5", count_at_most(small, 5))
print("count mid T=150", count_at_most(mid, 150))
print("count powers T=2^19+12345", min(2**19 + 12345, 2**20 - 1) + 1)
print("count mixed T=600", count_at_most(mixed, 600))
print("count_at_most mid cap=-1", count_at_most(mid, -1), "cap=0", count_at_most(mid, 0))
print("band mid (100,160]", count_band(mid, 100, 160))
print("band mixed (600,700]", count_band(mixed, 600, 700))

a = [2**100 + 1, 3, 2**64 - 1]
b = [5, 2**90, 7, 1]
conv = [sum(a[i] * b[k - i] for i in range(len(a)) if 0 <= k - i < len(b)) for k in range(len(a) + len(b) - 1)]
print("conv", conv)

vals, t, p = [1, 2, 2, 3, 5], 8, 7
counts = [0] * (t + 1)
for r in range(len(vals) + 1):
    for c in itertools.combinations(vals, r):
        if sum(c) <= t:
            counts[sum(c)] += 1
print("subset sums mod 7", [x % p for x in counts], "raw", counts)
print("nextprime check 1009", sympy.isprime(1009))

print("level_scale 1e12 h=3 d=12.5", int(mpmath.ceil(mpmath.mpf(10**12) / (mpmath.power(2, mpmath.mpf(3) / 2) * mpmath.mpf(12.5)))))
print("level_scale 1000 h=0 d=3", int(mpmath.ceil(mpmath.mpf(1000) / 3)))
print("level_scale 5 h=10 d=100", max(1, int(mpmath.ceil(mpmath.mpf(5) / (32 * 100)))))

need = math.ceil((3 / 0.25) ** 3)
q = -(-need // 2)
print("scale_factor small", 1 if q <= 1 else 2 ** (q - 1).bit_length())
need = math.ceil((12 / 0.25) ** 3)
q = -(-need // 3)
print("scale_factor mid", 1 if q <= 1 else 2 ** (q - 1).bit_length())

print("split_index mid T=150", split_index(mid, 150))
print("find_popular_ell mid T=150", find_popular_ell(mid, 150), [popular(mid, 150, 2**e) for e in range(1, 7)])
print("classes mid T=150", [class_of(w, 150, len(mid)) for w in mid])
print("split_index mixed T=600", split_index(mixed, 600), "ell", find_popular_ell(mixed, 600))

tiny = [9, 5, 4, 2, 1]
cands = [80, 95, 99, 101, 120]
sp = sum(1 for w in cands for r in range(len(tiny) + 1) for c in itertools.combinations(tiny, r) if w + sum(c) <= 100)
print("second_phase_exact", sp)


def rounds(n, eps, k):
    lg = max(1.0, math.log2(max(n, 2)))
    return min(k, math.ceil(math.log2(100000 * n * lg * lg / eps)))


print("second_phase_rounds n=20 k=10", rounds(20, 0.25, 10), "n=50 k=40", rounds(50, 0.25, 40))
print("digest small", hashlib.sha256(b"3 5\n2 3 5\n").hexdigest())
print("dyer K n=200 c=4", max(1, math.ceil(4 * math.sqrt(200 * math.log(200)))))
print("float hex 0.1", (0.1).hex(), "0.75", (0.75).hex())
print("root delta n=10 eps=0.25 x=3", (0.25 / 10) ** 3)
print("bin_cap n=10 eps=0.25", math.ceil(math.log2(10 / 0.25)) + 4)
print("sample multiplier n=10 eps=0.25", 16 * math.ceil(math.log2(10 / 0.25)))
