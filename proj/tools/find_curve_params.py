#!/usr/bin/env python3
"""Deterministic search for the two curve instantiations used by gridtrust.

Plain group: j=0 curve y^2 = x^3 + b over F_P with prime order q (CM, D=-3).
Pairing group: supersingular y^2 = x^3 + x over F_p, p = h*q - 1, p = 3 mod 4,
so #E(F_p) = p + 1 = h*q and the embedding degree is 2.

Prints the constants as hex; they are frozen in src/crypto/params.cpp.
"""
import random

import gmpy2


def ec_add(P, Q, a, mod):
    if P is None:
        return Q
    if Q is None:
        return P
    if P[0] == Q[0] and (P[1] + Q[1]) % mod == 0:
        return None
    if P == Q:
        lam = (3 * P[0] * P[0] + a) * pow(2 * P[1], -1, mod) % mod
    else:
        lam = (Q[1] - P[1]) * pow(Q[0] - P[0], -1, mod) % mod
    x = (lam * lam - P[0] - Q[0]) % mod
    return (x, (lam * (P[0] - x) - P[1]) % mod)


def ec_mul(k, P, a, mod):
    R = None
    while k:
        if k & 1:
            R = ec_add(R, P, a, mod)
        P = ec_add(P, P, a, mod)
        k >>= 1
    return R


def some_point(a, b, mod, rng):
    while True:
        x = rng.randrange(mod)
        rhs = (x * x * x + a * x + b) % mod
        if gmpy2.legendre(rhs, mod) == 1:
            return (x, int(pow(rhs, (mod + 1) // 4, mod)))


def main():
    rng = random.Random(20230205)
    while True:
        t = rng.getrandbits(128) | 1
        v = rng.getrandbits(127) | (1 << 126) | 1
        num = t * t + 3 * v * v
        if num % 4:
            continue
        P = num // 4
        if not (1 << 254) < P < (1 << 255) or P % 12 != 7:
            continue
        if not gmpy2.is_prime(P, 50):
            continue
        for tt in (t, -t):
            q = P + 1 - tt
            if gmpy2.is_prime(q, 50) and (1 << 254) < q < (1 << 255):
                break
        else:
            continue
        for b in range(1, 200):
            pt = some_point(0, b, P, rng)
            if ec_mul(q, pt, 0, P) is None:
                break
        else:
            continue
        break
    print("plain_p =", hex(P))
    print("plain_b =", b)
    print("order_q =", hex(q))
    k = (1 << 309) // (4 * q)
    while True:
        h = 4 * k
        p = h * q - 1
        if gmpy2.is_prime(p, 50):
            break
        k += 1
    assert p % 4 == 3 and p < (1 << 310)
    pt = some_point(1, 0, p, rng)
    assert ec_mul(p + 1, pt, 1, p) is None
    print("pairing_p =", hex(p))
    print("cofactor_h =", hex(h))


if __name__ == "__main__":
    main()
