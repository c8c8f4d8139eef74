#!/usr/bin/env python3
"""Independent reference for the hashing, curve and pairing conventions.

Writes tests/fixtures/crypto_vectors.json. Pure Python integers, hashlib only;
shares no code with the C++ library.
"""
import hashlib
import json
import sys

Q = 0x52AEF37E954A24FCF3D22951B6BA2D84BAA7ACECA11E19419455A88E1BF8B4A3
P_PLAIN = 0x52AEF37E954A24FCF3D22951B6BA2D83D14FF56FB5880DF8FF779BB5DCD0945F
P_PAIR = 0x2000000000001529C669B38D2206E232D0D3B7353E4E375DC76F89860FFA3374B2AE705799ECF3
H_PAIR = 0x6313A3A2CCBA7C
POINT_BYTES = 40


class Curve:
    def __init__(self, p, a, b, cofactor):
        self.p, self.a, self.b, self.h = p, a, b, cofactor

    def rhs(self, x):
        return (x * x * x + self.a * x + self.b) % self.p

    def sqrt(self, v):
        r = pow(v, (self.p + 1) // 4, self.p)
        return r if r * r % self.p == v % self.p else None

    def add(self, P, R):
        p = self.p
        if P is None:
            return R
        if R is None:
            return P
        if P[0] == R[0] and (P[1] + R[1]) % p == 0:
            return None
        if P == R:
            lam = (3 * P[0] * P[0] + self.a) * pow(2 * P[1], -1, p) % p
        else:
            lam = (R[1] - P[1]) * pow(R[0] - P[0], -1, p) % p
        x = (lam * lam - P[0] - R[0]) % p
        return (x, (lam * (P[0] - x) - P[1]) % p)

    def mul(self, k, P):
        acc = None
        for bit in bin(k)[2:] if k > 0 else "":
            acc = self.add(acc, acc)
            if bit == "1":
                acc = self.add(acc, P)
        return acc

    def encode(self, P):
        if P is None:
            return "00" * POINT_BYTES
        tag = 3 if P[1] & 1 else 2
        return "%02x" % tag + P[0].to_bytes(POINT_BYTES - 1, "big").hex()


PLAIN = Curve(P_PLAIN, 0, 10, 1)
PAIR = Curve(P_PAIR, 1, 0, H_PAIR)


def u32(v):
    return v.to_bytes(4, "big")


def field(data):
    return u32(len(data)) + data


def expand_wide(label, counter, msg):
    out = b""
    for block in (0, 1):
        out += hashlib.sha256(field(label.encode()) + u32(counter) + bytes([block]) + msg).digest()
    return out


def hash_to_curve(curve, label, msg):
    counter = 0
    while True:
        x = int.from_bytes(expand_wide(label, counter, msg), "big") % curve.p
        y = curve.sqrt(curve.rhs(x))
        if y is not None:
            want_odd = hashlib.sha256(field(label.encode()) + u32(counter) + bytes([2]) + msg).digest()[0] & 1
            if (y & 1) != want_odd:
                y = (-y) % curve.p
            pt = curve.mul(curve.h, (x, y))
            if pt is not None:
                return pt
        counter += 1


def hash_to_scalar(label, msg):
    return int.from_bytes(expand_wide(label, 0, msg), "big") % Q


# Fp2 = Fp[i]/(i^2 + 1) as (re, im).
def f2_mul(a, b):
    p = P_PAIR
    return ((a[0] * b[0] - a[1] * b[1]) % p, (a[0] * b[1] + a[1] * b[0]) % p)


def f2_pow(a, e):
    acc = (1, 0)
    for bit in bin(e)[2:]:
        acc = f2_mul(acc, acc)
        if bit == "1":
            acc = f2_mul(acc, a)
    return acc


def tate(P, R):
    """Reduced Tate pairing e(P, phi(R)) with phi(x, y) = (-x, i y)."""
    p = P_PAIR
    if P is None or R is None:
        return (1, 0)
    qx, qy = (-R[0]) % p, (0, R[1])  # qy is the Fp2 element i * y

    def line(T, S):
        # Line through T and S (tangent when equal) evaluated at phi(R).
        if T == S:
            lam = (3 * T[0] * T[0] + 1) * pow(2 * T[1], -1, p) % p
        else:
            lam = (S[1] - T[1]) * pow(S[0] - T[0], -1, p) % p
        # (Y - yT) - lam (X - xT) with X = qx in Fp, Y = qy = i*y.
        return ((-T[1] - lam * (qx - T[0])) % p, qy[1])

    f = (1, 0)
    T = P
    for bit in bin(Q)[3:]:
        f = f2_mul(f2_mul(f, f), line(T, T) if T[1] != 0 else (1, 0))
        T = PAIR.add(T, T)
        if bit == "1":
            if T is not None and PAIR.add(T, P) is not None:
                f = f2_mul(f, line(T, P))
            T = PAIR.add(T, P)
    # f^(p - 1) = conj(f) / f, then ^((p + 1) / q).
    conj = (f[0], (-f[1]) % p)
    inv_norm = pow(f[0] * f[0] + f[1] * f[1], -1, p)
    f_inv = (f[0] * inv_norm % p, (-f[1]) * inv_norm % p)
    g = f2_mul(conj, f_inv)
    return f2_pow(g, (p + 1) // Q)


def merkle_root(leaves):
    level = [hashlib.sha256(leaf).digest() for leaf in leaves]
    while True:
        if len(level) % 2 == 1:
            level.append(level[-1])
        level = [hashlib.sha256(level[i] + level[i + 1]).digest() for i in range(0, len(level), 2)]
        if len(level) == 1:
            return level[0]


def main():
    g = hash_to_curve(PLAIN, "gridtrust/generator/plain", b"")
    g2 = hash_to_curve(PAIR, "gridtrust/generator/pairing", b"")
    assert PLAIN.mul(Q, g) is None and PAIR.mul(Q, g2) is None

    scalars = [1, 2, 3, 7, 0xFFFFFFFFFFFFFFFF, Q - 1,
               hash_to_scalar("gridtrust/test/scalar", b"a"), hash_to_scalar("gridtrust/test/scalar", b"b")]
    h1 = []
    for label in ["2009-07-15T00:30", "2009-07-15T00:00", "2010-12-31T23:30"]:
        p0 = hash_to_curve(PLAIN, "gridtrust/H1/TS/0", label.encode())
        p1 = hash_to_curve(PLAIN, "gridtrust/H1/TS/1", label.encode())
        h1.append({"domain": "TS", "label": label, "p0": PLAIN.encode(p0), "p1": PLAIN.encode(p1)})

    a, b = scalars[6], scalars[7]
    e_gg = tate(g2, g2)
    e_ab = tate(PAIR.mul(a, g2), PAIR.mul(b, g2))
    assert e_ab == f2_pow(e_gg, a * b % Q)

    merkle = []
    for n in range(1, 8):
        leaves = [("leaf-%d" % i).encode() for i in range(n)]
        merkle.append({"leaves": [leaf.hex() for leaf in leaves], "root": merkle_root(leaves).hex()})

    doc = {
        "plain_generator": PLAIN.encode(g),
        "pairing_generator": PAIR.encode(g2),
        "scalar_mul": [{"k": "%064x" % k, "plain": PLAIN.encode(PLAIN.mul(k, g)),
                        "pairing": PAIR.encode(PAIR.mul(k, g2))} for k in scalars],
        "h1": h1,
        "h2": [{"message": m.hex(), "point": PAIR.encode(hash_to_curve(PAIR, "gridtrust/H2", m))}
               for m in [b"", b"hello", bytes(range(64))]],
        "hash_to_scalar": [{"label": "gridtrust/test/scalar", "message": m.hex(),
                            "scalar": "%064x" % hash_to_scalar("gridtrust/test/scalar", m)} for m in [b"a", b"b"]],
        "pairing": [
            {"a": "%064x" % 1, "b": "%064x" % 1, "re": "%x" % e_gg[0], "im": "%x" % e_gg[1]},
            {"a": "%064x" % a, "b": "%064x" % b, "re": "%x" % e_ab[0], "im": "%x" % e_ab[1]},
        ],
        "merkle": merkle,
    }
    out = sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/crypto_vectors.json"
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
