#!/usr/bin/env python3
"""Reference implementation of the six theft patterns, for parity checks.

Reads a readings CSV (meter_id,date,r1..rd, kWh with three decimals) and
writes the golden file consumed by the C++ tests: every meter-day under a
fixed set of attack parameters, as encoded watt-hours.

Arithmetic follows the shared contract: readings decoded to float kWh,
pattern applied in float, then value * 1000 rounded half away from zero.
"""
import csv
import json
import sys
from decimal import ROUND_HALF_UP, Decimal

SCALE = 1000


def parse_wh(text):
    return int((Decimal(text) * SCALE).to_integral_exact())


def encode(kwh):
    return int(Decimal(kwh * float(SCALE)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def beta_vector(d, seed):
    # Fixed, human-readable factors in [0.1, 0.8].
    return ["%.6f" % (0.1 + 0.7 * (((t + 1) * seed) % d) / (d - 1)) for t in range(d)]


def apply(spec, readings):
    d = len(readings)
    kwh = [r / SCALE for r in readings]
    mean = 0.0
    for v in kwh:
        mean += v
    mean /= d
    kind = spec["kind"]
    out = []
    for t in range(d):
        if kind == "f1":
            v = float(spec["alpha"]) * kwh[t]
        elif kind == "f2":
            v = float(spec["beta"][t]) * kwh[t]
        elif kind == "f3":
            v = mean
        elif kind == "f4":
            v = float(spec["beta"][t]) * mean
        elif kind == "f5":
            v = kwh[d - 1 - t]
        elif kind == "f6":
            slot = t + 1
            v = 0.0 if spec["ts"] < slot < spec["te"] else kwh[t]
        else:
            raise ValueError(kind)
        out.append(encode(v))
    return out


def main():
    src = sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/attack_fixture.csv"
    dst = sys.argv[2] if len(sys.argv) > 2 else "tests/fixtures/attack_golden.json"
    with open(src, newline="") as fh:
        rows = list(csv.reader(fh))
    d = len(rows[0]) - 2
    series = [{"meter_id": int(r[0]), "date": r[1], "readings": [parse_wh(x) for x in r[2:]]} for r in rows[1:]]
    specs = [
        {"kind": "f1", "alpha": "0.3"},
        {"kind": "f1", "alpha": "0.5"},
        {"kind": "f1", "alpha": "0.77"},
        {"kind": "f2", "beta": beta_vector(d, 37)},
        {"kind": "f3"},
        {"kind": "f4", "beta": beta_vector(d, 11)},
        {"kind": "f5"},
        {"kind": "f6", "ts": 10, "te": 20},
        {"kind": "f6", "ts": 0, "te": d + 1},
        {"kind": "f6", "ts": 42, "te": 48},
    ]
    cases = []
    for s in series:
        for spec in specs:
            cases.append({"meter_id": s["meter_id"], "date": s["date"], "spec": spec,
                          "expected": apply(spec, s["readings"])})
    doc = {"slots": d, "reading_scale": SCALE, "series": series, "cases": cases}
    with open(dst, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


if __name__ == "__main__":
    main()
