#!/usr/bin/env python3
"""Reference forward pass of the detector, from a weight file and a readings CSV.

Writes the golden file used by the C++ tests: per meter-day the exact
first-layer integer products, the private-path logits and probabilities and
the full-precision probabilities. Pure Python, mirroring the accumulation
order of the weight-file layout (bias first, then inputs, then recurrent).
"""
import csv
import json
import math
import sys
from decimal import Decimal


def flat(values):
    if values and isinstance(values[0], list):
        return [float(v) for row in values for v in row]
    return [float(v) for v in values]


def sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


def lstm(layer, seq):
    u = layer["units"]
    g = 4 * u
    W = flat(layer["W"])
    U = flat(layer["U"])
    b = flat(layer["b"])
    h = [0.0] * u
    c = [0.0] * u
    out = []
    for x in seq:
        z = list(b)
        for i, xi in enumerate(x):
            row = W[i * g:(i + 1) * g]
            for k in range(g):
                z[k] += xi * row[k]
        for i in range(u):
            hi = h[i]
            row = U[i * g:(i + 1) * g]
            for k in range(g):
                z[k] += hi * row[k]
        for j in range(u):
            ig = sigmoid(z[j])
            fg = sigmoid(z[u + j])
            cand = math.tanh(z[2 * u + j])
            og = sigmoid(z[3 * u + j])
            c[j] = fg * c[j] + ig * cand
            h[j] = og * math.tanh(c[j])
        out.append(list(h))
    return out


def head(weights, act):
    seq = [[a] for a in act]
    for layer in weights["lstm"]:
        seq = lstm(layer, seq)
    W = flat(weights["output"]["W"])
    b = flat(weights["output"]["b"])
    x = seq[-1]
    logits = list(b)
    for i, xi in enumerate(x):
        for k in range(2):
            logits[k] += xi * W[i * 2 + k]
    m = max(logits)
    e = [math.exp(v - m) for v in logits]
    return logits, [e[0] / (e[0] + e[1]), e[1] / (e[0] + e[1])]


def main():
    weights_path, csv_path, out_path = sys.argv[1:4]
    with open(weights_path) as fh:
        w = json.load(fh)
    d, n = w["d"], w["n"]
    scale = w["reading_scale"] * (1 << w["weight_scale_bits"])
    wq = w["first"]["w_quant"]
    bias = [float(v) for v in w["first"]["bias"]]
    w_real = [[float(v) for v in row] for row in w["first"]["w_real"]]
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    cases = []
    for r in rows:
        enc = [int(Decimal(v) * w["reading_scale"]) for v in r[2:2 + d]]
        products = [sum(enc[t] * wq[t][c] for t in range(d)) for c in range(n)]
        act = [math.tanh(products[c] / scale + bias[c]) for c in range(n)]
        logits, probs = head(w, act)
        kwh = [e / w["reading_scale"] for e in enc]
        z = list(bias)
        for t in range(d):
            for c in range(n):
                z[c] += kwh[t] * w_real[t][c]
        _, probs_full = head(w, [math.tanh(v) for v in z])
        cases.append({"meter_id": int(r[0]), "date": r[1], "products": products,
                      "logits": [repr(v) for v in logits], "probs": [repr(v) for v in probs],
                      "probs_full_precision": [repr(v) for v in probs_full]})
    with open(out_path, "w") as fh:
        json.dump({"cases": cases}, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
