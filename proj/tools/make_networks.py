#!/usr/bin/env python3
"""Writes the synthetic controllers bundled in models/.

The weights are deterministic. Rerunning the script reproduces the files
byte for byte.
"""

import json
import math
import random
import sys
from pathlib import Path


def dump(path, layers):
    doc = {"layers": [{"W": w, "b": b, "activation": act} for w, b, act in layers]}
    path.write_text(json.dumps(doc, indent=1) + "\n")


def saturating_unit(gain, breaks):
    """Piecewise-linear gain * tanh(a / gain) with knots at `breaks`.

    Returns (knots, slope jumps, value at the first knot). The function is
    flat outside the knot range.
    """
    values = [gain * math.tanh(b / gain) for b in breaks]
    slopes = [(values[i + 1] - values[i]) / (breaks[i + 1] - breaks[i]) for i in range(len(breaks) - 1)]
    jumps = [slopes[0]] + [slopes[i] - slopes[i - 1] for i in range(1, len(slopes))] + [-slopes[-1]]
    return breaks, jumps, values[0]


def unicycle(path):
    # a1 = -0.5 (v - 1) drives the speed to 1.
    # a2 = 0.4 y - 0.8 (theta - pi) steers toward y = 0 while heading left.
    # Each output is 20 + sat(a_j); the post map subtracts 20.
    rows = [[0.0, 0.0, 0.0, -0.5], [0.0, 0.4, -0.8, 0.0]]
    offsets = [0.5, 0.8 * math.pi]
    gains = [0.5, 0.6]
    breaks = [-1.2, -0.6, -0.25, 0.0, 0.25, 0.6, 1.2]
    w1, b1, w2 = [], [], [[], []]
    base = [20.0, 20.0]
    for j in range(2):
        knots, jumps, first = saturating_unit(gains[j], [gains[j] * k for k in breaks])
        base[j] += first
        for knot, jump in zip(knots, jumps):
            w1.append(rows[j])
            b1.append(offsets[j] - knot)
            w2[0].append(jump if j == 0 else 0.0)
            w2[1].append(jump if j == 1 else 0.0)
    dump(path, [(w1, b1, "relu"), (w2, base, "identity")])


def ramp(path):
    dump(path, [([[1.0]], [1.0], "relu"), ([[1.0]], [0.0], "identity")])


def random_net(path, sizes, seed, scale, out_bias):
    rng = random.Random(seed)
    layers = []
    for i in range(len(sizes) - 1):
        fan_in = sizes[i]
        w = [[round(rng.gauss(0.0, scale / math.sqrt(fan_in)), 6) for _ in range(fan_in)] for _ in range(sizes[i + 1])]
        b = [round(rng.gauss(0.0, 0.1), 6) for _ in range(sizes[i + 1])]
        last = i == len(sizes) - 2
        if last:
            b = [x + out_bias for x in b]
        layers.append((w, b, "identity" if last else "relu"))
    dump(path, layers)


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "models"
    out.mkdir(parents=True, exist_ok=True)
    unicycle(out / "unicycle_controller.json")
    ramp(out / "ramp_controller.json")
    random_net(out / "pendulum_controller.json", [2, 25, 25, 1], 7, 0.3, 0.0)
    random_net(out / "tora_controller.json", [4, 16, 16, 1], 11, 0.3, 10.0)


if __name__ == "__main__":
    main()
