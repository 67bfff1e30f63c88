#!/usr/bin/env python3
"""Write a noise-free synthetic training-history fixture.

Each run is piecewise linear: a rise to the early peak, a drop to the
trough, a ramp that first exceeds the peak value at a chosen epoch, then a
flat plateau. Expected epochs come from the construction (peak, trough,
recovery) and from the plain 95%-of-final definition (plateau), not from
the C++ detectors.
"""

import argparse
import json
import math

RUNS = [
    # run_id, checkpoint, fraction, epochs, v0, (e_p, v_p), (e_t, v_t), e_r, v_f
    ("large-100", "pegasus-large", 1.0, 120, 0.05, (8, 0.46), (20, 0.15), 48, 0.62),
    ("large-50", "pegasus-large", 0.5, 200, 0.04, (12, 0.42), (30, 0.12), 106, 0.60),
    ("large-10", "pegasus-large", 0.1, 200, 0.03, (30, 0.30), (45, 0.10), None, 0.28),
    ("xsum-100", "pegasus-xsum", 1.0, 100, 0.06, (6, 0.4574), (14, 0.2), 32, 0.63),
    ("xsum-50", "pegasus-xsum", 0.5, 150, 0.05, (9, 0.44), (22, 0.18), 65, 0.61),
]

DERIVED = {
    "bleu": lambda v: 0.2 * v,
    "meteor": lambda v: 0.8 * v,
    "bertscore_recall": lambda v: 0.5 + 0.5 * v,
}


def curve(epochs, v0, peak, trough, e_r, v_f):
    (e_p, v_p), (e_t, v_t) = peak, trough
    if e_r is None:
        slope = (v_f - v_t) / (epochs - e_t)
    else:
        # half-epoch offset keeps epoch e_r - 1 strictly below the peak value
        slope = (v_p - v_t) / (e_r - e_t - 0.5)
    out = []
    for e in range(1, epochs + 1):
        if e <= e_p:
            v = v0 + (v_p - v0) * (e - 1) / (e_p - 1)
        elif e <= e_t:
            v = v_p - (v_p - v_t) * (e - e_p) / (e_t - e_p)
        else:
            v = min(v_f, v_t + slope * (e - e_t))
        out.append(round(v, 6))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dir", default="tests/fixtures")
    args = ap.parse_args()

    rows, expected = [], {}
    for run_id, ckpt, frac, epochs, v0, peak, trough, e_r, v_f in RUNS:
        values = curve(epochs, v0, peak, trough, e_r, v_f)
        final = values[-1]
        plateau = next(e for e, v in enumerate(values, 1) if v >= 0.95 * final)
        best = max(range(epochs), key=lambda i: (values[i], -i))
        expected[run_id] = {
            "checkpoint": ckpt,
            "train_fraction": frac,
            "early_peak": {"epoch": peak[0], "value": values[peak[0] - 1]},
            "trough": {"epoch": trough[0], "value": values[trough[0] - 1]},
            "recovery_onset": e_r,
            "plateau_onset": plateau,
            "best": {"epoch": best + 1, "value": values[best]},
            "label": "peak_drop_recovery" if e_r else "peak_drop_no_recovery",
        }
        for e, v in enumerate(values, 1):
            rows.append((run_id, "rouge1", e, v))
            for name, f in DERIVED.items():
                rows.append((run_id, name, e, round(f(v), 6)))

    # interleave metrics and runs so loading has to group and sort
    rows.sort(key=lambda r: (r[2], r[1], r[0]))
    with open(f"{args.dir}/history.csv", "w") as f:
        f.write("run_id,metric,epoch,value\n")
        for r in rows:
            f.write(f"{r[0]},{r[1]},{r[2]},{r[3]:.6f}\n")
    with open(f"{args.dir}/history_meta.csv", "w") as f:
        f.write("run_id,checkpoint,train_fraction\n")
        for run_id, ckpt, frac, *_ in RUNS:
            f.write(f"{run_id},{ckpt},{frac}\n")
    onsets = {
        "pegasus-large": {"target": 0.1, "estimate": math.ceil(max(48 * 1.0, 106 * 0.5) / 0.1 - 1e-9)},
        "pegasus-xsum": {"target": 0.1, "estimate": math.ceil(max(32 * 1.0, 65 * 0.5) / 0.1 - 1e-9)},
    }
    with open(f"{args.dir}/history_expected.json", "w") as f:
        json.dump({"runs": expected, "onsets": onsets}, f, indent=1)
        f.write("\n")
    print(f"wrote {len(rows)} rows for {len(RUNS)} runs")


if __name__ == "__main__":
    main()
