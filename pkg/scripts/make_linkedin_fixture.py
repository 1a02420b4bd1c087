"""Generate the bundled LinkedIn-format minute-bar fixture.

The original Bloomberg ticks are proprietary.  This writes a synthetic
stand-in with the same shape: 1535 one-minute bars over the sessions of
2011-05-19, 05-20, 05-23 and 05-24, open prices ranging exactly over
[81.24, 120.74].  The path is a seeded random walk mapped affinely onto
that range, so only the count and extrema mean anything.
"""
import csv
import sys
from datetime import datetime, timedelta, timezone

import numpy as np

SESSIONS = ["2011-05-19", "2011-05-20", "2011-05-23", "2011-05-24"]
N_BARS = 1535
LOW, HIGH = 81.24, 120.74


def minute_stamps():
    stamps = []
    eastern = timezone(timedelta(hours=-4))
    for day in SESSIONS:
        start = datetime.fromisoformat(f"{day}T09:30:00").replace(tzinfo=eastern)
        stamps.extend(start + timedelta(minutes=k) for k in range(390))
    # drop minutes without trades, spread evenly, to land on N_BARS
    drop = np.linspace(0, len(stamps) - 1, len(stamps) - N_BARS + 2)[1:-1].round().astype(int)
    return [s for i, s in enumerate(stamps) if i not in set(drop)]


def main(path):
    rng = np.random.default_rng(20110519)
    stamps = minute_stamps()
    walk = np.cumsum(rng.standard_normal(N_BARS))
    walk -= walk.min()
    opens = np.round(LOW + (HIGH - LOW) * walk / walk.max(), 2)
    spread = np.abs(rng.standard_normal((N_BARS, 2))) * 0.05
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["timestamp", "open", "high", "low", "close"])
        for t, o, (up, dn) in zip(stamps, opens, spread):
            high = round(o + up, 2)
            low = round(max(o - dn, 0.01), 2)
            close = round(min(max(o + (up - dn) / 2, low), high), 2)
            out.writerow([t.isoformat(), f"{o:.2f}", f"{high:.2f}", f"{low:.2f}", f"{close:.2f}"])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/slmbubble/data/linkedin_format_fixture.csv")
