#!/usr/bin/env python3
"""Write a synthetic OHLCV file for the sector-ETF tickers (business days)."""

import argparse
import datetime as dt
import math
import random

TICKERS = ["XLB", "XLE", "XLF", "XLI", "XLK", "XLP", "XLU", "XLV", "XLY", "XLRE", "XLC"]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", help="output CSV path")
    parser.add_argument("--start", default="2019-01-02")
    parser.add_argument("--days", type=int, default=750)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    day = dt.date.fromisoformat(args.start)
    dates = []
    while len(dates) < args.days:
        if day.weekday() < 5:
            dates.append(day)
        day += dt.timedelta(days=1)

    drift = {t: rng.uniform(-0.0002, 0.0006) for t in TICKERS}
    vol = {t: rng.uniform(0.008, 0.02) for t in TICKERS}
    close = {t: rng.uniform(30.0, 120.0) for t in TICKERS}

    with open(args.out, "w", encoding="ascii") as f:
        f.write("date,ticker,open,high,low,close,adj_close,volume\n")
        for d in dates:
            market = rng.gauss(0.0, 0.007)
            for t in TICKERS:
                prev = close[t]
                r = drift[t] + market + rng.gauss(0.0, vol[t])
                c = prev * math.exp(r)
                o = prev * math.exp(rng.gauss(0.0, 0.002))
                hi = max(o, c) * (1.0 + abs(rng.gauss(0.0, 0.004)))
                lo = min(o, c) * (1.0 - abs(rng.gauss(0.0, 0.004)))
                v = int(rng.uniform(1e6, 5e6))
                f.write(f"{d},{t},{o:.4f},{hi:.4f},{lo:.4f},{c:.4f},{c:.4f},{v}\n")
                close[t] = c


if __name__ == "__main__":
    main()
