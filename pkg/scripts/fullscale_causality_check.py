#!/usr/bin/env python3
"""Optional full-scale structure check (not CI-gated).

The confirmed-cases -> deaths lag relation depends only on public
epidemiological series, so it can be verified without the full post corpus:
daily confirmed cases are expected to explain daily deaths at every lag
from 1 to 90 at the 5% level.

Usage:
    python3 scripts/fullscale_causality_check.py \
        --cases cases.csv --deaths deaths.csv \
        --start 2020-01-01 --end 2022-10-09 [--max-lag 90] [--alpha 0.05]

Both inputs are two-column (date, value) files covering the window.
"""

import argparse
import sys
from datetime import datetime

from geopulse.causality import compress_lags, granger_scan, load_target


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", required=True)
    parser.add_argument("--deaths", required=True)
    parser.add_argument("--start", required=True)
    parser.add_argument("--end", required=True)
    parser.add_argument("--max-lag", type=int, default=90)
    parser.add_argument("--alpha", type=float, default=0.05)
    args = parser.parse_args()

    start = datetime.strptime(args.start, "%Y-%m-%d").date()
    end = datetime.strptime(args.end, "%Y-%m-%d").date()
    cases, clamped_c = load_target(args.cases, "cases", start, end)
    deaths, clamped_d = load_target(args.deaths, "deaths", start, end)
    if clamped_c or clamped_d:
        print(f"note: clamped {clamped_c} cases and {clamped_d} deaths corrections to 0")

    report = granger_scan(cases, deaths, max_lag=args.max_lag, alpha=args.alpha)
    lags = report.significant_lags
    print(f"cases -> deaths: {report.significant_count} significant lags: {compress_lags(lags)}")
    expected = list(range(1, args.max_lag + 1))
    if lags == expected:
        print(f"PASS: significant at every lag 1--{args.max_lag}")
        return 0
    missing = sorted(set(expected) - set(lags))
    print(f"DIFFERS: lags not significant: {compress_lags(missing)}")
    return 1


if __name__ == "__main__":
    sys.exit(main())
