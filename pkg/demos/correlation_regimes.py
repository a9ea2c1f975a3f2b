"""How strongly does the market move together, and when does that change?

Builds the rolling mean-absolute-correlation series, smooths it, finds the
surviving peaks/troughs, and prints per-period entry statistics.
"""

import cryptodynamics as cd
from cryptodynamics import correlation

S = 90          # trailing window, return days
SG = (31, 3)    # smoothing window / polynomial degree

panel = cd.simulated_market()
returns = cd.log_returns(panel)
series = correlation.rolling_norm_series(returns, S).with_smoothed(*SG)

print(f"norm series: {len(series.dates)} windows, "
      f"{series.dates[0]} .. {series.dates[-1]}")
print(f"raw range   {series.raw.min():.3f} .. {series.raw.max():.3f}")

points = cd.find_turning_points(series.smoothed, dates=series.dates)
print(f"\nturning points (l=17, delta=0.2, epsilon=0.01):")
for p in points:
    print(f"  {p.date}  {p.kind:<6}  level {p.value:.4f}")

print("\nper-period correlation-entry statistics (N^2 pool):")
stats = correlation.period_entry_stats(returns, cd.default_periods())
for s in stats:
    print(f"  {s.label:<11} {s.start} .. {s.end}   "
          f"mean {s.mean:.3f}   std {s.std:.3f}")
