"""Daily price/market-cap panel loading, validation and partitioning.

Panels are aligned N x (T+1) matrices over a contiguous calendar-day axis.
Assets with any unusable value inside the requested range are dropped and
reported rather than imputed. Panels are immutable once built; every
downstream module can rely on their invariants.

CSV schema: first column ``date`` (ISO-8601), one column per ticker,
header row required, UTF-8, ``.`` decimal point.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass

import numpy as np

from .errors import EmptyPanelError, GapError, InputError, ParseError

_DAY = dt.timedelta(days=1)

# Display names for tickers commonly seen in daily crypto panels; loaders
# fall back to the ticker itself for anything not listed here.
TICKER_NAMES = {
    "BTC": "Bitcoin", "ETH": "Ethereum", "BNB": "Binance Coin", "ADA": "Cardano",
    "XRP": "XRP", "DOGE": "Dogecoin", "BCH": "Bitcoin Cash", "LTC": "Litecoin",
    "LINK": "Chainlink", "ETC": "Ethereum Classic", "XLM": "Stellar", "THETA": "Theta",
    "VET": "VeChain", "FIL": "Filecoin", "TRX": "Tron", "SMR": "Monero",
    "EOS": "EOS", "CRO": "Crypto.com", "MKR": "Maker", "BSV": "Bitcoin SV",
    "NEO": "NEO", "XTZ": "Tezos", "MIOTA": "IOTA", "DCR": "Decred",
    "HT": "Huobi Token", "XEM": "NEM", "WAVES": "WAVES", "CEL": "Celsius",
    "DASH": "Dash", "ZEC": "Zcash", "MANA": "Decentraland", "ENJ": "Enjin Coin",
    "HOT": "Holo", "QNT": "Quant", "KCS": "KuCoin", "NEXO": "Nexo",
    "BAT": "Basic Attention Token", "ZIL": "Zilliqa", "BTG": "Bitcoin Gold",
    "BNT": "Bancor", "ONT": "Ontology", "ZEN": "Horizen", "SC": "Siacoin",
    "DGB": "Digibyte", "QTUM": "QTUM", "CHSB": "SwissBorg", "ZRX": "0x",
    "RVN": "Ravencoin", "OMG": "OMG Network", "NANO": "Nano", "ICX": "ICON",
    "FTM": "Fantom",
}


@dataclass(frozen=True)
class AssetMeta:
    ticker: str
    name: str

    def __post_init__(self):
        if not self.ticker:
            raise InputError("asset ticker must be non-empty")


@dataclass(frozen=True)
class PricePanel:
    """Aligned daily closes and market caps for N assets over T+1 days."""

    dates: tuple
    assets: tuple
    closes: np.ndarray       # (N, T+1), strictly positive
    market_caps: np.ndarray  # (N, T+1), non-negative

    def __post_init__(self):
        dates = tuple(self.dates)
        assets = tuple(self.assets)
        closes = np.ascontiguousarray(self.closes, dtype=float)
        caps = np.ascontiguousarray(self.market_caps, dtype=float)
        if len(dates) < 1:
            raise InputError("panel needs at least one date")
        gaps = [a + _DAY for a, b in zip(dates, dates[1:]) if b != a + _DAY]
        if gaps:
            raise GapError(gaps)
        tickers = [a.ticker for a in assets]
        if len(set(tickers)) != len(tickers):
            raise InputError("duplicate tickers in panel")
        shape = (len(assets), len(dates))
        if closes.shape != shape or caps.shape != shape:
            raise InputError(
                f"matrix shape mismatch: expected {shape}, "
                f"got closes {closes.shape}, market_caps {caps.shape}"
            )
        if not np.all(np.isfinite(closes)) or np.any(closes <= 0):
            raise InputError("closes must be finite and strictly positive")
        if not np.all(np.isfinite(caps)) or np.any(caps < 0):
            raise InputError("market caps must be finite and non-negative")
        closes.flags.writeable = False
        caps.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "assets", assets)
        object.__setattr__(self, "closes", closes)
        object.__setattr__(self, "market_caps", caps)

    @property
    def n_assets(self):
        return len(self.assets)

    @property
    def n_days(self):
        return len(self.dates)

    @property
    def tickers(self):
        return [a.ticker for a in self.assets]


@dataclass(frozen=True)
class Period:
    label: str
    start: dt.date
    end: dt.date

    def __post_init__(self):
        if self.end < self.start:
            raise InputError(f"period {self.label!r}: end before start")


@dataclass(frozen=True)
class PeriodPartition:
    """Ordered, non-overlapping named date intervals."""

    periods: tuple

    def __post_init__(self):
        periods = tuple(self.periods)
        for prev, cur in zip(periods, periods[1:]):
            if cur.start <= prev.end:
                raise InputError(
                    f"periods {prev.label!r} and {cur.label!r} overlap or are out of order"
                )
        object.__setattr__(self, "periods", periods)

    def __iter__(self):
        return iter(self.periods)

    def __len__(self):
        return len(self.periods)

    def labels(self):
        return [p.label for p in self.periods]


@dataclass(frozen=True)
class DropRecord:
    ticker: str
    reason: str
    first_missing_date: dt.date

    def to_dict(self):
        return {
            "ticker": self.ticker,
            "reason": self.reason,
            "first_missing_date": self.first_missing_date.isoformat(),
        }


def default_periods() -> PeriodPartition:
    """The five named market phases used throughout the analyses.

    Note the intervals do not tile the calendar: 2020-02-29 falls between
    the first two phases and belongs to neither.
    """
    d = dt.date
    return PeriodPartition((
        Period("Pre-COVID", d(2019, 1, 1), d(2020, 2, 28)),
        Period("Peak COVID", d(2020, 3, 1), d(2020, 5, 30)),
        Period("Post-COVID", d(2020, 5, 31), d(2020, 8, 31)),
        Period("Bull", d(2020, 9, 1), d(2021, 4, 14)),
        Period("Bear", d(2021, 4, 15), d(2021, 6, 30)),
    ))


def _coerce_date(value):
    if isinstance(value, dt.date):
        return value
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError as exc:
        raise InputError(f"bad date {value!r}: {exc}") from None


def _read_table(path):
    """Read one CSV into (sorted dates, header tickers, {date: {ticker: value}}).

    Missing cells come back as None; unparseable cells raise ParseError with
    their 1-based row number and column name.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "date", "empty file") from None
        if not header or header[0].strip().lower() != "date":
            raise ParseError(path, 1, header[0] if header else "", "first column must be 'date'")
        tickers = [h.strip() for h in header[1:]]
        if any(not t for t in tickers):
            raise ParseError(path, 1, "", "blank ticker column in header")
        if len(set(tickers)) != len(tickers):
            raise ParseError(path, 1, "", "duplicate ticker column in header")
        rows = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                date = dt.date.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise ParseError(path, lineno, "date", str(exc)) from None
            if date in rows:
                raise ParseError(path, lineno, "date", f"duplicate date {date}")
            if len(row) != len(tickers) + 1:
                raise ParseError(path, lineno, "date",
                                 f"expected {len(tickers) + 1} cells, got {len(row)}")
            values = {}
            for ticker, cell in zip(tickers, row[1:]):
                cell = cell.strip()
                if not cell:
                    values[ticker] = None
                    continue
                try:
                    values[ticker] = float(cell)
                except ValueError:
                    raise ParseError(path, lineno, ticker, f"not a number: {cell!r}") from None
            rows[date] = values
    return sorted(rows), tickers, rows


def _check_contiguous(dates_present, start, end):
    wanted = []
    day = start
    while day <= end:
        wanted.append(day)
        day += _DAY
    present = set(dates_present)
    missing = [d for d in wanted if d not in present]
    if missing:
        raise GapError(missing)
    return wanted


def load_panel_with_report(price_csv_path, marketcap_csv_path, start, end):
    """Load and align a panel; returns (PricePanel, drop records).

    Assets survive only if both files give a usable value on every day of
    [start, end]: a parseable positive close and a non-negative market cap.
    Missing whole days raise GapError instead.
    """
    start = _coerce_date(start)
    end = _coerce_date(end)
    if end < start:
        raise InputError(f"date range end {end} before start {start}")

    _, price_tickers, price_rows = _read_table(price_csv_path)
    _, cap_tickers, cap_rows = _read_table(marketcap_csv_path)

    days = _check_contiguous([d for d in price_rows if start <= d <= end], start, end)
    _check_contiguous([d for d in cap_rows if start <= d <= end], start, end)

    cap_set = set(cap_tickers)
    drops = []
    kept = []
    for ticker in price_tickers:
        if ticker not in cap_set:
            drops.append(DropRecord(ticker, "missing market-cap column", start))
            continue
        bad = None
        for day in days:
            close = price_rows[day][ticker]
            cap = cap_rows[day][ticker]
            if close is None or cap is None:
                bad = DropRecord(ticker, "missing value", day)
            elif close <= 0:
                bad = DropRecord(ticker, "non-positive close", day)
            elif cap < 0:
                bad = DropRecord(ticker, "negative market cap", day)
            if bad is not None:
                break
        if bad is not None:
            drops.append(bad)
        else:
            kept.append(ticker)

    if not kept:
        raise EmptyPanelError("no asset survived alignment over the requested range")

    closes = np.array([[price_rows[d][t] for d in days] for t in kept], dtype=float)
    caps = np.array([[cap_rows[d][t] for d in days] for t in kept], dtype=float)
    assets = tuple(AssetMeta(t, TICKER_NAMES.get(t, t)) for t in kept)
    panel = PricePanel(tuple(days), assets, closes, caps)
    return panel, drops


def load_panel(price_csv_path, marketcap_csv_path, start, end) -> PricePanel:
    """As load_panel_with_report, discarding the drop report."""
    panel, _ = load_panel_with_report(price_csv_path, marketcap_csv_path, start, end)
    return panel


def write_panel(panel: PricePanel, price_csv_path, marketcap_csv_path):
    """Write a panel back to the two-file CSV layout, round-trip exact.

    Values use repr() formatting so reloading reproduces every float
    bit-exactly.
    """
    for path, matrix in ((price_csv_path, panel.closes),
                         (marketcap_csv_path, panel.market_caps)):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["date"] + panel.tickers)
            for j, day in enumerate(panel.dates):
                writer.writerow([day.isoformat()] + [repr(float(v)) for v in matrix[:, j]])


def write_drop_report(drops, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([d.to_dict() for d in drops], fh, indent=2, sort_keys=True)
        fh.write("\n")
