"""Writes the synthetic two-source sample under data/sample/.

Price follows a slowly growing fundamental plus a mean-reverting deviation;
volume is backed out so that the price-to-utility ratio tracks that deviation.
Output is deterministic for a given seed.
"""
import argparse
import datetime as dt
import pathlib

import numpy as np


def generate(days: int, seed: int):
    rng = np.random.default_rng(seed)
    start = dt.date(2014, 1, 1)
    dates = [start + dt.timedelta(days=i) for i in range(days)]
    t = np.arange(days)

    issuance = np.where(t < 900, 3600.0, 1800.0) * np.exp(rng.normal(0.0, 0.05, days))
    supply = 12.0e6 + np.cumsum(issuance)

    # log deviation of price from fundamental: AR(1) around zero
    dev = np.zeros(days)
    for i in range(1, days):
        dev[i] = 0.995 * dev[i - 1] + rng.normal(0.0, 0.03)
    fundamental = np.log(600.0) + 0.0015 * t
    price = np.exp(fundamental + dev + rng.normal(0.0, 0.01, days))
    mcap = price * supply

    stake = np.clip(0.55 + 0.1 * np.sin(t / 365.0 * 2 * np.pi) + rng.normal(0.0, 0.01, days), 0.2, 0.9)
    active_1y = (1.0 - stake) * supply

    dil = np.empty(days)
    csum = np.concatenate([[0.0], np.cumsum(issuance)])
    for i in range(days):
        lo = max(0, i - 89)
        dil[i] = 365.0 * (csum[i + 1] - csum[lo]) / (i + 1 - lo) / supply[i]
    # PU = price^2 * supply * dil / (volume * stake); pick volume so PU ~ 80 * exp(2 * dev)
    pu = 80.0 * np.exp(2.0 * dev + rng.normal(0.0, 0.05, days))
    volume = price ** 2 * supply * dil / (pu * stake)
    onchain = 0.4 * volume
    offchain = volume - onchain

    addresses = np.round(4.0e5 * np.exp(0.0008 * t + 0.5 * dev + rng.normal(0.0, 0.05, days)))
    tx = np.round(addresses * (0.6 + rng.uniform(0.0, 0.1, days)))
    transfers = np.round(tx * (1.5 + rng.uniform(0.0, 0.3, days)))
    fees = 0.002 * onchain * np.exp(rng.normal(0.0, 0.2, days))
    rewards = issuance * price

    onchain_rows = []
    for i, d in enumerate(dates):
        onchain_rows.append(
            f"{d.isoformat()},{price[i]:.6f},{mcap[i]:.2f},{supply[i]:.4f},{issuance[i]:.4f},{fees[i]:.2f},"
            f"{rewards[i]:.2f},{onchain[i]:.2f},{addresses[i]:.0f},{tx[i]:.0f},{transfers[i]:.0f},{active_1y[i]:.4f}"
        )
    offchain_rows = [f"{d.isoformat()},{offchain[i]:.2f}" for i, d in enumerate(dates)]
    return onchain_rows, offchain_rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "sample"))
    ap.add_argument("--days", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=20140101)
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    onchain, offchain = generate(args.days, args.seed)
    header = ("time,PriceUSD,CapMrktCurUSD,SplyCur,IssTotNtv,FeeTotUSD,IssTotUSD,TxTfrValAdjUSD,"
              "AdrActCnt,TxCnt,TxTfrCnt,SplyAct1yr")
    (out / "onchain.csv").write_text(header + "\n" + "\n".join(onchain) + "\n")
    # the exchange file uses a different date header and starts a week later
    (out / "offchain.csv").write_text("Date,Volume\n" + "\n".join(offchain[7:]) + "\n")


if __name__ == "__main__":
    main()
