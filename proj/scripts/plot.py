#!/usr/bin/env python3
"""Quick-look plots for a crossdamp output directory.

    python3 scripts/plot.py crossdamp-out/population [-o figure.png]

The scenario is read from manifest.json. Needs pandas and matplotlib.
"""
import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def table(out, stem):
    for ext, reader in ((".csv", pd.read_csv), (".json", pd.read_json)):
        p = out / (stem + ext)
        if p.exists():
            return reader(p)
    raise SystemExit(f"no {stem}.csv or {stem}.json in {out}")


def by_curve(ax, df, y, label="gamma12/gamma"):
    for ratio, g in df.groupby("gamma12_over_gamma"):
        ax.plot(g["t"], g[y], label=f"{label} = {ratio:g}")


def population(out, fig):
    df = table(out, "population")
    axes = fig.subplots(1, 2, sharey=True)
    for ax, col in zip(axes, ("n1", "n2")):
        by_curve(ax, df, col)
        ax.set_xlabel("t")
        ax.set_title(col)
    axes[0].legend()


def fim(out, fig):
    df = table(out, "fim")
    cols = [c for c in df.columns if c.startswith("F")]
    axes = fig.subplots(2, (len(cols) + 1) // 2, squeeze=False).ravel()
    for ax, col in zip(axes, cols):
        by_curve(ax, df, col)
        ax.set_title(col)
    axes[0].legend(fontsize="small")


def crb(out, fig):
    df = table(out, "crb")
    ax = fig.subplots()
    for (ratio, param), g in df.groupby(["gamma12_over_gamma", "parameter"]):
        ax.semilogy(g["t"], g["std_bound"], marker="o", label=f"{param}, {ratio:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("sqrt(1 / (M F_aa))")
    ax.legend(fontsize="x-small", ncol=2)


def mle(out, fig):
    est = table(out, "mle_estimates")
    summ = table(out, "mle_summary")
    ax = fig.subplots()
    ax.hist(est["estimate"], bins=30)
    row = summ.iloc[0]
    ax.axvline(row["true_value"], color="k")
    ax.set_title(f"{row['target']}: var/CRB = {row['variance_ratio']:.3f}")


def entangle_evolve(out, fig):
    df = table(out, "entanglement")
    ax = fig.subplots()
    by_curve(ax, df, "Y")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("t")
    ax.set_ylabel("Y")
    ax.legend()


def entangle_scan(out, fig):
    df = table(out, "scan")
    meta = json.loads((out / "scan.meta.json").read_text())
    names = [a["axis"] for a in meta["axes"]]
    x, y = names[0], names[1]
    if len(names) == 3:  # slice at the last value of the third axis
        df = df[df[names[2]] == df[names[2]].max()]
    grid = df.pivot_table(index=y, columns=x, values="Y")
    ax = fig.subplots()
    m = ax.pcolormesh(grid.columns, grid.index, grid.values, cmap="RdBu_r", shading="auto",
                      vmin=-abs(grid.values).max(), vmax=abs(grid.values).max())
    ax.contour(grid.columns, grid.index, grid.values, levels=[0.0], colors="k")
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    fig.colorbar(m, label="Y")


def dfs_null(out, fig):
    df = table(out, "dfs_null")
    ax = fig.subplots()
    ax.loglog(df["t_seconds"], df["F44"], label="F44")
    ax.loglog(df["t_seconds"], df["I_gamma_minus"], "--", label="I(Gamma_-)")
    ax.set_xlabel("t [s]")
    ax.legend()


PLOTS = {
    "population": population,
    "fim": fim,
    "crb": crb,
    "mle": mle,
    "entangle-evolve": entangle_evolve,
    "entangle-scan": entangle_scan,
    "dfs-null": dfs_null,
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("-o", "--output", type=Path)
    args = ap.parse_args()
    scenario = json.loads((args.out_dir / "manifest.json").read_text())["scenario"]
    fig = plt.figure(figsize=(10, 6))
    PLOTS[scenario](args.out_dir, fig)
    fig.tight_layout()
    dest = args.output or args.out_dir / f"{scenario}.png"
    fig.savefig(dest, dpi=120)
    print(dest)


if __name__ == "__main__":
    main()
