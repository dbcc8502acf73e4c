#!/usr/bin/env python3
"""Render specbox CSV outputs (scans, ip-curve, fourier) as PNG figures.

Examples:
    specbox scan --config run.json --output scan.csv
    scripts/plot_results.py scan scan.csv -o scan.png

    specbox analyze ip-curve --output ip.csv
    scripts/plot_results.py ip-curve ip.csv -o ip.png

    specbox analyze fourier --omega0-ev 12.46 --output f.csv
    scripts/plot_results.py fourier f.csv -o fourier.png
"""

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        sys.exit(f"{path}: empty")
    return rows


def plot_scan(rows, out):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    orientations = sorted({r["orientation"] for r in rows})
    for orient in orientations:
        pts = [r for r in rows if r["orientation"] == orient and r["status"] == "ok"]
        x = [float(r["omega_eV"]) for r in pts]
        for col, style in (("Y_ion", "-"), ("Y_exc", "--")):
            y = [float(r[col]) for r in pts]
            ax.plot(x, y, style, label=f"{col} ({orient})")
    ax.set_xlabel("photon energy (eV)")
    ax.set_ylabel("yield")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_ip_curve(rows, out):
    fig, ax = plt.subplots(figsize=(6, 4))
    a = [float(r["alpha"]) for r in rows]
    num = [float(r["ip_numeric_au"]) - 0.5 for r in rows]
    approx = [float(r["ip_approx_au"]) - 0.5 for r in rows]
    ax.plot(a, num, "-", label="numeric")
    ax.plot(a, approx, "--", label="closed form")
    ax.set_xlabel("alpha")
    ax.set_ylabel("Ip - Ip(alpha=0)  (a.u.)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_fourier(rows, out):
    fig, ax = plt.subplots(figsize=(6, 4))
    x = [float(r["omega_eV"]) for r in rows]
    y = [float(r["F_sq_au"]) for r in rows]
    ax.plot(x, y, "-")
    ax.set_xlabel("carrier photon energy (eV)")
    ax.set_ylabel("|F|^2 (a.u.)")
    ax.set_yscale("log")
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("kind", choices=["scan", "ip-curve", "fourier"])
    ap.add_argument("csv_path")
    ap.add_argument("-o", "--output", default="plot.png")
    args = ap.parse_args()
    rows = read_csv(args.csv_path)
    {"scan": plot_scan, "ip-curve": plot_ip_curve, "fourier": plot_fourier}[args.kind](
        rows, args.output)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
