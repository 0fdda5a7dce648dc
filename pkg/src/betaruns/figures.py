"""Matplotlib renderers for the report tables.

Each renderer takes already-computed report rows and writes one PNG next to
the delimited output.  Rendering is display-only: every number is converted
to float here and nowhere else.  Output must stay byte-reproducible, so the
figures pin the backend, the size, and the PNG metadata.
"""

from __future__ import annotations

import math
from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)


_SAVE_KW = dict(dpi=130, metadata={"Software": "betaruns"})


def _style(ax, title: str, xlabel: str, ylabel: str):
    ax.set_title(title, fontsize=10)
    ax.set_xlabel(xlabel, fontsize=9)
    ax.set_ylabel(ylabel, fontsize=9)
    ax.grid(True, alpha=0.3)
    ax.tick_params(labelsize=8)


def _mid(pair) -> float:
    return float((Fraction(pair[0]) + Fraction(pair[1])) / 2)


def expansion_figure(path: str, beta_label: str, digits: list[int], log_base: float):
    """Run-length growth along one expansion, against the log-base curve."""
    xs, rs = [], []
    best = run = 0
    for i, d in enumerate(digits, start=1):
        run = run + 1 if d == 0 else 0
        best = max(best, run)
        xs.append(i)
        rs.append(best)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.step(xs, rs, where="post", lw=1.2, label="max zero run")
    if log_base > 1:
        ref = [math.log(x, log_base) if x > 1 else 0.0 for x in xs]
        ax.plot(xs, ref, "--", lw=1.0, label="log_beta n")
    _style(ax, f"zero-run growth, beta = {beta_label}", "digits consumed", "run length")
    ax.legend(fontsize=8)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def census_figure(path: str, beta_label: str, records):
    """Word counts per order against the certified growth bounds."""
    ns = [rec.n for rec in records]
    counts = [rec.count for rec in records]
    fulls = [rec.full_count for rec in records]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.semilogy(ns, counts, "o-", lw=1.2, ms=4, label="admissible words")
    ax.semilogy(ns, fulls, "s-", lw=1.2, ms=4, label="full words")
    _style(ax, f"admissible-word census, beta = {beta_label}", "order n", "count")
    ax.legend(fontsize=8)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def checkpoint_figure(path: str, report):
    """Run lengths against their bounds at the construction checkpoints."""
    rows = report.rows
    xs = list(range(len(rows)))
    rs = [float(row.r) for row in rows]
    bounds = [float(row.bound) for row in rows]
    colors = ["tab:green" if row.passed else "tab:red" for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.scatter(xs, rs, c=colors, s=30, zorder=3, label="run length")
    ax.plot(xs, bounds, "k--", lw=1.0, label="bound")
    ax.set_yscale("log")
    ax.set_xticks(xs)
    ax.set_xticklabels([f"k={row.k}\n{row.relation}" for row in rows], fontsize=7)
    _style(ax, f"{report.kind} checkpoints, beta = {report.beta}", "checkpoint", "run length")
    ax.legend(fontsize=8)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def mc_figure(path: str, report, band):
    """Histogram of the sampled run-length ratios, with the acceptance band."""
    ratios = []
    for r in report.r_values:
        rb = report.ratio_bounds(r)
        if rb is not None:
            ratios.append(_mid(rb))
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if ratios:
        ax.hist(ratios, bins=24, color="tab:blue", alpha=0.75)
    if band is not None:
        ax.axvline(float(band[0]), color="tab:red", ls="--", lw=1.0, label="band")
        ax.axvline(float(band[1]), color="tab:red", ls="--", lw=1.0)
    mb = report.mean_bounds
    if mb is not None:
        ax.axvline(_mid(mb), color="k", lw=1.2, label="mean")
    _style(
        ax,
        f"run-length law, beta = {report.beta}, n = {report.n}, {report.mode}",
        "r_n / log_beta(n)",
        "samples",
    )
    ax.legend(fontsize=8)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def analyze_figure(path: str, beta_label: str, count_reports, profile_points):
    """Cover exponents per level next to the mass-versus-length profile."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ks = [rep.k for rep in count_reports]
    covers = [_mid(rep.cover) for rep in count_reports]
    bars = [_mid(rep.beta_bar) for rep in count_reports]
    ax1.plot(ks, covers, "o-", lw=1.2, label="cover exponent")
    ax1.plot(ks, bars, "s--", lw=1.0, label="largest supported base")
    ax1.set_xticks(ks)
    _style(ax1, f"level counts, beta = {beta_label}", "level k", "value")
    ax1.legend(fontsize=8)
    if profile_points:
        ns = [pt.n for pt in profile_points]
        vals = [_mid(pt.ratio) for pt in profile_points]
        ax2.plot(ns, vals, "o-", lw=1.2)
        ax2.set_xscale("log")
    _style(ax2, "mass vs length exponent", "depth n", "log mass / log length")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
