"""Figure rendering for CSV outputs.

Every CLI command that writes delimited data accepts --plot to render a
matplotlib figure next to it; `razorlab report` does the same for an
existing CSV. Figures are derived views only: the CSV stays the record.
"""

import csv
import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    """Rows of a razorlab CSV, skipping `#` config-echo lines."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    return rows[0], rows[1:]


def _label(x):
    if x == "":
        return "ε"
    return x


def render_census(path, out_path):
    header, rows = read_csv(path)
    idx = {name: i for i, name in enumerate(header)}
    by_n = {}
    for r in rows:
        by_n.setdefault(int(r[idx["n"]]), []).append(r)
    fig, axes = plt.subplots(1, max(len(by_n), 1),
                             figsize=(1.5 + 4 * max(len(by_n), 1), 3.4),
                             squeeze=False)
    for ax, (n, group) in zip(axes[0], sorted(by_n.items())):
        group = sorted(group, key=lambda r: -int(r[idx["count_lo"]]))[:12]
        xs = [_label(r[idx["x"]]) for r in group]
        lo = [int(r[idx["count_lo"]]) for r in group]
        hi = [int(r[idx["count_hi"]]) for r in group]
        ax.bar(range(len(xs)), lo, color="#4878a8", label="resolved")
        ax.bar(range(len(xs)), [h - l for l, h in zip(lo, hi)], bottom=lo,
               color="#c8d8e8", label="unresolved margin")
        ax.set_xticks(range(len(xs)))
        ax.set_xticklabels(xs, rotation=45, ha="right", fontsize=8)
        ax.set_yscale("log")
        ax.set_title(f"votes at n={n}")
        ax.set_ylabel("programs")
    axes[0][0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_mc(path, out_path):
    header, rows = read_csv(path)
    idx = {name: i for i, name in enumerate(header)}
    rows = [r for r in rows if r[idx["m_hat"]]]  # skip tally rows
    rows = sorted(rows, key=lambda r: -float(r[idx["m_hat"]]))[:20]
    xs = [_label(r[idx["x"]]) for r in rows]
    ms = [float(r[idx["m_hat"]]) for r in rows]
    errs = [3 * float(r[idx["stderr"]]) for r in rows]
    fig, ax = plt.subplots(figsize=(1.5 + 0.5 * len(xs) + 4, 3.4))
    ax.errorbar(range(len(xs)), ms, yerr=errs, fmt="o", capsize=3,
                color="#4878a8", label="m̂(x) ± 3σ")
    if "k_prime" in idx:
        ks = [r[idx["k_prime"]] for r in rows]
        ref = [2.0 ** -int(k) if k else math.nan for k in ks]
        ax.plot(range(len(xs)), ref, "_", markersize=16, color="#b04838",
                label="2^−K'(x)")
    ax.set_yscale("log")
    ax.set_xticks(range(len(xs)))
    ax.set_xticklabels(xs, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("probability")
    ax.set_title("universal distribution, fair-coin sampling")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_ranking(path, out_path):
    header, rows = read_csv(path)
    idx = {name: i for i, name in enumerate(header)}
    names = [r[idx["model"]] for r in rows]
    comp = [float(r[idx["complexity_bits"]]) for r in rows]
    loss = [float(r[idx["empirical_loss_bits"]]) for r in rows]
    ys = range(len(names))
    fig, ax = plt.subplots(figsize=(6, 1.2 + 0.5 * len(names)))
    ax.barh(ys, comp, color="#4878a8", label="complexity")
    ax.barh(ys, loss, left=comp, color="#d8a038", label="empirical loss")
    ax.set_yticks(list(ys))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("bits")
    ax.set_title("regularized totals")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_verify(path, out_path):
    header, rows = read_csv(path)
    idx = {name: i for i, name in enumerate(header)}
    names = [r[idx["criterion"]] for r in rows]
    passed = [r[idx["passed"]] == "True" for r in rows]
    fig, ax = plt.subplots(figsize=(6, 1.2 + 0.4 * len(names)))
    colors = ["#50a050" if p else "#b04838" for p in passed]
    ax.barh(range(len(names)), [1] * len(names), color=colors)
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xticks([])
    for i, p in enumerate(passed):
        ax.text(0.5, i, "PASS" if p else "FAIL", ha="center", va="center",
                color="white", fontsize=9, fontweight="bold")
    ax.set_title("acceptance criteria")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


RENDERERS = {
    "census": render_census,
    "mc": render_mc,
    "ranking": render_ranking,
    "verify": render_verify,
}


def render(kind, path, out_path):
    if kind not in RENDERERS:
        raise ValueError(f"no renderer for {kind!r}; "
                         f"choose from {sorted(RENDERERS)}")
    return RENDERERS[kind](path, out_path)
