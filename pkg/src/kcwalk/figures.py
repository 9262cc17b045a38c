"""Static SVG charts. Figures are derived from the same arrays written to CSV."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "kcwalk"
plt.rcParams["svg.fonttype"] = "none"

H_COLOR = "tab:red"
V_COLOR = "tab:blue"


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def kc_scatter(points, path):
    """points: iterable of (C, K, label, initial). y = x reference line included."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    points = list(points)
    top = max([0.1] + [max(c, k) for c, k, _, _ in points]) * 1.1
    ax.plot([0, top], [0, top], color="black", lw=1, label="K = C")
    h = [(c, k) for c, k, _, init in points if init == "H"]
    v = [(c, k) for c, k, _, init in points if init == "V"]
    if h:
        ax.scatter(*zip(*h), marker="o", facecolors="none", edgecolors=H_COLOR, label="c0 = H")
    if v:
        ax.scatter(*zip(*v), marker="x", color=V_COLOR, label="c0 = V")
    other = [(c, k) for c, k, _, init in points if init not in ("H", "V")]
    if other:
        cs, ks = zip(*other)
        ax.scatter(cs, ks, marker="s", label="mixed")
    ax.set_xlim(0, top)
    ax.set_ylim(0, top)
    ax.set_xlabel("C (coherence generated and detected)")
    ax.set_ylabel("K (Kolmogorov violation)")
    ax.legend(loc="upper left")
    fig.tight_layout()
    _save(fig, path)


def quantifier_vs_angle(angles, theory, randomizing, path):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(angles, theory, "o-", color="tab:red", label="theory (K = C)")
    if randomizing is not None:
        ax.plot(angles, randomizing, "s-", color="black", label="randomizing measurement")
    ax.set_xlabel("coin angle (deg)")
    ax.set_ylabel("K")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def difference_panels(positions, a, b, c, title, path):
    """Grouped V/H bars per position for the three tables (a), (b), (c)."""
    positions = np.asarray(positions)
    fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
    width = 0.4
    labels = ("(a) P(x, c, N)", "(b) combined via step N/2", "(c) difference (b) - (a)")
    for ax, table, label in zip(axes, (a, b, c), labels):
        ax.bar(positions - width / 2, table[:, 1], width, color=V_COLOR, label="V")
        ax.bar(positions + width / 2, table[:, 0], width, color=H_COLOR, label="H")
        ax.axhline(0, color="black", lw=0.5)
        ax.set_ylabel(label, fontsize=8)
    axes[0].set_title(title)
    axes[0].legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel("position x")
    fig.tight_layout()
    _save(fig, path)
