"""Figure rendering for the report-producing CLI commands.

Every report command writes its figure next to the delimited output, using
the non-interactive Agg backend so batch runs never need a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .ising import EnergyReport

__all__ = [
    "plot_energy_report",
    "plot_sweep",
    "plot_pstar_grid",
    "plot_tradeoff",
    "plot_montecarlo",
    "plot_gap",
]


def _save(fig, path: str | Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_energy_report(report: EnergyReport, path: str | Path) -> None:
    """Memory/flip/probe energy lines vs field strength, with the recall bound."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for mu in range(report.p):
        ax.plot(report.h_values, report.memory_total[:, mu],
                label=f"memory {mu + 1} (d={int(report.distances[mu])})")
    for mu in range(report.p):
        ax.plot(report.h_values, report.flip_total[:, mu], ls=":", alpha=0.6,
                label=f"flip {mu + 1}")
    ax.plot(report.h_values, report.probe_total, "k--", lw=1.5, label="probe state")
    finite = report.h_max[np.isfinite(report.h_max)]
    if finite.size:
        ax.axvline(float(finite.max()), color="green", ls="--", alpha=0.8,
                   label=f"h_max = {float(finite.max()):g}")
    ax.set_xlabel("field strength h")
    ax.set_ylabel("energy")
    ax.legend(fontsize=7, ncol=2)
    _save(fig, path)


def plot_sweep(h_values, success, h_max: float | None, path: str | Path,
               engine: str = "") -> None:
    """Recall success probability vs field strength."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(h_values, success, "o-", ms=3, label=f"success ({engine})" if engine else "success")
    if h_max is not None and np.isfinite(h_max):
        ax.axvline(h_max, color="green", ls="--", alpha=0.8, label=f"h_max = {h_max:g}")
    ax.set_xlabel("field strength h")
    ax.set_ylabel("recall success probability")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    _save(fig, path)


def plot_pstar_grid(rows, path: str | Path) -> None:
    """Exact tail vs closed-form bound, one curve pair per problem size."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    by_n: dict[int, list[tuple[int, float, float]]] = {}
    for n, x, exact, bound in rows:
        by_n.setdefault(n, []).append((x, exact, bound))
    shown = sorted(by_n)[:: max(1, len(by_n) // 4)]
    for n in shown:
        pts = sorted(by_n[n])
        xs = [p[0] for p in pts]
        ax.plot(xs, [p[1] for p in pts], "-", label=f"exact, N={n}")
        ax.plot(xs, [p[2] for p in pts], "--", alpha=0.7, label=f"bound, N={n}")
    ax.set_xlabel("distance slack x")
    ax.set_ylabel("P[other memory within N/2 + x]")
    ax.legend(fontsize=7)
    _save(fig, path)


def plot_tradeoff(f_values, budget, path: str | Path) -> None:
    """Capacity/success exponent budget vs attraction-basin fraction."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(f_values, budget, "o-")
    ax.set_xlabel("basin radius fraction f = R(N)/N")
    ax.set_ylabel("exponent budget C1 + C2")
    _save(fig, path)


def plot_montecarlo(results, path: str | Path) -> None:
    """Empirical recall rate vs the (P*)^(p-1) lower bound."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ps = [r.p for r in results]
    ax.plot(ps, [r.success_rate for r in results], "o-", label="empirical rate")
    ax.plot(ps, [r.predicted_lower_bound for r in results], "s--", label="(P*)^(p-1)")
    ax.set_xlabel("stored memories p")
    ax.set_ylabel("recall success rate")
    ax.set_xticks(ps)
    ax.set_ylim(0, 1.05)
    ax.legend()
    _save(fig, path)


def plot_gap(s_values, gaps, path: str | Path) -> None:
    """Instantaneous spectral gap along the anneal."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(s_values, gaps, "-")
    i = int(np.argmin(gaps))
    ax.plot(s_values[i], gaps[i], "rv", label=f"min gap = {gaps[i]:.4g} at s = {s_values[i]:.3g}")
    ax.set_xlabel("normalized anneal time s")
    ax.set_ylabel("E1(s) - E0(s)")
    ax.legend()
    _save(fig, path)
