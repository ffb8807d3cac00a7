"""Figure rendering for the CLI report path.

Each sweep gets one PNG next to its CSV.  The CSV is the data contract;
the figures are a convenience view of the same rows.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _new_axes(xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(5.2, 3.4), constrained_layout=True)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path):
    fig.savefig(path, dpi=160)
    plt.close(fig)


def plot_force_curve(rows, kappa, k_p, path):
    """Normalized total force against velocity in units of kappa/k_p."""
    unit = kappa / k_p
    v = [r.x / unit for r in rows]
    f = [r.normalized for r in rows]
    fig, ax = _new_axes(r"$v \, k_p/\kappa$", r"$F / F_{\mathrm{fs}}$")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.plot(v, f, lw=1.2)
    _save(fig, path)


def _family_chunks(rows, family):
    per = len(rows) // max(len(family), 1)
    return [(fam, rows[i * per:(i + 1) * per]) for i, fam in enumerate(family)]


def plot_kappa_sweep(rows, family, delta_mode, path):
    """Normalized friction against loss rate, log-log, one line per detuning."""
    fig, ax = _new_axes(r"$\kappa$ (1/s)", r"$\beta / \beta_{\mathrm{fs,max}}$")
    for fam, pts in _family_chunks(rows, family):
        xs = [r.x for r in pts]
        ys = [abs(r.normalized) for r in pts]
        if delta_mode == "ratio":
            label = rf"$\Delta = {fam:g}\,\kappa$"
        else:
            label = rf"$\Delta = {fam:g}$ rad/s"
        ax.loglog(xs, ys, marker="o", ms=3, lw=1.0, label=label)
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_delta_sweep(rows, family, path):
    """Normalized friction against threshold detuning, one line per kappa."""
    fig, ax = _new_axes(r"$\Delta / \kappa$", r"$\beta / \beta_{\mathrm{fs,max}}$")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.axvline(0.0, color="0.6", lw=0.8)
    for fam, pts in _family_chunks(rows, family):
        xs = [r.x / fam for r in pts]
        ys = [r.normalized for r in pts]
        ax.plot(xs, ys, lw=1.0, label=rf"$\kappa = {fam:g}$ 1/s")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_shift(vs, shifts, kappa, k_p, path):
    """Waveguide light shift and broadening against velocity."""
    unit = kappa / k_p
    fig, ax = _new_axes(r"$v \, k_p/\kappa$", "rate (rad/s)")
    ax.plot([v / unit for v in vs], [s.delta_shift for s in shifts],
            lw=1.0, label=r"$\Delta_A$")
    ax.plot([v / unit for v in vs], [s.gamma_broad for s in shifts],
            lw=1.0, label=r"$\Gamma_A$")
    ax.legend(fontsize=8)
    _save(fig, path)
