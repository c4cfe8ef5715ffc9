"""Figure rendering for experiment outputs.

Every experiment writes its data as CSV; this module draws the matching
matplotlib figures next to them so a run is inspectable at a glance.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import experiments, theory


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def g2_figure(curves, path: Path, title: str) -> Path:
    """Overlay empirical G2 points (with error bars) and theory lines."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, (label, emp, th) in enumerate(curves):
        color = f"C{i}"
        ax.errorbar(emp.lags * 1e3, emp.values, yerr=emp.stderr, fmt="o",
                    ms=3.5, color=color, label=label, capsize=2, lw=1)
        ax.plot(th.lags * 1e3, th.values, "-", color=color, alpha=0.8)
    ax.axhline(1.0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(r"$\tau$ (ms)")
    ax.set_ylabel(r"$G^{2}(\tau)$")
    ax.set_title(title)
    ax.legend(frameon=False)
    return _save(fig, path)


def pnd_figure(pnd_panels, g2_panels, path: Path, title: str) -> Path:
    """PND bars vs analytic curve, with the G2 curves as an inset."""
    fig, ax = plt.subplots(figsize=(7.5, 5))
    for i, (label, emp, th) in enumerate(pnd_panels):
        color = f"C{i}"
        n_emp = np.arange(emp.probs.size)
        ax.bar(n_emp, emp.probs, width=0.9, color=color, alpha=0.35)
        n_th = np.arange(th.probs.size)
        upto = max(emp.probs.size + 3, int(emp.mean * 2) + 3)
        ax.plot(n_th[:upto], th.probs[:upto], "o-", ms=3, color=color,
                label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("p(n)")
    ax.set_title(title)
    ax.legend(frameon=False)
    if g2_panels:
        inset = ax.inset_axes([0.58, 0.55, 0.4, 0.4])
        for i, (_, emp, th) in enumerate(g2_panels):
            color = f"C{i}"
            inset.plot(emp.lags * 1e3, emp.values, "o", ms=2, color=color)
            inset.plot(th.lags * 1e3, th.values, "-", color=color, alpha=0.8)
        inset.set_xlabel(r"$\tau$ (ms)", fontsize=8)
        inset.set_ylabel(r"$G^{2}(\tau)$", fontsize=8)
        inset.tick_params(labelsize=7)
    return _save(fig, path)


def pfunction_figure(pfunc, path: Path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    titles = {theory.THERMAL: "photon-added thermal",
              theory.ZETA: "photon-added zeta state"}
    for ax, base in zip(axes, (theory.THERMAL, theory.ZETA)):
        names, columns = pfunc[base]
        xs = columns[0]
        for name, col in zip(names[1:], columns[1:]):
            ax.plot(xs, col, label=name.replace("p_nbar", "nbar = "))
        ax.axhline(0.0, color="gray", lw=0.8, ls=":")
        ax.set_xlabel(r"$|\alpha|^{2}$")
        ax.set_title(titles[base])
        ax.legend(frameon=False, fontsize=8)
    axes[0].set_ylabel(r"$\mathcal{P}^{1}(|\alpha|^{2})$")
    return _save(fig, path)


def mandel_q_figure(grid, q_thermal, q_zeta, added_means, path: Path,
                    x_axis: str = "base") -> Path:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if x_axis == "added_mean":
        x_th, x_zeta = added_means
        ax.set_xlabel("mean photon number after addition")
    else:
        x_th = x_zeta = grid
        ax.set_xlabel("base-state mean photon number")
    ax.plot(x_th, q_thermal, label="photon-added thermal")
    ax.plot(x_zeta, q_zeta, label="photon-added zeta state")
    ax.axhline(0.0, color="gray", lw=0.8, ls=":")
    ax.set_ylabel("Mandel Q")
    ax.legend(frameon=False)
    return _save(fig, path)


def entanglement_figure(nbars, mus, entangled, boundary_exact,
                        path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    mesh = ax.pcolormesh(nbars, mus, entangled.T, cmap="Blues", shading="auto",
                         vmin=0, vmax=1)
    ax.plot(nbars, boundary_exact, "r-", lw=1.5,
            label=r"$\mu = \ln(2\bar{n}+1)$")
    ax.set_xlabel(r"$\bar{n}$")
    ax.set_ylabel(r"$\mu$")
    ax.set_ylim(mus[0], mus[-1])
    ax.set_title("definitely entangled region")
    fig.colorbar(mesh, ax=ax, label="entangled")
    ax.legend(frameon=False, loc="lower right")
    return _save(fig, path)


def render(cfg, outdir: Path, extras: dict) -> list[Path]:
    """Render the figures for one experiment run; returns written paths."""
    exp = cfg.experiment
    if exp == experiments.PHASE_NOISE_G2:
        return [g2_figure(extras["g2_curves"], outdir / "fig_g2.png",
                          "second-order correlation vs theory")]
    if exp == experiments.INTENSITY_PND_G2:
        return [pnd_figure(extras["pnd_panels"], extras["g2_panels"],
                           outdir / "fig_pnd.png",
                           "photon number distribution vs theory")]
    if exp == experiments.PHOTON_ADDED_ANALYTICS:
        return [
            pfunction_figure(extras["pfunction"], outdir / "fig_pfunction.png"),
            mandel_q_figure(extras["q_grid"], extras["q_thermal"],
                            extras["q_zeta"],
                            (extras["added_mean_thermal"],
                             extras["added_mean_zeta"]),
                            outdir / "fig_mandel_q.png",
                            x_axis=extras["q_axis"]),
        ]
    if exp == experiments.ENTANGLEMENT_SCAN:
        return [entanglement_figure(extras["nbars"], extras["mus"],
                                    extras["entangled"],
                                    extras["boundary_exact"],
                                    outdir / "fig_entanglement.png")]
    return []
