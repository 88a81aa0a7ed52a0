"""Matplotlib rendering of scan tables, one figure style per subcommand."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .table import ScanTable

_TAG_COLORS = {"upper-upper": "tab:blue", "lower-lower": "tab:orange", "mixed": "tab:green"}


def _floats(table: ScanTable, name: str) -> np.ndarray:
    return np.array([math.nan if v is None else float(v) for v in table.column_values(name)])


def _line_figure(x, y, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, y, lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig


def render_figure(subcommand: str, table: ScanTable):
    maker = _MAKERS.get(subcommand)
    if maker is None:
        raise ValueError(f"no figure defined for subcommand {subcommand!r}")
    return maker(table)


def save_figure(subcommand: str, table: ScanTable, path: str) -> None:
    fig = render_figure(subcommand, table)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)


def _fig_single_dispersion(table):
    fig = _line_figure(_floats(table, "k"), _floats(table, "omega"),
                       "k", "single-photon energy")
    fig.axes[0].set_ylim(-8, 8)
    return fig


def _fig_continuum(table):
    fig, ax = plt.subplots(figsize=(6, 4))
    K = _floats(table, "K")
    lo = _floats(table, "lower")
    hi = _floats(table, "upper")
    tags = table.column_values("branch_tag")
    span = 8.0
    for k, a, b, tag in zip(K, lo, hi, tags):
        a = -span if math.isnan(a) else max(a, -span)
        b = span if math.isnan(b) else min(b, span)
        if b > a:
            ax.vlines(k, a, b, color=_TAG_COLORS.get(tag, "gray"), alpha=0.35, lw=2)
    ax.set_xlabel("K")
    ax.set_ylabel("pair energy")
    ax.set_ylim(-span, span)
    return fig


def _fig_bound_dispersion(table):
    return _line_figure(_floats(table, "K"), _floats(table, "omega"),
                        "K", "bound-state energy")


def _fig_state_profile(table):
    fig, ax = plt.subplots(figsize=(6, 4))
    d = _floats(table, "delta")
    amp = _floats(table, "amplitude")
    ax.plot(d, amp, "o-", ms=3, lw=1)
    ax.set_xlabel("separation")
    ax.set_ylabel("amplitude")
    ax.grid(True, alpha=0.3)
    return fig


def _fig_z_magnitudes(table):
    fig, ax = plt.subplots(figsize=(6, 4))
    K = _floats(table, "K")
    ax.plot(K, _floats(table, "abs_z1"), label="|z1|", lw=1.2)
    ax.plot(K, _floats(table, "abs_z2"), label="|z2|", lw=1.2)
    ax.set_xlabel("K")
    ax.set_ylabel("root magnitude")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def _fig_resonance_scan(table):
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    om = _floats(table, "omega")
    ax1.plot(om, _floats(table, "c_squared"), lw=1.2)
    ax1.set_ylabel("localized weight")
    ax2.plot(om, _floats(table, "phi_unwrapped"), lw=1.2, color="tab:red")
    ax2.set_ylabel("phase")
    ax2.set_xlabel("energy")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
    return fig


def _fig_branches(table):
    fig, ax = plt.subplots(figsize=(6, 4))
    K = _floats(table, "K")
    om = _floats(table, "omega_peak")
    w = _floats(table, "fwhm")
    ax.errorbar(K, om, yerr=np.where(np.isfinite(w), 0.5 * w, 0.0),
                fmt="o", ms=2.5, elinewidth=1, capsize=0)
    ax.set_xlabel("K")
    ax.set_ylabel("peak energy")
    ax.grid(True, alpha=0.3)
    return fig


def _fig_width_vs_k(table):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(_floats(table, "K"), _floats(table, "fwhm"), "o-", ms=4, lw=1)
    ax.set_xlabel("K")
    ax.set_ylabel("resonance width")
    ax.grid(True, alpha=0.3)
    return fig


def _fig_roots(table):
    fig, ax = plt.subplots(figsize=(5, 5))
    th = np.linspace(0, 2 * math.pi, 256)
    ax.plot(np.cos(th), np.sin(th), "k--", lw=0.7, alpha=0.5)
    ax.plot(_floats(table, "re"), _floats(table, "im"), "o", ms=3)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_aspect("equal")
    ax.grid(True, alpha=0.3)
    return fig


def _fig_validate(table):
    fig, ax = plt.subplots(figsize=(6, 4))
    K = _floats(table, "K")
    ax.semilogy(K, _floats(table, "interior_max"), "o-", ms=3, lw=1, label="interior")
    ax.semilogy(K, _floats(table, "boundary_max"), "s--", ms=3, lw=1, label="boundary")
    ax.set_xlabel("K")
    ax.set_ylabel("residual")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return fig


def _fig_dos(table):
    fig, ax = plt.subplots(figsize=(6, 4))
    lo = _floats(table, "bin_lo")
    hi = _floats(table, "bin_hi")
    mass = _floats(table, "mass")
    ax.stairs(mass, np.append(lo, hi[-1]))
    ax.set_xlabel("pair energy")
    ax.set_ylabel("mass")
    ax.grid(True, alpha=0.3)
    return fig


_MAKERS = {
    "single-dispersion": _fig_single_dispersion,
    "continuum": _fig_continuum,
    "bound-dispersion": _fig_bound_dispersion,
    "state-profile": _fig_state_profile,
    "z-magnitudes": _fig_z_magnitudes,
    "resonance-scan": _fig_resonance_scan,
    "branches": _fig_branches,
    "width-vs-K": _fig_width_vs_k,
    "roots": _fig_roots,
    "validate": _fig_validate,
    "dos": _fig_dos,
}
