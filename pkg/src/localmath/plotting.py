"""Figures written next to the CSV output of the command line tool."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "legend.fontsize": 9,
    "lines.linewidth": 1.4,
    "savefig.dpi": 150,
    "svg.hashsalt": "localmath",
}


def _figure(width=6.0, height=None):
    golden = (np.sqrt(5) - 1.0) / 2.0
    return plt.figure(figsize=(width, height or width * golden))


def _save(fig, path):
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, bbox_inches="tight", metadata={"Software": None} if str(path).endswith(".png") else {"Date": None})
    plt.close(fig)


def plot_trajectory(result, path, title=None):
    """Spatial projections and velocity components of a geodesic."""
    with plt.rc_context(_RC):
        fig = _figure(8.0, 3.4)
        ax1, ax2 = fig.subplots(1, 2)
        p = result.positions
        ax1.plot(p[:, 1], p[:, 2], label="$y^1$-$y^2$")
        ax1.plot(p[:, 1], p[:, 3], "--", label="$y^1$-$y^3$")
        ax1.plot(p[0, 1], p[0, 2], "ko", ms=3)
        ax1.set_xlabel("$y^1$")
        ax1.set_ylabel("$y^2$, $y^3$")
        ax1.legend(frameon=False)
        for mu in range(4):
            ax2.plot(result.tau, result.velocities[:, mu], label=f"$v^{mu}$")
        ax2.set_xlabel(r"$\tau$")
        ax2.legend(frameon=False, ncol=2)
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        _save(fig, path)


def plot_convergence(steps, errors, path, title=None):
    """Log-log error against step size with a first-order guide."""
    steps = np.asarray(steps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    with plt.rc_context(_RC):
        fig = _figure(4.5)
        ax = fig.add_subplot(111)
        ax.loglog(steps, errors, "o-", label="|quotient - D|")
        ref = errors[0] * steps / steps[0]
        ax.loglog(steps, ref, "k:", label="slope 1")
        ax.set_xlabel("h")
        ax.set_ylabel("error")
        ax.legend(frameon=False)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)
