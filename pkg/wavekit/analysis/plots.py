import logging
from typing import List, Optional

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..wave.gluing import GluedZ  # noqa: E402
from ..wave.profile import WaveProfile  # noqa: E402


def zero_marks(glued: GluedZ) -> List[float]:
    """Interior zeros of D, where the pieces of z are glued"""
    return sorted(glued.one_sided_slopes)


def plot_wave(profile: WaveProfile, glued: GluedZ, filename: str, title: Optional[str] = None) -> str:
    """Two-panel figure: the profile u(t) and the first-order solution z(u)"""
    fig, axes = plt.subplots(1, 2, figsize=(12, 5))
    fig.suptitle(title or f"Travelling wave at c = {profile.c:.6f}", fontsize=14)

    axes[0].plot(profile.t, profile.u, color='tab:blue')
    axes[0].set_title('Profile')
    axes[0].set_xlabel('t = x - c tau')
    axes[0].set_ylabel('u')
    axes[0].set_ylim(-0.05, 1.05)
    axes[0].grid(alpha=0.3)

    for piece in glued.pieces:
        label = f"k = {piece.k} ({piece.feasibility})"
        axes[1].plot(piece.u, piece.z, label=label)
    for u0 in zero_marks(glued):
        axes[1].axvline(u0, color='grey', linestyle=':', linewidth=0.8)
    axes[1].axhline(0.0, color='black', linewidth=0.6)
    axes[1].set_title('z(u) = D(u) u\'')
    axes[1].set_xlabel('u')
    axes[1].set_ylabel('z')
    axes[1].legend(loc='best', fontsize=8)
    axes[1].grid(alpha=0.3)

    plt.tight_layout()
    plt.savefig(filename, format='svg', bbox_inches='tight')
    plt.close(fig)
    logging.info(f"Wave figure written to {filename}")
    return filename


def plot_sweep(rows, filename: str, c_hat: Optional[float] = None) -> str:
    """Existence verdicts against speed, one marker per sweep point"""
    codes = {'no': 0, 'undetermined': 1, 'yes': 2}
    speeds = np.array([row['c'] for row in rows], dtype=float)
    verdicts = np.array([codes.get(row['exists'], 1) for row in rows])

    fig, ax = plt.subplots(figsize=(8, 3))
    ax.scatter(speeds, verdicts, c=verdicts, cmap='RdYlGn', vmin=0, vmax=2)
    if c_hat is not None:
        ax.axvline(c_hat, color='black', linestyle='--', label=f"c_hat = {c_hat:.6f}")
        ax.legend(loc='lower right')
    ax.set_yticks(list(codes.values()))
    ax.set_yticklabels(list(codes.keys()))
    ax.set_xlabel('c')
    ax.set_title('Existence of a wave by speed')

    plt.tight_layout()
    plt.savefig(filename, format='svg', bbox_inches='tight')
    plt.close(fig)
    logging.info(f"Sweep figure written to {filename}")
    return filename
