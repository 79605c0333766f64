"""SVG drawings of an ellipse/ellipsoid with frame vectors, for n <= 3."""

import numpy as np


def _surface_2d(D, radius):
    t = np.linspace(0, 2 * np.pi, 721)
    dirs = np.stack([np.cos(t), np.sin(t)])
    q = np.einsum("it,ij,jt->t", dirs, D, dirs)
    with np.errstate(divide="ignore"):
        scale = np.where(q > 1e-12, 1 / np.sqrt(np.maximum(q, 1e-300)), np.nan)
    pts = dirs * np.minimum(scale, radius)
    pts[:, ~np.isfinite(scale) | (scale > radius)] = np.nan
    return pts


def save_svg(path, vectors, D=None, title=""):
    """Write ``vectors`` (rows) and, if given, the surface ``<D x, x> = 1`` to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    n = V.shape[1]
    if n > 3:
        raise ValueError("plots are limited to dimension 3")
    radius = 1.25 * max(1e-12, float(np.max(np.linalg.norm(V, axis=1))))
    if n == 3:
        fig = plt.figure(figsize=(5, 5))
        ax = fig.add_subplot(projection="3d")
        if D is not None and np.all(np.linalg.eigvalsh(D) > 1e-12):
            w, U = np.linalg.eigh(D)
            u, v = np.mgrid[0:2 * np.pi:40j, 0:np.pi:20j]
            sphere = np.stack([np.cos(u) * np.sin(v), np.sin(u) * np.sin(v), np.cos(v)])
            surf = np.einsum("ij,j,jab->iab", U, 1 / np.sqrt(w), sphere)
            ax.plot_wireframe(*surf, color="0.75", linewidth=0.4)
        zero = np.zeros(len(V))
        ax.quiver(zero, zero, zero, V[:, 0], V[:, 1], V[:, 2], color="C0")
        ax.set_xlim(-radius, radius), ax.set_ylim(-radius, radius), ax.set_zlim(-radius, radius)
    else:
        fig, ax = plt.subplots(figsize=(5, 5))
        if n == 1:
            V = np.hstack([V, np.zeros((len(V), 1))])
            if D is not None:
                x = 1 / np.sqrt(float(D[0, 0]))
                ax.axvline(x, color="0.6", lw=0.8), ax.axvline(-x, color="0.6", lw=0.8)
        elif D is not None:
            ax.plot(*_surface_2d(D, radius), color="0.6", lw=0.8)
        for v in V:
            ax.annotate("", xy=v, xytext=(0, 0), arrowprops=dict(arrowstyle="->", color="C0"))
        ax.set_xlim(-radius, radius), ax.set_ylim(-radius, radius)
        ax.set_aspect("equal")
    ax.set_title(title)
    fig.savefig(path, format="svg")
    plt.close(fig)
