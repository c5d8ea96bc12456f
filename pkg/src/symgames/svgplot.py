"""Static SVG regret heatmaps over the 3-action simplex.

Corners follow action order counter-clockwise from the bottom left: action
0 bottom left, action 1 bottom right, action 2 on top. Coordinates are
printed with fixed precision so output is byte-stable.
"""
from xml.sax.saxutils import escape

import numpy as np

from symgames import combinatorics as comb
from symgames import representations as rep
from symgames.errors import UnsupportedActions

# anchor colors from dark (no regret) to bright (largest regret)
_COLORS = np.array([[13, 8, 135], [126, 3, 168], [204, 71, 120], [248, 149, 64], [240, 249, 33]])
_MARGIN = 40


def _corners(size):
    height = size * np.sqrt(3) / 2
    top = _MARGIN
    bottom = _MARGIN + height
    return np.array([[_MARGIN, bottom], [_MARGIN + size, bottom], [_MARGIN + size / 2, top]])


def to_xy(mixtures, size=400):
    """Barycentric mixtures (rows) to SVG coordinates."""
    return np.atleast_2d(mixtures) @ _corners(size)


def color(t):
    t = float(np.clip(t, 0, 1)) * (len(_COLORS) - 1)
    k = min(int(t), len(_COLORS) - 2)
    rgb = _COLORS[k] + (t - k) * (_COLORS[k + 1] - _COLORS[k])
    return "#%02x%02x%02x" % tuple(int(round(c)) for c in rgb)


def _points(xy):
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in xy)


def regret_grid(game, resolution):
    """Regret at every lattice point ``counts / resolution``, keyed by counts."""
    lattice = comb.profile_table(resolution, 3).T
    mixtures = lattice / resolution
    dev = np.asarray(game.deviation_payoffs_batch(mixtures), dtype=float).T
    regrets = dev.max(1) - np.sum(dev * mixtures, 1)
    return {tuple(c): r for c, r in zip(lattice.tolist(), regrets)}


def _triangles(resolution):
    # up triangles from points summing to r - 1, down triangles from r - 2
    for i, j, k in comb.profile_table(resolution - 1, 3).T.tolist():
        yield [(i + 1, j, k), (i, j + 1, k), (i, j, k + 1)]
    if resolution >= 2:
        for i, j, k in comb.profile_table(resolution - 2, 3).T.tolist():
            yield [(i + 1, j + 1, k), (i + 1, j, k + 1), (i, j + 1, k + 1)]


def heatmap_svg(game, resolution=30, traces=(), equilibria=(), epsilon=None, names=None, size=400):
    """Render regret over the simplex.

    ``traces`` is a list of mixture sequences drawn as polylines and
    ``equilibria`` a list of mixtures drawn as large points. When
    ``epsilon`` is given, only equilibria whose recomputed regret is at most
    ``epsilon`` are drawn.
    """
    if game.num_actions != 3:
        raise UnsupportedActions(f"simplex plots need 3 actions, game has {game.num_actions}")
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    names = names or getattr(game, "names", None) or ["0", "1", "2"]
    regrets = regret_grid(game, resolution)
    top = max(regrets.values()) or 1.0
    width = size + 2 * _MARGIN
    height = size * np.sqrt(3) / 2 + 2 * _MARGIN
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
           f'viewBox="0 0 {width:.0f} {height:.0f}">',
           '<g id="heatmap" stroke="none">']
    for tri in _triangles(resolution):
        value = np.mean([regrets[v] for v in tri])
        xy = to_xy(np.array(tri) / resolution, size)
        out.append(f'<polygon points="{_points(xy)}" fill="{color(value / top)}" '
                   f'data-regret="{value:.6g}"/>')
    out.append("</g>")
    corners = _corners(size)
    out.append(f'<polygon id="frame" points="{_points(corners)}" fill="none" stroke="black"/>')
    offsets = [(-6, 18, "end"), (6, 18, "start"), (0, -8, "middle")]
    for (x, y), (dx, dy, anchor), name in zip(corners, offsets, names):
        out.append(f'<text class="corner" x="{x + dx:.2f}" y="{y + dy:.2f}" '
                   f'text-anchor="{anchor}" font-size="14">{escape(str(name))}</text>')
    out.append('<g id="traces" fill="none" stroke="white" stroke-width="1">')
    for trace in traces:
        out.append(f'<polyline points="{_points(to_xy(np.asarray(trace), size))}"/>')
    out.append("</g>")
    out.append('<g id="equilibria" fill="white" stroke="black">')
    for mixture in equilibria:
        mixture = np.asarray(mixture, dtype=float)
        r = rep.regret(game, mixture)
        if epsilon is not None and r > epsilon:
            continue
        (x, y), = to_xy(mixture, size)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="6" data-regret="{r:.6g}"/>')
    out.append("</g>")
    out.append(f'<text x="{_MARGIN}" y="{_MARGIN / 2:.0f}" font-size="12">max regret {top:.4g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
