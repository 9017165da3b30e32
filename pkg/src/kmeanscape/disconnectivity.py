"""Disconnectivity trees: superbasin analysis across thresholds, plus SVG output.

The tree records, for a descending ladder of equally spaced cost
thresholds, the partition of minima into superbasins. Basins merge
monotonically as the threshold rises. Rendering draws each minimum as a
line originating at its own cost value, joining others at the level where
their basins merge; leaf order puts larger basins first.
"""

import json
from dataclasses import dataclass

import numpy as np

from .analysis import superbasins


@dataclass
class BasinNode:
    level: int
    members: frozenset
    parent: int | None  # index into the previous level's node list


@dataclass
class DisconnectivityTree:
    levels: np.ndarray  # descending thresholds
    nodes: list  # nodes[i] = list of BasinNode at level i
    leaves: dict  # min_id -> cost

    @property
    def n_minima(self):
        return len(self.leaves)


def build_disconnectivity(net, n_levels=100, j_min=None, j_max=None) -> DisconnectivityTree:
    """Superbasin partitions at ``n_levels`` equally spaced thresholds.

    Defaults span from the global minimum cost up to 2% above the highest
    transition state (or highest minimum when no transition states exist).
    """
    if n_levels < 2:
        raise ValueError("need at least two levels")
    min_costs = {m: rec.cost for m, rec in net.minima.items()}
    if not min_costs:
        raise ValueError("network has no minima")
    if j_min is None:
        j_min = min(min_costs.values())
    if j_max is None:
        top = max(ts.cost for ts in net.transition_states.values()) if net.transition_states else max(min_costs.values())
        j_max = 1.02 * top + 1e-9
    if not j_max > j_min:
        raise ValueError("j_max must exceed j_min")
    if all(c >= j_max for c in min_costs.values()):
        raise ValueError("thresholds exclude all minima")

    levels = np.linspace(j_max, j_min, n_levels)
    nodes = []
    prev_lookup = {}
    for i, t in enumerate(levels):
        basins = superbasins(net, t)
        level_nodes = []
        lookup = {}
        for basin in basins:
            parent = prev_lookup.get(min(basin)) if i > 0 else None
            node = BasinNode(level=i, members=frozenset(basin), parent=parent)
            lookup.update({m: len(level_nodes) for m in basin})
            level_nodes.append(node)
        nodes.append(level_nodes)
        prev_lookup = lookup
    return DisconnectivityTree(levels=levels, nodes=nodes, leaves=dict(min_costs))


def _leaf_order(tree: DisconnectivityTree):
    """Depth-first leaf ordering, larger basins first at every split."""
    order = []

    def descend(level, node_idx):
        node = tree.nodes[level][node_idx]
        if level + 1 == len(tree.nodes):
            order.extend(sorted(node.members, key=lambda m: (tree.leaves[m], m)))
            return
        children = [
            i for i, child in enumerate(tree.nodes[level + 1]) if child.parent == node_idx
        ]
        children.sort(
            key=lambda i: (
                -len(tree.nodes[level + 1][i].members),
                min(tree.nodes[level + 1][i].members),
            )
        )
        for child in children:
            descend(level + 1, child)

    roots = sorted(
        range(len(tree.nodes[0])),
        key=lambda i: (-len(tree.nodes[0][i].members), min(tree.nodes[0][i].members)),
    )
    for root in roots:
        descend(0, root)
    return order


_VIRIDIS = [
    (0.267, 0.005, 0.329),
    (0.283, 0.141, 0.458),
    (0.254, 0.265, 0.530),
    (0.207, 0.372, 0.553),
    (0.164, 0.471, 0.558),
    (0.128, 0.567, 0.551),
    (0.135, 0.659, 0.518),
    (0.267, 0.749, 0.441),
    (0.478, 0.821, 0.318),
    (0.741, 0.873, 0.150),
    (0.993, 0.906, 0.144),
]

_CATEGORY_PALETTE = [
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee",
    "#aa3377", "#bbbbbb", "#000000", "#e6822d", "#7d5fa8",
    "#44aa99", "#882255",
]


def _continuous_colour(value, lo, hi):
    if hi <= lo:
        frac = 0.5
    else:
        frac = min(max((value - lo) / (hi - lo), 0.0), 1.0)
    pos = frac * (len(_VIRIDIS) - 1)
    i = min(int(pos), len(_VIRIDIS) - 2)
    w = pos - i
    rgb = [(1 - w) * _VIRIDIS[i][c] + w * _VIRIDIS[i + 1][c] for c in range(3)]
    return "#{:02x}{:02x}{:02x}".format(*(int(round(255 * v)) for v in rgb))


def emit_disconnectivity(
    tree: DisconnectivityTree,
    out_path,
    coloring=None,
    categorical=False,
    width=640,
    height=800,
    sidecar=True,
):
    """Write the tree as an SVG file (plus a JSON geometry sidecar).

    ``coloring`` maps minimum id to a value; continuous values are mapped
    through a perceptual gradient, categorical ones through a fixed
    palette. Output contains no timestamps, so identical inputs give
    byte-identical files.
    """
    order = _leaf_order(tree)
    n = len(order)
    leaf_x = {m: (i + 0.5) / n for i, m in enumerate(order)}

    j_hi = float(tree.levels[0])
    j_lo = min(min(tree.leaves.values()), float(tree.levels[-1]))
    pad_l, pad_r, pad_t, pad_b = 72, 16, 16, 24

    def sx(x):
        return pad_l + x * (width - pad_l - pad_r)

    def sy(j):
        frac = (j_hi - j) / (j_hi - j_lo) if j_hi > j_lo else 0.5
        return pad_t + frac * (height - pad_t - pad_b)

    # node x = mean of member leaf positions
    node_x = []
    for level_nodes in tree.nodes:
        node_x.append([float(np.mean([leaf_x[m] for m in node.members])) for node in level_nodes])

    segments = []
    last_drawn = {}  # min_id -> (x, y) of the lowest drawn singleton chain point
    for i, level_nodes in enumerate(tree.nodes):
        t = float(tree.levels[i])
        for idx, node in enumerate(level_nodes):
            singleton = len(node.members) == 1
            if singleton:
                (m,) = node.members
                if tree.leaves[m] >= t:
                    continue  # minimum not born yet at this threshold
            x = node_x[i][idx]
            if i == 0 or node.parent is None:
                top = (x, t)
            else:
                top = (node_x[i - 1][node.parent], float(tree.levels[i - 1]))
            segments.append((top, (x, t)))
            for m in node.members:
                last_drawn[m] = (x, t)

    for m, cost in tree.leaves.items():
        x_leaf = leaf_x[m]
        if m in last_drawn:
            segments.append((last_drawn[m], (x_leaf, cost)))

    values = None
    if coloring is not None:
        values = {m: coloring[m] for m in tree.leaves}

    def leaf_colour(m):
        if values is None:
            return "#555555"
        if categorical:
            cats = sorted(set(values.values()))
            return _CATEGORY_PALETTE[cats.index(values[m]) % len(_CATEGORY_PALETTE)]
        lo, hi = min(values.values()), max(values.values())
        return _continuous_colour(values[m], lo, hi)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    # cost axis with ticks
    parts.append(
        f'<line x1="{pad_l - 8}" y1="{sy(j_hi):.2f}" x2="{pad_l - 8}" y2="{sy(j_lo):.2f}" '
        'stroke="black" stroke-width="1"/>'
    )
    for tick in np.linspace(j_lo, j_hi, 6):
        y = sy(float(tick))
        parts.append(
            f'<line x1="{pad_l - 12}" y1="{y:.2f}" x2="{pad_l - 8}" y2="{y:.2f}" '
            'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{pad_l - 16}" y="{y + 4:.2f}" font-size="11" text-anchor="end" '
            f'font-family="sans-serif">{tick:.6g}</text>'
        )
    for (x1, y1), (x2, y2) in segments:
        parts.append(
            f'<polyline fill="none" stroke="#333333" stroke-width="1.1" '
            f'points="{sx(x1):.2f},{sy(y1):.2f} {sx(x2):.2f},{sy(y2):.2f}"/>'
        )
    for m in order:
        parts.append(
            f'<circle cx="{sx(leaf_x[m]):.2f}" cy="{sy(tree.leaves[m]):.2f}" r="3" '
            f'fill="{leaf_colour(m)}"/>'
        )
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    with open(out_path, "w") as fh:
        fh.write(svg)

    if sidecar:
        geometry = {
            "levels": [float(t) for t in tree.levels],
            "nodes": [
                [
                    {
                        "members": sorted(node.members),
                        "parent": node.parent,
                        "x": node_x[i][j],
                    }
                    for j, node in enumerate(level_nodes)
                ]
                for i, level_nodes in enumerate(tree.nodes)
            ],
            "leaves": {
                str(m): {
                    "x": leaf_x[m],
                    "cost": tree.leaves[m],
                    "value": None if values is None else values[m],
                }
                for m in order
            },
        }
        with open(str(out_path) + ".json", "w") as fh:
            json.dump(geometry, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
    return out_path
