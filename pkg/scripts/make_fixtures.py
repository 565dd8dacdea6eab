"""Regenerate the JSON fixtures under fixtures/.

Graph fixtures use 0-based ids (agent k in one-based numbering is id k-1).
Scenario coordinates are rounded so the files stay readable.
"""
import json
from pathlib import Path

import numpy as np

from pseudorange_rigidity.gnss import (
    Constellation, Receiver, Satellite, Scenario, dump_scenario, formation_graph,
)
from pseudorange_rigidity.graphs import graph_to_dict

OUT = Path(__file__).resolve().parents[1] / "fixtures"

GRAPHS = {
    # 1->2, 2->1, 1->3, 2->3
    "fig2a": [[0, 1], [1, 0], [0, 2], [1, 2]],
    # same but 3->2
    "fig2b": [[0, 1], [1, 0], [0, 2], [2, 1]],
    # mutual triangle on 1,2,3 plus one arc from each into 4
    "fig2c": [[0, 1], [1, 0], [0, 2], [2, 0], [1, 2], [2, 1], [0, 3], [1, 3], [2, 3]],
}
GRAPHS["fig2d"] = GRAPHS["fig2c"]


def sky(rng, count, radius=10.0):
    out = []
    while len(out) < count:
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        if v[2] > 0.3:
            out.append(np.round(radius * v, 3))
    return out


def two_receiver_scenarios():
    rng = np.random.default_rng(20240601)
    pos = sky(rng, 8)
    receivers = (
        Receiver("r1", np.array([0.12, 0.35, 0.08]), 0.41),
        Receiver("r2", np.array([0.83, 0.57, 0.21]), -0.27),
    )
    g_bias, e_bias = 0.15, -0.62
    g = Constellation("G", g_bias, tuple(Satellite(f"G{i+1}", "G", pos[i], g_bias) for i in range(4)))
    e = Constellation("E", e_bias, tuple(Satellite(f"E{i+1}", "E", pos[4 + i], e_bias) for i in range(4)))
    fig1b = Scenario(
        3, (g, e), receivers,
        (("G1", "r1"), ("G2", "r1"), ("E1", "r1"), ("E2", "r1"),
         ("G3", "r2"), ("G4", "r2"), ("E3", "r2"), ("E4", "r2")),
        (("r1", "r2"),),
    )
    # single constellation over the same sky: each receiver keeps 2 + C = 3 pseudoranges
    mono = Constellation("G", g_bias, tuple(Satellite(f"G{i+1}", "G", pos[i], g_bias) for i in range(8)))
    fig1a = Scenario(
        3, (mono,), receivers,
        (("G1", "r1"), ("G2", "r1"), ("G5", "r1"),
         ("G3", "r2"), ("G4", "r2"), ("G7", "r2")),
        (("r1", "r2"),),
    )
    pvt = Scenario(
        3, (Constellation("G", g_bias, tuple(Satellite(f"G{i+1}", "G", pos[i], g_bias) for i in range(4))),),
        (receivers[0],),
        tuple((f"G{i+1}", "r1") for i in range(4)),
    )
    return fig1a, fig1b, pvt


def main():
    OUT.mkdir(exist_ok=True)
    for name, arcs in GRAPHS.items():
        n = 1 + max(max(a) for a in arcs)
        doc = {"n": n, "arcs": arcs, "edges_distance": [], "edges_sync": []}
        (OUT / f"{name}.json").write_text(json.dumps(doc) + "\n")
    (OUT / "fig7_formation.json").write_text(json.dumps(graph_to_dict(formation_graph(6, 2))) + "\n")
    fig1a, fig1b, pvt = two_receiver_scenarios()
    dump_scenario(fig1a, OUT / "fig1a_scenario.json")
    dump_scenario(fig1b, OUT / "fig1b_scenario.json")
    dump_scenario(pvt, OUT / "pvt_scenario.json")


if __name__ == "__main__":
    main()
