#!/usr/bin/env python3
"""Regenerate scenarios/pearl_harbor.json.

The raster geometry of the original study was never published, only the
region membership of raster ids and a handful of path-length facts. This
script rebuilds a 260-raster graph from those facts in a fixed, documented
way. It uses the standard library only and is fully deterministic.

Run from the repository root:

    python3 scenarios/generate_pearl_harbor.py > scenarios/pearl_harbor.json
"""

import itertools
import json
import math

# ---------------------------------------------------------------- regions

REGIONS = {
    "PHILIPPINES": [90, 91, 92, 93, 94, 95, 158],
    "BORNEO": [2, 3, 22, 23, 27, 54, 55, 56, 94, 95],
    "KRA": [17, 18, 52, 53, 56, 57, 86, 87, 88],
    "OAHU": [204, 205, 206, 207, 208, 209, 229, 230, 233, 238, 258, 259, 260],
    "KURILES": [215, 216, 220, 240],
    "THAILAND": [85, 86, 87],
}
MANDATES = (
    list(range(7, 13))
    + list(range(28, 40))
    + list(range(64, 76))
    + list(range(96, 103))
    + [105, 106, 107, 128, 129, 135, 136, 137]
)
CHINA = [122, 155, 156, 159]
HOME = [186, 187, 188, 189, 190, 191]
N_RASTERS = 260
BLOCKED = [85, 86]

# ---------------------------------------------------------------- topology


class Graph:
    def __init__(self):
        self.names = []
        self.groups = {}
        self.cls = {}
        self.adj = {}

    def add(self, name, n, k=None, cls="other"):
        ids = [f"{name}{i}" for i in range(n)]
        self.names += ids
        self.groups[name] = ids
        for x in ids:
            self.cls[x] = cls
            self.adj.setdefault(x, set())
        if k is None or k >= n - 1:
            for a, b in itertools.combinations(ids, 2):
                self.link(a, b)
        else:
            for i in range(n):
                for d in range(1, k // 2 + 1):
                    self.link(ids[i], ids[(i + d) % n])
        return ids

    def link(self, a, b):
        if a != b:
            self.adj[a].add(b)
            self.adj[b].add(a)

    def fwd(self, a_ids, b_ids, per=1):
        # round-robin: every node of A gets `per` neighbours spread over B
        for i, a in enumerate(a_ids):
            for r in range(per):
                j = (i * per + r) * len(b_ids) // (len(a_ids) * per) % len(b_ids)
                self.link(a, b_ids[j])


OAHU_WIDTHS = [3, 4, 6, 8, 11, 15, 20, 27]
OAHU_MANDATE_NODES = [0, 0, 0, 3, 3, 0, 0, 0]
POOL_WIDTHS = [10, 21, 16]


def build():
    g = Graph()
    home = g.add("H", 6, 4, cls="home")  # H5 is Sasebo, raster 191
    layers = []
    for i, w in enumerate(OAHU_WIDTHS):
        ids = g.add(f"O{i + 1}_", w, 7)
        for x in ids[: OAHU_MANDATE_NODES[i]]:
            g.cls[x] = "mandates"
        layers.append(ids)
    g.fwd(home[5:], layers[0])
    for a, b in zip(layers, layers[1:]):
        g.fwd(a, b)
    oahu = g.add("OAHU", 13, 4, cls="oahu")
    g.fwd(layers[-1], oahu)

    k1 = g.add("K1_", 4)
    g.fwd(home[3:5], k1)
    k2 = g.add("K2_", 4)
    g.fwd(k1, k2)
    kur = g.add("KUR", 4, cls="kuriles")
    g.fwd(k2, kur)

    m1 = g.add("M1_", 3)
    g.fwd(home[5:], m1)
    phil = g.add("PHIL", 7, cls="philippines")
    g.fwd(m1, phil)
    prev = m1
    pool = []
    for i, w in enumerate(POOL_WIDTHS):
        ids = g.add(f"P{i + 1}_", w, 8)
        g.fwd(ids, prev)
        pool.append(ids)
        prev = ids
    entry = [0, 1, 2, 5]
    for r in range(7):
        g.link(f"H{entry[r % len(entry)]}", pool[0][r % len(pool[0])])

    china = g.add("CHINA", 4, cls="china")
    g.fwd(china, m1)
    scs = g.add("S1_", 6)
    g.fwd(scs, china)
    g.fwd(scs, m1)
    bor = g.add("BOR", 8, cls="borneo")
    g.fwd(bor, phil[5:7])
    g.fwd(bor, scs)
    kra = g.add("KRA", 6, cls="kra")
    g.fwd(kra, bor)
    g.fwd(kra, scs)
    thai = g.add("THAI", 3, cls="thailand")
    g.link("THAI0", "KRA0")
    g.link("THAI0", "BOR1")
    mand = g.add("MAND", 45 - sum(OAHU_MANDATE_NODES), 6, cls="mandates")
    g.fwd(mand[:6], scs)
    fill = g.add("FILL", 12, 4)
    g.fwd(fill[:3], mand[-3:])
    return g


def assign_ids(g):
    fixed = {}
    for i, x in enumerate(g.groups["H"]):
        fixed[x] = HOME[i]
    for i, x in enumerate(g.groups["OAHU"]):
        fixed[x] = REGIONS["OAHU"][i]
    for i, x in enumerate(g.groups["KUR"]):
        fixed[x] = REGIONS["KURILES"][i]
    for x, r in zip(g.groups["PHIL"], [90, 91, 92, 93, 158, 94, 95]):
        fixed[x] = r
    for x, r in zip(g.groups["BOR"], [2, 3, 22, 23, 27, 54, 55, 56]):
        fixed[x] = r
    for x, r in zip(g.groups["KRA"], [17, 18, 52, 53, 57, 88]):
        fixed[x] = r
    for x, r in zip(g.groups["THAI"], [87, 86, 85]):
        fixed[x] = r
    for i, x in enumerate(g.groups["CHINA"]):
        fixed[x] = CHINA[i]
    mand_nodes = [x for x in g.names if g.cls[x] == "mandates"]
    assert len(mand_nodes) == len(MANDATES)
    for x, r in zip(mand_nodes, MANDATES):
        fixed[x] = r
    used = set(fixed.values())
    free = iter(r for r in range(1, N_RASTERS + 1) if r not in used)
    for x in g.names:
        if x not in fixed:
            fixed[x] = next(free)
    assert len(set(fixed.values())) == N_RASTERS == len(g.names)
    return fixed


# ---------------------------------------------------------------- display

ANCHORS = {
    # group prefix -> (lat0, lon0, lat1, lon1): nodes are spread along a segment
    "H": (31.0, 129.0, 35.0, 134.0),
    "K1_": (40.0, 142.0, 41.5, 144.0),
    "K2_": (42.5, 145.0, 43.5, 146.5),
    "KUR": (44.5, 147.0, 45.5, 149.0),
    "OAHU": (20.0, 200.0, 23.0, 203.0),
    "M1_": (22.0, 124.5, 24.0, 126.0),
    "PHIL": (13.0, 119.5, 16.5, 122.0),
    "P1_": (17.0, 127.0, 24.0, 131.0),
    "P2_": (13.0, 130.0, 25.0, 137.0),
    "P3_": (11.0, 136.0, 23.0, 142.0),
    "CHINA": (21.0, 112.0, 24.0, 118.0),
    "S1_": (12.0, 112.0, 18.0, 116.0),
    "BOR": (1.0, 109.0, 7.0, 118.0),
    "KRA": (5.0, 99.0, 9.0, 104.0),
    "THAI": (10.0, 100.0, 13.0, 101.5),
    "MAND": (4.0, 134.0, 12.0, 172.0),
    "FILL": (-2.0, 150.0, 3.0, 170.0),
}


def centroid(name, group, idx, size):
    if group.startswith("O") and group.endswith("_") and group[1:-1].isdigit():
        layer = int(group[1:-1])
        f = layer / 9.0
        lat = 37.0 + (22.0 - 37.0) * f
        lon = 142.0 + (199.0 - 142.0) * f
        spread = 2.0 + 0.5 * size
        lat += spread * ((idx + 0.5) / size - 0.5)
        return round(lat, 2), round(lon, 2)
    lat0, lon0, lat1, lon1 = ANCHORS[group]
    f = (idx + 0.5) / size
    wobble = 0.6 * math.sin(1.7 * idx)
    return round(lat0 + (lat1 - lat0) * f + wobble, 2), round(lon0 + (lon1 - lon0) * f, 2)


REGION_LABEL = {
    "home": "HOME_WATERS",
    "mandates": "MANDATES",
    "china": "CHINA",
    "oahu": "OAHU",
    "kuriles": "KURILES",
    "philippines": "PHILIPPINES",
    "borneo": "BORNEO",
    "kra": "KRA",
    "thailand": "THAILAND",
    "other": "OPEN_SEA",
}

# ---------------------------------------------------------------- crisis network

# Demonstrative CPTs. They were fitted by least squares so that the target
# posterior given both observations matches the canonical target vector to
# better than 1e-7; the prior target column is only approximated.
FIT = {
    "threat": [2.466668531231982e-07, 0.9999951994104395, 0.544300341977515,
               0.7660823458494859, 0.7747587636524611],
    "unpredicted_given_threat": {"NO": 1.3375881372251907e-06, "YES": 0.9998663055156967},
    "oahu_share_objective": 0.9999997272675571,
    "oahu_share_fleet": 0.10010774397754071,
    "task_forces": [0.018864417017166298, 0.8973918239010338, 0.3332423691400279,
                    0.999999998929954, 1.0],
    "breakdown": {("NO", "NO"): 0.18509710865189827, ("NO", "YES"): 0.9957845674346415,
                  ("YES", "NO"): 0.9957505654099899, ("YES", "YES"): 1.0},
}
OBJECTIVES = ["KURILES", "MANILA_BAY", "THAILAND", "SINGAPORE_KRA", "BORNEO"]
OBJECTIVE_PRIOR = [0.15, 0.15, 0.30, 0.15, 0.25]
TARGETS = ["OAHU", "KURILES", "MANILA_BAY", "THAILAND", "SINGAPORE_KRA", "BORNEO"]
IMMEDIACY = ["IMMEDIATE", "DELAYED"]
D_OUTCOMES = [f"{t}/{m}" for t in TARGETS for m in IMMEDIACY]


def d_row(target_probs):
    row = []
    for t in TARGETS:
        p = target_probs.get(t, 0.0)
        row += [p / 2.0, p / 2.0]
    return row


def crisis_network():
    yn = ["NO", "YES"]
    variables = [
        {"name": "objective", "outcomes": OBJECTIVES, "kind": "chance"},
        {"name": "perceives_threat", "outcomes": yn, "kind": "chance"},
        {"name": "action_unpredicted", "outcomes": yn, "kind": "chance"},
        {"name": "priority", "outcomes": OBJECTIVES + ["US_FLEET"], "kind": "deterministic"},
        {"name": "target", "outcomes": D_OUTCOMES, "kind": "chance"},
        {"name": "diplomatic_breakdown", "outcomes": yn, "kind": "chance"},
        {"name": "task_forces_formed", "outcomes": yn, "kind": "chance"},
    ]
    edges = [
        ["objective", "perceives_threat"],
        ["objective", "priority"],
        ["perceives_threat", "priority"],
        ["perceives_threat", "action_unpredicted"],
        ["priority", "target"],
        ["action_unpredicted", "target"],
        ["perceives_threat", "diplomatic_breakdown"],
        ["action_unpredicted", "diplomatic_breakdown"],
        ["objective", "task_forces_formed"],
    ]
    tables = []
    tables.append({"child": "objective", "parents": [], "rows": [{"given": [], "probs": OBJECTIVE_PRIOR}]})
    tables.append({
        "child": "perceives_threat", "parents": ["objective"],
        "rows": [{"given": [o], "probs": [1 - th, th]} for o, th in zip(OBJECTIVES, FIT["threat"])],
    })
    tables.append({
        "child": "action_unpredicted", "parents": ["perceives_threat"],
        "rows": [{"given": [t], "probs": [1 - u, u]} for t, u in FIT["unpredicted_given_threat"].items()],
    })
    rows = []
    for o in OBJECTIVES:
        for t in yn:
            out = o if t == "NO" else "US_FLEET"
            rows.append({"given": [o, t], "probs": [1.0 if x == out else 0.0 for x in OBJECTIVES + ["US_FLEET"]]})
    tables.append({"child": "priority", "parents": ["objective", "perceives_threat"], "rows": rows})
    rows = []
    for p in OBJECTIVES + ["US_FLEET"]:
        for u in yn:
            if u == "NO":
                probs = {"MANILA_BAY": 1.0} if p == "US_FLEET" else {p: 1.0}
            else:
                s = FIT["oahu_share_fleet"] if p == "US_FLEET" else FIT["oahu_share_objective"]
                probs = {"OAHU": s, "MANILA_BAY": 1.0 - s}
            rows.append({"given": [p, u], "probs": d_row(probs)})
    tables.append({"child": "target", "parents": ["priority", "action_unpredicted"], "rows": rows})
    tables.append({
        "child": "diplomatic_breakdown", "parents": ["perceives_threat", "action_unpredicted"],
        "rows": [{"given": list(k), "probs": [1 - b, b]} for k, b in FIT["breakdown"].items()],
    })
    tables.append({
        "child": "task_forces_formed", "parents": ["objective"],
        "rows": [{"given": [o], "probs": [1 - l, l]} for o, l in zip(OBJECTIVES, FIT["task_forces"])],
    })
    return {
        "variables": variables,
        "edges": edges,
        "tables": tables,
        "evidence": {"diplomatic_breakdown": "YES", "task_forces_formed": "YES"},
        "d_variable": "target",
    }


# ---------------------------------------------------------------- document


def main():
    g = build()
    ids = assign_ids(g)
    group_of = {}
    for gname, members in g.groups.items():
        for i, x in enumerate(members):
            group_of[x] = (gname, i, len(members))
    nodes = []
    for x in sorted(g.names, key=lambda n: ids[n]):
        gname, i, size = group_of[x]
        lat, lon = centroid(x, gname, i, size)
        nodes.append({"id": ids[x], "region": REGION_LABEL[g.cls[x]], "lat": lat, "lon": lon})
    edges = sorted({tuple(sorted((ids[a], ids[b]))) for a in g.names for b in g.adj[a]})

    region_ids = {k: sorted(v) for k, v in REGIONS.items()}
    table6 = {"OAHU": 9.51, "KURILES": 0.1, "MANILA_BAY": 85.5, "THAILAND": 1.61,
              "SINGAPORE_KRA": 1.24, "BORNEO": 1.99}
    total = sum(table6.values())

    silence = lambda p: {"*": [p, 1.0 - p], "NON_FUNCTIONAL,NON_FUNCTIONAL": [0.5, 0.5]}
    partial = sorted(set().union(*REGIONS.values()))
    north_groups = {f"O{i + 1}_" for i in range(len(OAHU_WIDTHS))} | {"K1_", "K2_", "KUR", "OAHU"}
    north = sorted(ids[x] for x in g.names if group_of[x][0] in north_groups)
    bearing = lambda p: {"FUNCTIONAL": [p, 1.0 - p], "NON_FUNCTIONAL": [0.5, 0.5]}
    doc = {
        "schema_version": "1.0",
        "metadata": {
            "name": "pearl-harbor-1941",
            "description": "IJN carrier strike force, 27 November to 7 December 1941",
            "period_hours": 12,
            "periods_per_day": 2,
            "start_label": "1941-11-27 AM",
            "curation": [
                "Raster ids 1..260 keep the published region membership: every id listed for a target region, the Mandates, China or the home waters sits in that region here.",
                "Adjacency is curated, not a generated lattice. Sasebo (191) reaches the Oahu set through eight widening corridor layers, so the minimum transit is exactly 9 hops.",
                "A short route leads from Sasebo to Luzon (2 hops). A large open-sea area east of Luzon is equidistant from the target and slows part of the traffic bound for Manila Bay.",
                "Rasters 85 and 86 (Thailand) are land-blocked; 87 is the only approach to the Thailand set.",
                "Centroids are display positions only.",
                "Regenerate with scenarios/generate_pearl_harbor.py.",
            ],
            "crisis_network_note": "Demonstrative conditional tables fitted so the target posterior reproduces the canonical vector; they are a reconstruction, not the original assessments.",
        },
        "graph": {
            "nodes": nodes,
            "edges": [list(e) for e in edges],
            "blocked": BLOCKED,
        },
        "trapping_sets": [
            {"target": "OAHU", "rasters": region_ids["OAHU"]},
            {"target": "KURILES", "rasters": region_ids["KURILES"]},
            {"target": "MANILA_BAY", "rasters": region_ids["PHILIPPINES"]},
            {"target": "THAILAND", "rasters": region_ids["THAILAND"]},
            {"target": "SINGAPORE_KRA", "rasters": region_ids["KRA"]},
            {"target": "BORNEO", "rasters": region_ids["BORNEO"]},
        ],
        "immediacy": [
            {"label": "IMMEDIATE", "holding": 0.05},
            {"label": "DELAYED", "holding": 0.4},
        ],
        "canonical_prior": {t: table6[t] / total for t in TARGETS},
        "crisis_network": crisis_network(),
        "sources": [
            {"id": "COM14", "outcomes": ["FUNCTIONAL", "NON_FUNCTIONAL"], "prior": [0.7, 0.3]},
            {"id": "COM16", "outcomes": ["FUNCTIONAL", "NON_FUNCTIONAL"], "prior": [0.9, 0.1]},
        ],
        "signals": [
            {
                "id": "RADIO",
                "values": ["SILENCE", "INTERCEPT"],
                "sources": ["COM14", "COM16"],
                "classes": {
                    "HOME_WATERS": HOME,
                    "PARTIAL": partial,
                    "INCONSISTENT": sorted(MANDATES + CHINA),
                },
                "default_class": "ELSEWHERE",
                "likelihood": {
                    "HOME_WATERS": silence(0.8),
                    "ELSEWHERE": silence(0.8),
                    "PARTIAL": silence(0.5),
                    "INCONSISTENT": silence(0.2),
                },
            },
            {
                "id": "DF_BEARING",
                "values": ["NORTH_PACIFIC", "SOUTH_PACIFIC"],
                "sources": ["COM16"],
                "classes": {"NORTH_PACIFIC": north},
                "default_class": "SOUTH_PACIFIC",
                "likelihood": {
                    "NORTH_PACIFIC": bearing(0.9),
                    "SOUTH_PACIFIC": bearing(0.1),
                },
            },
        ],
        "p0": {"191": 1.0},
        "cost_model": {
            "alert_types": [
                {"id": "OAHU", "cost": 1e-5, "lead_times": {"OAHU": 4}},
                {"id": "KURILES", "cost": 1e-7, "lead_times": {"KURILES": 1}},
                {"id": "MANILA_BAY", "cost": 1e-5, "lead_times": {"MANILA_BAY": 4}},
                {"id": "THAILAND", "cost": 1e-7, "lead_times": {"THAILAND": 1}},
                {"id": "SINGAPORE_KRA", "cost": 1e-6, "lead_times": {"SINGAPORE_KRA": 14}},
                {"id": "BORNEO", "cost": 1e-6, "lead_times": {"BORNEO": 14}},
            ],
            "failure_costs": {"OAHU": 1.0, "KURILES": 0.001, "MANILA_BAY": 0.1,
                              "THAILAND": 0.0001, "SINGAPORE_KRA": 0.01, "BORNEO": 0.01},
            "daily_discount_rate": 0.015,
            "periods_per_day": 2,
            "disutility": {"kind": "LINEAR"},
            "horizon": 40,
            "failure_window": "CUMULATIVE",
        },
        "script": [
            {"period": t, "signal": "RADIO", "value": "SILENCE", "sources": ["COM14", "COM16"]}
            for t in range(1, 21)
        ],
        "report": {"projection_days": [2, 4, 7], "first_passage_horizon": 60},
    }
    print(json.dumps(doc, indent=1))


if __name__ == "__main__":
    main()
