"""Regenerate every shipped data file: topologies, witness templates, and
the regression fixture world (run from the repo root)."""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "camsearch" / "data"

CAMS = [f"c{i:02d}" for i in range(1, 17)]


def pairs(*items):
    return [sorted(p) for p in items]


factory = {
    "name": "factory",
    "cameras": CAMS,
    "overlap_pairs": pairs(
        ("c01", "c02"), ("c01", "c04"), ("c02", "c05"), ("c04", "c05"),
        ("c07", "c08"),
        ("c09", "c14"), ("c14", "c16"),
        ("c12", "c13"),
    ),
    "soft_pairs": pairs(("c05", "c07"), ("c09", "c12")),
    "travel_pairs": pairs(
        # warehouse <-> lobby
        ("c01", "c07"), ("c01", "c08"), ("c02", "c07"), ("c02", "c08"),
        ("c04", "c07"), ("c04", "c08"), ("c05", "c08"),
        # warehouse <-> main stairwell
        ("c01", "c03"), ("c02", "c03"), ("c03", "c04"), ("c03", "c05"),
        # lobby <-> outside passage
        ("c06", "c07"), ("c06", "c08"),
        # lobby <-> main stairwell
        ("c03", "c07"), ("c03", "c08"),
        # stairwells and second floor
        ("c03", "c10"),
        ("c09", "c10"), ("c10", "c14"), ("c10", "c16"),
        ("c11", "c12"), ("c11", "c13"),
        ("c04", "c11"),
        ("c10", "c11"), ("c10", "c12"), ("c10", "c13"),
        # parts storage
        ("c09", "c15"), ("c12", "c15"), ("c13", "c15"), ("c14", "c15"),
        ("c15", "c16"),
        # outside passage <-> warehouse / stairwell
        ("c01", "c06"), ("c02", "c06"), ("c05", "c06"), ("c03", "c06"),
        # long diagonals within zones
        ("c01", "c05"), ("c02", "c04"),
        ("c09", "c16"),
    ),
    "zones": [
        {"id": "F_WAREHOUSE", "cameras": ["c01", "c02", "c04", "c05"],
         "name": "Warehouse area"},
        {"id": "F_LOBBY", "cameras": ["c07", "c08"],
         "name": "Lobby and entrance area"},
        {"id": "F_WORKSPACE", "cameras": ["c09", "c14", "c16"],
         "name": "2F work floor"},
        {"id": "F_CORRIDOR_2F", "cameras": ["c12", "c13"],
         "name": "2F corridor and office"},
        {"id": "F_STAIRS_MAIN", "cameras": ["c03"], "name": "Main stairwell"},
        {"id": "F_PASSAGE", "cameras": ["c06"],
         "name": "Outside the entrance"},
        {"id": "F_STAIRS_SEC", "cameras": ["c11"],
         "name": "Secondary stairwell"},
        {"id": "F_STAIRS_UPPER", "cameras": ["c10"],
         "name": "Upper stairwell"},
        {"id": "F_PARTS_STORAGE", "cameras": ["c15"],
         "name": "Parts storage room"},
    ],
    "composite_zones": [
        {"id": "FC_1F_INDOOR",
         "cameras": ["c01", "c02", "c04", "c05", "c07", "c08"],
         "name": "1F warehouse and lobby"},
        {"id": "FC_2F", "cameras": ["c09", "c12", "c13", "c14", "c16"],
         "name": "2F workspace and corridor"},
    ],
    "sub_areas": {
        "c01": "the tall shelves deep inside the warehouse",
        "c02": "the warehouse parking side",
        "c03": "the main stairwell",
        "c04": "the loading dock",
        "c05": "the middle aisle of the warehouse",
        "c06": "the outside passage by the entrance",
        "c07": "the inner lobby",
        "c08": "the lobby entrance",
        "c09": "the assembly benches",
        "c10": "the upper stairwell",
        "c11": "the secondary stairwell",
        "c12": "the second-floor corridor",
        "c13": "the office doorway",
        "c14": "the middle of the work floor",
        "c15": "the parts storage room",
        "c16": "the machine row at the far end",
    },
    "zone_trees": {
        "F_WAREHOUSE": {
            "question": "Was it deep inside the warehouse, or near the entrance?",
            "options": [
                {"cameras": ["c01"],
                 "phrase": "Deep inside, near those tall shelves in back."},
                {"cameras": ["c02"], "phrase": "Over on the parking side."},
                {"cameras": ["c04"], "phrase": "By the loading dock."},
                {"cameras": ["c05"], "phrase": "Along the middle aisle."},
            ],
        },
        "F_LOBBY": {
            "question": "Were they right by the front doors, or further inside the lobby?",
            "options": [
                {"cameras": ["c07"],
                 "phrase": "Further inside, past the reception desk."},
                {"cameras": ["c08"], "phrase": "Right by the front doors."},
            ],
        },
        "F_WORKSPACE": {
            "question": "Where on the work floor did you see them?",
            "options": [
                {"cameras": ["c09"], "phrase": "Over by the assembly benches."},
                {"cameras": ["c14"], "phrase": "Around the middle of the floor."},
                {"cameras": ["c16"],
                 "phrase": "Down by the machine row at the far end."},
            ],
        },
        "F_CORRIDOR_2F": {
            "question": "Were they out in the corridor, or near the office?",
            "options": [
                {"cameras": ["c12"], "phrase": "Out in the corridor."},
                {"cameras": ["c13"], "phrase": "Right by the office door."},
            ],
        },
    },
    "travel_medians": [
        {"from": "c05", "to": "c08", "median": 11.0},
        {"from": "c08", "to": "c05", "median": 12.0},
    ],
}

university = {
    "name": "university",
    "cameras": CAMS,
    "overlap_pairs": pairs(
        ("c01", "c02"), ("c01", "c03"), ("c02", "c05"), ("c03", "c05"),
        ("c04", "c07"), ("c07", "c11"), ("c11", "c12"), ("c12", "c13"),
        ("c13", "c14"),
        ("c06", "c15"),
        ("c09", "c10"),
    ),
    "soft_pairs": pairs(("c07", "c08"), ("c05", "c06")),
    "travel_pairs": pairs(
        # plaza <-> paths / back
        ("c01", "c06"), ("c02", "c06"), ("c05", "c15"), ("c03", "c15"),
        ("c01", "c16"), ("c05", "c16"),
        # plaza <-> building
        ("c01", "c04"), ("c02", "c04"), ("c05", "c07"), ("c03", "c04"),
        ("c02", "c07"),
        # plaza <-> side corridor
        ("c01", "c08"), ("c02", "c08"), ("c05", "c08"),
        # side corridor <-> building / annex
        ("c04", "c08"), ("c08", "c11"), ("c08", "c09"), ("c08", "c10"),
        # building <-> annex
        ("c09", "c11"), ("c09", "c12"), ("c10", "c13"), ("c09", "c14"),
        ("c04", "c09"),
        # paths <-> back / building / annex
        ("c06", "c16"), ("c15", "c16"), ("c04", "c06"), ("c14", "c15"),
        ("c06", "c07"), ("c10", "c15"),
        # back <-> building
        ("c14", "c16"), ("c13", "c16"),
        # annex <-> plaza
        ("c02", "c09"),
        # within-zone diagonals
        ("c01", "c05"), ("c02", "c03"),
        ("c04", "c11"), ("c04", "c12"), ("c04", "c13"), ("c04", "c14"),
        ("c07", "c12"), ("c07", "c13"), ("c07", "c14"),
        ("c11", "c13"), ("c11", "c14"), ("c12", "c14"),
    ),
    "zones": [
        {"id": "S_PLAZA", "cameras": ["c01", "c02", "c03", "c05"],
         "name": "Outdoor plaza"},
        {"id": "S_BUILDING_CORE",
         "cameras": ["c04", "c07", "c11", "c12", "c13", "c14"],
         "name": "Inside the building"},
        {"id": "S_OUTDOOR_PATH", "cameras": ["c06", "c15"],
         "name": "Outdoor path area"},
        {"id": "S_ANNEX", "cameras": ["c09", "c10"], "name": "2F main lobby"},
        {"id": "S_CORRIDOR_1F_B", "cameras": ["c08"],
         "name": "Corridor near entrance"},
        {"id": "S_BACK_AREA", "cameras": ["c16"],
         "name": "Outdoor area at back"},
    ],
    "composite_zones": [
        {"id": "SC_INDOOR",
         "cameras": ["c04", "c07", "c08", "c11", "c12", "c13", "c14"],
         "name": "Building and entrance corridor"},
        {"id": "SC_OUTDOOR",
         "cameras": ["c01", "c02", "c03", "c05", "c06", "c15"],
         "name": "Plaza and outdoor paths"},
    ],
    "sub_areas": {
        "c01": "the middle of the plaza",
        "c02": "the plaza fountain side",
        "c03": "the plaza steps",
        "c04": "the main entrance hall",
        "c05": "the plaza edge by the lawn",
        "c06": "the tree-lined path",
        "c07": "the ground-floor hallway",
        "c08": "the corridor by the side entrance",
        "c09": "the upper lobby balcony",
        "c10": "the upper lobby seating area",
        "c11": "the stairwell inside the building",
        "c12": "the study corner",
        "c13": "the notice boards",
        "c14": "the elevator bank",
        "c15": "the outdoor path by the bike racks",
        "c16": "the back field",
    },
    "zone_trees": {
        "S_PLAZA": {
            "question": "Whereabouts on the plaza were they?",
            "options": [
                {"cameras": ["c01"], "phrase": "Right in the middle of the plaza."},
                {"cameras": ["c02"], "phrase": "Over by the fountain."},
                {"cameras": ["c03"], "phrase": "On the steps."},
                {"cameras": ["c05"], "phrase": "At the edge, near the lawn."},
            ],
        },
        "S_BUILDING_CORE": {
            "question": "Where inside the building did you see them?",
            "options": [
                {"cameras": ["c04"], "phrase": "In the entrance hall."},
                {"cameras": ["c07"], "phrase": "Along the ground-floor hallway."},
                {"cameras": ["c11"], "phrase": "By the stairwell."},
                {"cameras": ["c12"], "phrase": "In the study corner."},
                {"cameras": ["c13"], "phrase": "Near the notice boards."},
                {"cameras": ["c14"], "phrase": "By the elevators."},
            ],
        },
        "S_OUTDOOR_PATH": {
            "question": "Was it along the path, or by the bike racks?",
            "options": [
                {"cameras": ["c06"], "phrase": "Along the tree-lined path."},
                {"cameras": ["c15"], "phrase": "By the bike racks."},
            ],
        },
        "S_ANNEX": {
            "question": "Were they by the balcony, or in the seating area?",
            "options": [
                {"cameras": ["c09"], "phrase": "By the balcony railing."},
                {"cameras": ["c10"], "phrase": "In the seating area."},
            ],
        },
    },
    "travel_medians": [],
}


WITNESS_TEMPLATES = [
    "I think it was {value}.",
    "Pretty sure it was {value}.",
    "I'd say {value}.",
    "I noticed {value}.",
    "They had {value}.",
    "It looked like {value}.",
    "I believe it was {value}.",
    "From what I saw, {value}.",
    "Hmm, {value} maybe?",
    "Something like {value}, I think.",
    "Not totally sure, but {value}-ish.",
    "They definitely had some kind of {value} going on.",
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for cfg in (factory, university):
        # sanity: every camera in a zone exactly once
        seen = {}
        for z in cfg["zones"]:
            for c in z["cameras"]:
                assert c not in seen, (cfg["name"], c)
                seen[c] = z["id"]
        assert set(seen) == set(cfg["cameras"]), cfg["name"]
        # pair lists are disjoint
        o = {frozenset(p) for p in cfg["overlap_pairs"]}
        s = {frozenset(p) for p in cfg["soft_pairs"]}
        t = {frozenset(p) for p in cfg["travel_pairs"]}
        assert not (o & s) and not (o & t) and not (s & t), cfg["name"]
        path = OUT / f"topology_{cfg['name']}.json"
        path.write_text(json.dumps(cfg, indent=1, sort_keys=True) + "\n")
        print("wrote", path, f"(overlap={len(o)}, soft={len(s)}, travel={len(t)})")

    templates_path = OUT / "witness_templates.json"
    templates_path.write_text(json.dumps(WITNESS_TEMPLATES, indent=1) + "\n")
    print("wrote", templates_path, f"({len(WITNESS_TEMPLATES)} templates)")

    import sys
    sys.path.insert(0, str(OUT.parents[1]))
    from camsearch.fixtures import build_fixture_world
    from camsearch.world import save_world

    fixture_path = OUT / "factory_small.json"
    save_world(build_fixture_world(), fixture_path)
    print("wrote", fixture_path)


if __name__ == "__main__":
    main()
