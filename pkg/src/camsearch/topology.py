"""Shipped camera-network topologies.

A topology declares which camera pairs share a field of view (OVERLAP),
which are physically adjacent without visual overlap (SOFT_ADJ), and which
corridors people actually walk (TRAVEL, used by the world generator and the
shipped fixture). It also carries human-readable zone names, per-camera
sub-area phrases, and the per-zone spatial disambiguation trees used for
location questions. Zone/camera identifiers never appear in rendered
dialogue; only the phrases do.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources


class ConfigError(Exception):
    pass


Pair = frozenset


@dataclass(frozen=True)
class SpatialOption:
    cameras: tuple[str, ...]
    phrase: str


@dataclass(frozen=True)
class ZoneTree:
    question: str
    options: tuple[SpatialOption, ...]

    def option_for(self, camera: str) -> SpatialOption | None:
        for opt in self.options:
            if camera in opt.cameras:
                return opt
        return None


@dataclass(frozen=True)
class TopologyConfig:
    name: str
    cameras: tuple[str, ...]
    overlap_pairs: frozenset[Pair]
    soft_pairs: frozenset[Pair]
    travel_pairs: frozenset[Pair]
    zone_names: dict[frozenset, tuple[str, str]]       # cameras -> (id, name)
    composite_names: dict[frozenset, tuple[str, str]]
    sub_areas: dict[str, str]                          # camera -> phrase
    zone_trees: dict[str, ZoneTree]                    # zone id -> tree
    travel_medians: dict[tuple[str, str], float] = field(default_factory=dict)

    def walk_neighbors(self, camera: str) -> tuple[str, ...]:
        """Cameras reachable in one move (overlap, soft, or travel pair)."""
        out = set()
        for pair in self.overlap_pairs | self.soft_pairs | self.travel_pairs:
            if camera in pair:
                out.update(pair - {camera})
        return tuple(sorted(out))


def _pairs(items) -> frozenset[Pair]:
    return frozenset(frozenset(p) for p in items)


def _load_data(name: str) -> dict:
    with resources.files("camsearch.data").joinpath(name).open("rb") as f:
        return json.load(f)


def _config_from_json(obj: dict) -> TopologyConfig:
    zone_names = {
        frozenset(z["cameras"]): (z["id"], z["name"]) for z in obj["zones"]
    }
    composite_names = {
        frozenset(z["cameras"]): (z["id"], z["name"])
        for z in obj["composite_zones"]
    }
    trees = {
        zid: ZoneTree(
            question=t["question"],
            options=tuple(
                SpatialOption(cameras=tuple(o["cameras"]), phrase=o["phrase"])
                for o in t["options"]
            ),
        )
        for zid, t in obj["zone_trees"].items()
    }
    medians = {
        (e["from"], e["to"]): float(e["median"])
        for e in obj.get("travel_medians", [])
    }
    return TopologyConfig(
        name=obj["name"],
        cameras=tuple(obj["cameras"]),
        overlap_pairs=_pairs(obj["overlap_pairs"]),
        soft_pairs=_pairs(obj["soft_pairs"]),
        travel_pairs=_pairs(obj["travel_pairs"]),
        zone_names=zone_names,
        composite_names=composite_names,
        sub_areas=dict(obj["sub_areas"]),
        zone_trees=trees,
        travel_medians=medians,
    )


_CACHE: dict[str, TopologyConfig] = {}


def load_topology(name: str) -> TopologyConfig:
    """Load a shipped topology ("factory" or "university") by name."""
    if name not in _CACHE:
        try:
            obj = _load_data(f"topology_{name}.json")
        except FileNotFoundError:
            raise ConfigError(f"unknown topology {name!r}") from None
        _CACHE[name] = _config_from_json(obj)
    return _CACHE[name]


def load_topology_file(path) -> TopologyConfig:
    with open(path, "rb") as f:
        return _config_from_json(json.load(f))
