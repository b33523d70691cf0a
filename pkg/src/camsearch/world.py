"""World model: persons, trajectories, and the container tying them together.

The on-disk format is a single JSON object with sorted keys (canonical bytes),
so save(load(w)) round-trips byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .schema import (
    AttributeSchema,
    AttributeDef,
    AttrValue,
    default_schema,
    is_uncertain,
    normalize_value,
    validate_schema,
)

SHIPPED_TOPOLOGIES = ("factory", "university")


class ParseError(Exception):
    """The file is not a well-formed world document."""


class SchemaViolation(Exception):
    """A record violates a schema invariant; names the record and attribute."""

    def __init__(self, message: str, person: int | None = None,
                 attribute: str | None = None):
        super().__init__(message)
        self.person = person
        self.attribute = attribute


@dataclass(frozen=True)
class Visit:
    camera: str
    enter: float
    exit: float


@dataclass(frozen=True)
class Trajectory:
    person: int
    visits: tuple[Visit, ...]


@dataclass(frozen=True)
class PersonRecord:
    id: int
    attrs: dict[str, AttrValue]

    def value(self, attribute: str) -> AttrValue:
        return self.attrs[attribute]


@dataclass(frozen=True)
class World:
    schema: AttributeSchema
    gallery: tuple[PersonRecord, ...]
    trajectories: tuple[Trajectory, ...]
    cameras: tuple[str, ...]
    topology_name: str
    _gallery_by_id: dict[int, PersonRecord] = field(
        default=None, repr=False, compare=False, init=False
    )
    _traj_by_id: dict[int, Trajectory] = field(
        default=None, repr=False, compare=False, init=False
    )

    def __post_init__(self):
        object.__setattr__(
            self, "_gallery_by_id", {p.id: p for p in self.gallery}
        )
        object.__setattr__(
            self, "_traj_by_id", {t.person: t for t in self.trajectories}
        )

    def person(self, pid: int) -> PersonRecord:
        return self._gallery_by_id[pid]

    def trajectory(self, pid: int) -> Trajectory | None:
        return self._traj_by_id.get(pid)


def validate_world(world: World) -> None:
    """Raise SchemaViolation on the first invariant breach."""
    problems = validate_schema(world.schema)
    if problems:
        raise SchemaViolation("schema invalid: " + "; ".join(problems))
    cameras = set(world.cameras)
    if world.topology_name in SHIPPED_TOPOLOGIES and len(world.cameras) != 16:
        raise SchemaViolation(
            f"topology {world.topology_name!r} requires 16 cameras, "
            f"got {len(world.cameras)}"
        )
    seen_ids = set()
    for rec in world.gallery:
        if rec.id < 0:
            raise SchemaViolation(f"person id {rec.id} is negative",
                                  person=rec.id)
        if rec.id in seen_ids:
            raise SchemaViolation(f"duplicate person id {rec.id}",
                                  person=rec.id)
        seen_ids.add(rec.id)
        for adef in world.schema.attributes:
            if adef.name not in rec.attrs:
                raise SchemaViolation(
                    f"person {rec.id} missing attribute {adef.name!r}",
                    person=rec.id, attribute=adef.name,
                )
            _check_value(rec.id, adef, rec.attrs[adef.name])
        extra = set(rec.attrs) - set(world.schema.names)
        if extra:
            raise SchemaViolation(
                f"person {rec.id} has unknown attributes {sorted(extra)}",
                person=rec.id,
            )
    for traj in world.trajectories:
        if traj.person not in seen_ids:
            raise SchemaViolation(
                f"trajectory person {traj.person} not in gallery",
                person=traj.person,
            )
        last_enter = float("-inf")
        for v in traj.visits:
            if v.camera not in cameras:
                raise SchemaViolation(
                    f"person {traj.person}: visit camera {v.camera!r} "
                    "not in world cameras",
                    person=traj.person,
                )
            if v.exit < v.enter:
                raise SchemaViolation(
                    f"person {traj.person}: visit at {v.camera} has "
                    f"exit {v.exit} < enter {v.enter}",
                    person=traj.person,
                )
            if v.enter < last_enter:
                raise SchemaViolation(
                    f"person {traj.person}: visits not sorted by enter time",
                    person=traj.person,
                )
            last_enter = v.enter


def _check_value(pid: int, adef: AttributeDef, value: AttrValue) -> None:
    legal = set(adef.values)
    if adef.multi_select:
        if not isinstance(value, tuple) or not value:
            raise SchemaViolation(
                f"person {pid}: {adef.name} must be a non-empty value set",
                person=pid, attribute=adef.name,
            )
        if tuple(sorted(value)) != value:
            raise SchemaViolation(
                f"person {pid}: {adef.name} value set not sorted",
                person=pid, attribute=adef.name,
            )
        bad = [v for v in value if v not in legal]
    else:
        if not isinstance(value, str):
            raise SchemaViolation(
                f"person {pid}: {adef.name} must be a single value",
                person=pid, attribute=adef.name,
            )
        bad = [] if value in legal else [value]
    if bad:
        raise SchemaViolation(
            f"person {pid}: illegal value {bad[0]!r} for {adef.name}",
            person=pid, attribute=adef.name,
        )


# --- JSON serialization ---------------------------------------------------

def _schema_to_json(schema: AttributeSchema) -> dict:
    return {
        "attributes": [
            {
                "name": a.name,
                "category": a.category,
                "values": list(a.values),
                "multi_select": a.multi_select,
                "ig_excluded": a.ig_excluded,
                "clue_excluded": a.clue_excluded,
            }
            for a in schema.attributes
        ]
    }


def _schema_from_json(obj: dict) -> AttributeSchema:
    try:
        attrs = tuple(
            AttributeDef(
                name=a["name"],
                category=a["category"],
                values=tuple(a["values"]),
                multi_select=bool(a.get("multi_select", False)),
                ig_excluded=bool(a.get("ig_excluded", False)),
                clue_excluded=bool(a.get("clue_excluded", False)),
            )
            for a in obj["attributes"]
        )
    except (KeyError, TypeError) as e:
        raise ParseError(f"bad schema section: {e}") from e
    return AttributeSchema(attributes=attrs)


def _attrs_from_json(schema: AttributeSchema, pid, raw: dict) -> dict:
    attrs: dict[str, AttrValue] = {}
    for name, value in raw.items():
        if isinstance(value, list):
            attrs[name] = tuple(sorted(normalize_value(v) for v in value))
        else:
            attrs[name] = normalize_value(value)
    return attrs


def world_to_json(world: World) -> dict:
    return {
        "schema": _schema_to_json(world.schema),
        "gallery": [
            {
                "id": p.id,
                "attrs": {
                    k: (list(v) if isinstance(v, tuple) else v)
                    for k, v in sorted(p.attrs.items())
                },
            }
            for p in world.gallery
        ],
        "trajectories": [
            {
                "person": t.person,
                "visits": [
                    {"camera": v.camera, "enter": v.enter, "exit": v.exit}
                    for v in t.visits
                ],
            }
            for t in world.trajectories
        ],
        "cameras": list(world.cameras),
        "topology_name": world.topology_name,
    }


def world_from_json(obj: dict) -> World:
    try:
        schema = _schema_from_json(obj["schema"])
        gallery = tuple(
            PersonRecord(id=int(g["id"]),
                         attrs=_attrs_from_json(schema, g["id"], g["attrs"]))
            for g in obj["gallery"]
        )
        trajectories = tuple(
            Trajectory(
                person=int(t["person"]),
                visits=tuple(
                    Visit(camera=v["camera"], enter=float(v["enter"]),
                          exit=float(v["exit"]))
                    for v in t["visits"]
                ),
            )
            for t in obj["trajectories"]
        )
        cameras = tuple(obj["cameras"])
        topology_name = obj["topology_name"]
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed world document: {e}") from e
    world = World(schema=schema, gallery=gallery, trajectories=trajectories,
                  cameras=cameras, topology_name=topology_name)
    validate_world(world)
    return world


def canonical_json_bytes(obj) -> bytes:
    return json.dumps(
        obj, sort_keys=True, ensure_ascii=True, separators=(",", ":")
    ).encode("utf-8")


def load_world(path) -> World:
    try:
        with open(path, "rb") as f:
            obj = json.load(f)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be an object")
    return world_from_json(obj)


def save_world(world: World, path) -> None:
    with open(path, "wb") as f:
        f.write(canonical_json_bytes(world_to_json(world)))
        f.write(b"\n")


def empty_world(topology_name: str = "custom",
                cameras: tuple[str, ...] = ()) -> World:
    return World(schema=default_schema(), gallery=(), trajectories=(),
                 cameras=cameras, topology_name=topology_name)
