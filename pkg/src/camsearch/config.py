"""Single-file run configuration.

A JSON object overriding pipeline tunables; every key is optional:

    {
      "frame_gap_s": 4.3,            // intra-camera split threshold
      "include_warn": false,         // feed WARN transitions into stats
      "vague_buckets": [             // gap phrasing table, closed-open
        [0, 30, "almost at the same time"],
        [30, 120, "a moment later"],
        [120, 300, "a few minutes later"],
        [300, 900, "a while later"],
        [900, null, "much later"]
      ],
      "topology_file": "path/to/topology.json"
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .sttg import FRAME_GAP_S
from .tasks import VAGUE_BUCKETS


@dataclass(frozen=True)
class RunConfig:
    frame_gap_s: float = FRAME_GAP_S
    include_warn: bool = False
    vague_buckets: tuple = VAGUE_BUCKETS
    topology_file: str | None = None


def load_run_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as f:
        obj = json.load(f)
    buckets = VAGUE_BUCKETS
    if "vague_buckets" in obj:
        buckets = tuple(
            (float(lo), math.inf if hi is None else float(hi), str(phrase))
            for lo, hi, phrase in obj["vague_buckets"]
        )
    return RunConfig(
        frame_gap_s=float(obj.get("frame_gap_s", FRAME_GAP_S)),
        include_warn=bool(obj.get("include_warn", False)),
        vague_buckets=buckets,
        topology_file=obj.get("topology_file"),
    )
