"""Deterministic natural-language rendering of task ground truth.

Replaces free-form dialogue wrapping with seeded template realization:
a clue statement, one question/answer pair per disambiguation step, and the
twelve witness response templates shipped as a data file. Rendered text never
contains camera ids, zone ids, or raw attribute keys.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources

import numpy as np

from .schema import AttrValue, value_key

UNCERTAIN_REPLY = "I'm not sure about that, I didn't get a good look."

# Human noun phrase per attribute; used in agent questions and the clue
# statement, and reverse-mapped by rule-based dialogue parsing.
ATTRIBUTE_NOUNS = {
    "hair_visibility": "their hair visibility",
    "hair_style": "their hair style",
    "hair_color": "their hair color",
    "headwear_type": "their headwear",
    "eyewear_type": "their eyewear",
    "mask_state": "their mask",
    "facial_hair": "their facial hair",
    "upper_garment_type": "their top type",
    "upper_color_layout": "their top pattern",
    "upper_garment_color": "their top color",
    "upper_state": "their top style",
    "upper_fit_style": "their top fit",
    "torso_bag_type": "their bag",
    "leg_visibility": "their leg visibility",
    "lower_garment_type": "their bottoms type",
    "lower_garment_color": "their bottoms color",
    "lower_fit_style": "their bottoms fit",
    "shoe_type": "their shoe type",
    "shoe_color": "their shoe color",
    "items_held": "the item they held",
    "visual_age_style": "their apparent age",
    "body_shape": "their build",
    "body_features": "their body features",
    "visual_gender": "their gender",
}

NOUN_TO_ATTRIBUTE = {v: k for k, v in ATTRIBUTE_NOUNS.items()}


def load_templates() -> tuple[str, ...]:
    with resources.files("camsearch.data").joinpath(
        "witness_templates.json"
    ).open("rb") as f:
        return tuple(json.load(f))


def stable_seed(*parts) -> int:
    h = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(h[:8], "big")


def dialogue_rng(seed: int, task_id: str) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([seed, stable_seed(task_id)]))
    )


def clue_sentence(attribute: str, value: AttrValue) -> str:
    noun = ATTRIBUTE_NOUNS[attribute]
    return f"I remember {noun} was {value_key(value)}."


def question_for(attribute: str) -> str:
    return f"Can you tell me about {ATTRIBUTE_NOUNS[attribute]}?"


def attribute_from_question(text: str) -> str | None:
    for noun, attr in NOUN_TO_ATTRIBUTE.items():
        if noun in text:
            return attr
    return None


def render_answer(rng: np.random.Generator, templates, value: AttrValue) -> str:
    template = templates[int(rng.integers(0, len(templates)))]
    return template.format(value=value_key(value))
