"""Attribute schema: the 24-attribute visual taxonomy shared by every module.

Values are canonical strings; matching is case-sensitive after a single
normalization pass (trim + collapse internal whitespace). Every attribute
carries "Uncertain" as a legal value. Multi-select attributes hold a set of
values, represented as a sorted tuple and rendered canonically as a
comma-joined string.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

CATEGORIES = ("Head", "Upper", "Lower", "FeetHands", "SoftBio")

UNCERTAIN = "Uncertain"

COLORS = (
    "Black", "White", "Grey", "Red", "Blue", "Green", "Yellow",
    "Orange", "Purple", "Pink", "Brown", "Neon", "Other",
)

_WS = re.compile(r"\s+")


def normalize_value(s: str) -> str:
    """Trim and collapse internal whitespace; case is preserved."""
    return _WS.sub(" ", s.strip())


@dataclass(frozen=True)
class AttributeDef:
    name: str
    category: str
    values: tuple[str, ...]  # canonical values, always including "Uncertain"
    multi_select: bool = False
    ig_excluded: bool = False
    clue_excluded: bool = False


@dataclass(frozen=True)
class AttributeSchema:
    attributes: tuple[AttributeDef, ...]
    _by_name: dict[str, AttributeDef] = field(
        default=None, repr=False, compare=False, init=False
    )

    def __post_init__(self):
        object.__setattr__(
            self, "_by_name", {a.name: a for a in self.attributes}
        )

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def get(self, name: str) -> AttributeDef:
        return self._by_name[name]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def ig_attributes(self) -> tuple[str, ...]:
        """Attributes eligible for information-gain questioning (21 of 24)."""
        return tuple(a.name for a in self.attributes if not a.ig_excluded)

    def clue_attributes(self) -> tuple[str, ...]:
        """Attributes eligible as an initial clue."""
        return tuple(a.name for a in self.attributes if not a.clue_excluded)


def _attr(name, category, values, multi=False, ig_ex=False, clue_ex=False):
    vals = tuple(values) + (UNCERTAIN,)
    return AttributeDef(
        name=name,
        category=category,
        values=vals,
        multi_select=multi,
        ig_excluded=ig_ex,
        clue_excluded=clue_ex,
    )


# The default clue exclusion list has 10 entries: shoe_color and
# visual_age_style plus eight low-utility attributes (sparse, imbalanced, or
# multi-valued ones that make poor opening statements). Override via a custom
# schema if needed.
def default_schema() -> AttributeSchema:
    return AttributeSchema(attributes=(
        # Head: hair
        _attr("hair_visibility", "Head",
              ("Visible", "Covered by Hat", "Bald/Shaved"),
              ig_ex=True, clue_ex=True),
        _attr("hair_style", "Head",
              ("Short (Ear-length)", "Medium (Neck-length)", "Long (Shoulder+)",
               "Ponytail/Bun", "Afro/Textured", "Bald", "Other")),
        _attr("hair_color", "Head",
              ("Black", "Brown", "Blonde", "Gray/White", "Dyed/Unnatural",
               "Other")),
        # Head: accessories
        _attr("headwear_type", "Head",
              ("None", "Cap", "Beanie", "Helmet", "Bucket Hat", "Other")),
        _attr("eyewear_type", "Head",
              ("None", "Glasses", "Sunglasses", "Other"), clue_ex=True),
        _attr("mask_state", "Head",
              ("Properly Worn", "Chin Mask", "No Mask", "Other"), clue_ex=True),
        _attr("facial_hair", "Head",
              ("None", "Mustache", "Beard", "Stubble", "Other"), clue_ex=True),
        # Upper body
        _attr("upper_garment_type", "Upper",
              ("T-shirt", "Shirt", "Hoodie", "Sweatshirt", "Jacket", "Vest",
               "Suit", "Puffer/Padding (Long/Short)", "Coat", "Dress",
               "Uniform/Gown", "Other")),
        _attr("upper_color_layout", "Upper",
              ("Solid", "Layered", "Patterned", "Colorblock", "Graphic/Logo",
               "Other"), clue_ex=True),
        _attr("upper_garment_color", "Upper", COLORS),
        _attr("upper_state", "Upper",
              ("Hooded", "Zipper Open/Closed", "Long/Short Sleeve",
               "Sleeveless", "Collared", "None"),
              multi=True, clue_ex=True),
        _attr("upper_fit_style", "Upper",
              ("Regular", "Loose/Oversized", "Tight/Fitted", "Bulky (Padding)")),
        _attr("torso_bag_type", "Upper",
              ("None", "Backpack", "Shoulder Bag", "Crossbody Bag",
               "Lanyard/ID", "Other")),
        # Lower body
        _attr("leg_visibility", "Lower",
              ("Fully Visible", "Partially Covered", "Hidden"),
              ig_ex=True, clue_ex=True),
        _attr("lower_garment_type", "Lower",
              ("Trousers", "Jeans", "Sweatpants", "Shorts", "Skirt",
               "Leggings", "Work/Cargo Pants", "Other")),
        _attr("lower_garment_color", "Lower", COLORS),
        _attr("lower_fit_style", "Lower",
              ("Regular", "Baggy/Loose", "Skinny/Tight", "Short")),
        # Feet and hands
        _attr("shoe_type", "FeetHands",
              ("Sneakers", "Boots/Walker", "Dress Shoes", "Sandal/Slipper",
               "Other")),
        _attr("shoe_color", "FeetHands", COLORS, clue_ex=True),
        _attr("items_held", "FeetHands",
              ("None", "Phone", "Bag/Carrier", "Box", "Notebook", "Umbrella",
               "Drink", "Tool", "Paper", "Other")),
        # Soft biometrics
        _attr("visual_age_style", "SoftBio",
              ("Child/Teen", "Young Adult", "Mature", "Elderly", "Uniformed"),
              clue_ex=True),
        _attr("body_shape", "SoftBio", ("Slender", "Normal", "Heavy")),
        _attr("body_features", "SoftBio",
              ("Potbelly", "Stocky", "Muscular", "Thick Thighs", "Obese",
               "Stick-like Limbs", "Lanky", "Petite", "Thin Wrists", "Frail",
               "Tall", "Short", "Other", "None"),
              multi=True, ig_ex=True, clue_ex=True),
        _attr("visual_gender", "SoftBio", ("Male", "Female")),
    ))


# The three attributes a witness can always answer.
K3 = ("visual_gender", "upper_garment_color", "lower_garment_color")

_MANDATORY_IG_EXCLUDED = frozenset(
    {"hair_visibility", "leg_visibility", "body_features"}
)
_MANDATORY_CLUE_EXCLUDED = frozenset({"shoe_color", "visual_age_style"})


def validate_schema(schema: AttributeSchema) -> list[str]:
    """Return a list of invariant violations; empty means the schema is valid."""
    problems: list[str] = []
    if len(schema.attributes) != 24:
        problems.append(
            f"attribute count != 24 (got {len(schema.attributes)})"
        )
    seen = set()
    for a in schema.attributes:
        if a.name in seen:
            problems.append(f"duplicate attribute name: {a.name}")
        seen.add(a.name)
        if a.category not in CATEGORIES:
            problems.append(f"{a.name}: unknown category {a.category!r}")
        if UNCERTAIN not in a.values:
            problems.append(f"{a.name}: missing {UNCERTAIN!r} value")
        if len(set(a.values)) != len(a.values):
            problems.append(f"{a.name}: duplicate canonical values")
        for v in a.values:
            if normalize_value(v) != v:
                problems.append(f"{a.name}: value {v!r} not normalized")
    ig_excluded = {a.name for a in schema.attributes if a.ig_excluded}
    if ig_excluded != _MANDATORY_IG_EXCLUDED:
        problems.append(
            "ig_excluded set must be exactly "
            f"{sorted(_MANDATORY_IG_EXCLUDED)} (got {sorted(ig_excluded)})"
        )
    clue_excluded = {a.name for a in schema.attributes if a.clue_excluded}
    missing = _MANDATORY_CLUE_EXCLUDED - clue_excluded
    if missing:
        problems.append(f"clue_excluded must contain {sorted(missing)}")
    return problems


AttrValue = str | tuple[str, ...]


def value_key(value: AttrValue) -> str:
    """Canonical string form of a stored value (multi-select joins the set)."""
    if isinstance(value, tuple):
        return ", ".join(sorted(value))
    return value


def is_uncertain(value: AttrValue) -> bool:
    if isinstance(value, tuple):
        return set(value) == {UNCERTAIN}
    return value == UNCERTAIN
