"""Deterministic witness: answers attribute and location questions.

Priority: (i) attributes on the task's ground-truth path return the
pre-rendered answer; (ii) the three always-observable attributes return the
target's value in one of the twelve templates, drawn from a per-session
stream; (iii) everything else gets the fixed uncertain reply. The location
question is answered at most once per session.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import dialogue as dlg
from .schema import AttributeSchema, K3, is_uncertain
from .tasks import Task
from .world import PersonRecord

log = logging.getLogger(__name__)

SPATIAL_REFUSAL = "I already told you where I saw them."


class UnknownAttribute(Exception):
    pass


class WrongTrack(Exception):
    pass


@dataclass(frozen=True)
class WitnessConfig:
    observable_set: tuple[str, ...] = K3
    template_seed: int = 42
    uncertain_reply: str = dlg.UNCERTAIN_REPLY


@dataclass
class Witness:
    task: Task
    target: PersonRecord
    schema: AttributeSchema
    config: WitnessConfig = field(default_factory=WitnessConfig)

    def __post_init__(self):
        self._templates = dlg.load_templates()
        self._rng = dlg.dialogue_rng(self.config.template_seed, self.task.id)
        self._spatial_answered = False

    def respond_attribute(self, attribute: str) -> str:
        if attribute not in self.schema:
            raise UnknownAttribute(attribute)
        answer = self.task.path_answers.get(attribute)
        if answer is not None:
            return answer
        if attribute in self.config.observable_set:
            value = self.target.attrs[attribute]
            if is_uncertain(value):
                # Observable attribute but the record itself is uncertain.
                log.info("uncertain gallery value for observable %s on %s",
                         attribute, self.task.id)
                return self.config.uncertain_reply
            return dlg.render_answer(self._rng, self._templates, value)
        return self.config.uncertain_reply

    def respond_spatial(self) -> tuple[str, bool]:
        """Returns (text, was_informative). Only Track 2 sessions may ask;
        repeats consume the turn but only get a refusal."""
        if self.task.track != 2 or self.task.track2 is None:
            raise WrongTrack(f"track {self.task.track} has no location answer")
        if self._spatial_answered:
            return SPATIAL_REFUSAL, False
        self._spatial_answered = True
        return self.task.track2.answer, True
