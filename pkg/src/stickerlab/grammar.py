"""Caption grammar for the sprite domain.

A prompt is a structured ``PromptSpec`` (bucket, subject, optional emotion /
color / action / pair subject / scene) rendered to a caption string by a
fixed template:

    article [emotion] [color] subject [action phrase] [scene phrase]

The grammar is invertible: ``parse_caption(render_caption(spec)) == spec``
for every well-formed spec, which is what lets the alignment oracle recover
the intended content of a prompt without any trained component.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

SUBJECTS = ("circle", "square", "triangle", "star", "heart")

COLORS = ("red", "blue", "green", "yellow", "purple", "orange")

# Emotion tokens map onto four renderable glyph archetypes; near-synonyms
# share a glyph the way the paper's 36 emotions share a handful of faces.
EMOTION_CLASSES = {
    "happy": "happy", "joyful": "happy", "excited": "happy", "cheerful": "happy",
    "sad": "sad", "gloomy": "sad", "tearful": "sad", "weary": "sad",
    "angry": "angry", "furious": "angry", "grumpy": "angry", "annoyed": "angry",
    "surprised": "surprised", "shocked": "surprised", "amazed": "surprised", "startled": "surprised",
}
EMOTIONS = tuple(EMOTION_CLASSES)

SINGLE_ACTIONS = ("holding", "juggling", "waving")
PAIR_ACTIONS = ("next_to", "above")
ACTIONS = SINGLE_ACTIONS + PAIR_ACTIONS

SCENES = ("beach", "garden", "night", "party", "snow")

ACTION_PHRASES = {
    "holding": "holding a ball",
    "juggling": "juggling balls",
    "waving": "waving a flag",
    "next_to": "next to",   # followed by "a <pair_subject>"
    "above": "above",       # followed by "a <pair_subject>"
}

SCENE_PHRASES = {
    "beach": "at the beach",
    "garden": "in the garden",
    "night": "at night",
    "party": "at a party",
    "snow": "in the snow",
}

# Style keyword suffixes used for prompt-engineering the base model.
STYLE_SUFFIXES = {
    "FLAT": "flat sticker style",
    "VOLUME": "soft shaded style",
}


class Bucket(str, Enum):
    EMOTION = "EMOTION"
    COMPOSITION = "COMPOSITION"
    SCENE = "SCENE"


class GrammarError(ValueError):
    """Raised for captions or specs outside the grammar."""


@dataclass(frozen=True)
class PromptSpec:
    """One structured prompt; ``text`` is always the grammar rendering."""

    bucket: Bucket
    subject: str
    emotion: Optional[str] = None
    action: Optional[str] = None
    pair_subject: Optional[str] = None
    color: Optional[str] = None
    scene: Optional[str] = None
    text: str = field(default="", compare=False)

    @staticmethod
    def build(bucket, subject, emotion=None, action=None, pair_subject=None,
              color=None, scene=None) -> "PromptSpec":
        spec = PromptSpec(bucket=Bucket(bucket), subject=subject, emotion=emotion,
                          action=action, pair_subject=pair_subject, color=color,
                          scene=scene)
        _validate(spec)
        return replace(spec, text=render_caption(spec))

    @property
    def emotion_class(self) -> Optional[str]:
        return EMOTION_CLASSES[self.emotion] if self.emotion else None

    def to_dict(self) -> dict:
        return {
            "bucket": self.bucket.value, "subject": self.subject,
            "emotion": self.emotion, "action": self.action,
            "pair_subject": self.pair_subject, "color": self.color,
            "scene": self.scene, "text": self.text,
        }

    @staticmethod
    def from_dict(d: dict) -> "PromptSpec":
        return PromptSpec.build(
            d["bucket"], d["subject"], d.get("emotion"), d.get("action"),
            d.get("pair_subject"), d.get("color"), d.get("scene"))


def _validate(spec: PromptSpec) -> None:
    if spec.subject not in SUBJECTS:
        raise GrammarError(f"unknown subject {spec.subject!r}")
    if spec.emotion is not None and spec.emotion not in EMOTIONS:
        raise GrammarError(f"unknown emotion {spec.emotion!r}")
    if spec.color is not None and spec.color not in COLORS:
        raise GrammarError(f"unknown color {spec.color!r}")
    if spec.scene is not None and spec.scene not in SCENES:
        raise GrammarError(f"unknown scene {spec.scene!r}")
    if spec.action is not None:
        if spec.action not in ACTIONS:
            raise GrammarError(f"unknown action {spec.action!r}")
        if spec.action in PAIR_ACTIONS:
            if spec.pair_subject is None:
                raise GrammarError(f"pair action {spec.action!r} requires pair_subject")
            if spec.pair_subject not in SUBJECTS:
                raise GrammarError(f"unknown pair subject {spec.pair_subject!r}")
        elif spec.pair_subject is not None:
            raise GrammarError("pair_subject only valid with a pair action")
    elif spec.pair_subject is not None:
        raise GrammarError("pair_subject requires a pair action")


def _article(word: str) -> str:
    return "an" if word[0] in "aeiou" else "a"


def render_caption(spec: PromptSpec) -> str:
    """Deterministically render a spec to its caption string."""
    _validate(spec)
    head = " ".join(w for w in (spec.emotion, spec.color, spec.subject) if w)
    parts = [_article(head.split()[0]), head]
    if spec.action:
        parts.append(ACTION_PHRASES[spec.action])
        if spec.action in PAIR_ACTIONS:
            parts.append(f"{_article(spec.pair_subject)} {spec.pair_subject}")
    if spec.scene:
        parts.append(SCENE_PHRASES[spec.scene])
    return " ".join(parts)


def _infer_bucket(emotion, action, scene) -> Bucket:
    if action is not None:
        return Bucket.COMPOSITION
    if scene is not None:
        return Bucket.SCENE
    return Bucket.EMOTION


def parse_caption(text: str) -> PromptSpec:
    """Invert render_caption. Raises GrammarError on anything off-template.

    Known style suffixes ("flat sticker style", ...) are tolerated and
    stripped so prompt-engineered captions stay parseable.
    """
    toks = text.lower().split()
    for suffix in STYLE_SUFFIXES.values():
        s = suffix.split()
        if len(toks) > len(s) and toks[-len(s):] == s:
            toks = toks[:-len(s)]
            break
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    if peek() in ("a", "an"):
        pos += 1
    emotion = color = None
    if peek() in EMOTIONS:
        emotion = toks[pos]; pos += 1
    if peek() in COLORS:
        color = toks[pos]; pos += 1
    if peek() not in SUBJECTS:
        raise GrammarError(f"no subject found in {text!r}")
    subject = toks[pos]; pos += 1

    action = pair_subject = scene = None
    if peek() == "holding":
        if toks[pos:pos + 3] != ["holding", "a", "ball"]:
            raise GrammarError(f"bad action phrase in {text!r}")
        action = "holding"; pos += 3
    elif peek() == "juggling":
        if toks[pos:pos + 2] != ["juggling", "balls"]:
            raise GrammarError(f"bad action phrase in {text!r}")
        action = "juggling"; pos += 2
    elif peek() == "waving":
        if toks[pos:pos + 3] != ["waving", "a", "flag"]:
            raise GrammarError(f"bad action phrase in {text!r}")
        action = "waving"; pos += 3
    elif peek() == "next":
        if toks[pos:pos + 2] != ["next", "to"]:
            raise GrammarError(f"bad action phrase in {text!r}")
        action = "next_to"; pos += 2
    elif peek() == "above" :
        action = "above"; pos += 1
    if action in PAIR_ACTIONS:
        if peek() in ("a", "an"):
            pos += 1
        if peek() not in SUBJECTS:
            raise GrammarError(f"pair action without pair subject in {text!r}")
        pair_subject = toks[pos]; pos += 1

    if peek() in ("at", "in"):
        rest = " ".join(toks[pos:])
        for name, phrase in SCENE_PHRASES.items():
            if rest == phrase:
                scene = name
                pos = len(toks)
                break
        if scene is None:
            raise GrammarError(f"bad scene phrase in {text!r}")
    if pos != len(toks):
        raise GrammarError(f"trailing tokens in {text!r}")

    return PromptSpec.build(_infer_bucket(emotion, action, scene), subject,
                            emotion, action, pair_subject, color, scene)


# ---------------------------------------------------------------------------
# Prompt sets (HITL buckets)

# Paper-scale prompt counts per bucket; desk runs scale these down.
PAPER_BUCKET_COUNTS = {Bucket.EMOTION: 7000, Bucket.COMPOSITION: 15500, Bucket.SCENE: 3300}

_COLOR_OPTIONS = (None,) + COLORS


def _all_emotion_specs():
    for subj, emo in itertools.product(SUBJECTS, EMOTIONS):
        yield PromptSpec.build(Bucket.EMOTION, subj, emotion=emo)


def _all_composition_specs():
    for subj, color, act in itertools.product(SUBJECTS, _COLOR_OPTIONS, SINGLE_ACTIONS):
        yield PromptSpec.build(Bucket.COMPOSITION, subj, action=act, color=color)
    for subj, color, act, pair in itertools.product(
            SUBJECTS, _COLOR_OPTIONS, PAIR_ACTIONS, SUBJECTS):
        yield PromptSpec.build(Bucket.COMPOSITION, subj, action=act,
                               pair_subject=pair, color=color)


def _all_scene_specs():
    for subj, color, scene in itertools.product(SUBJECTS, _COLOR_OPTIONS, SCENES):
        yield PromptSpec.build(Bucket.SCENE, subj, color=color, scene=scene)


def enumerate_bucket(bucket: Bucket) -> list[PromptSpec]:
    """Full Cartesian enumeration of one bucket, in deterministic order."""
    gen = {Bucket.EMOTION: _all_emotion_specs,
           Bucket.COMPOSITION: _all_composition_specs,
           Bucket.SCENE: _all_scene_specs}[bucket]
    return list(gen())


def build_prompt_sets(scale: float, seed: int = 0,
                      subjects=SUBJECTS, emotions=EMOTIONS) -> dict[Bucket, list[PromptSpec]]:
    """Bucketed prompt lists sized to ``scale`` times the paper's counts.

    Prompts are drawn without replacement from the full Cartesian grammar
    with a seeded shuffle; a request beyond a bucket's capacity is capped
    at the capacity.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    out: dict[Bucket, list[PromptSpec]] = {}
    rng = np.random.default_rng(seed)
    for bucket in Bucket:
        full = enumerate_bucket(bucket)
        if bucket is Bucket.EMOTION:
            full = [s for s in full if s.subject in subjects and s.emotion in emotions]
        want = int(round(PAPER_BUCKET_COUNTS[bucket] * scale))
        n = min(want, len(full))
        idx = rng.permutation(len(full))[:n]
        out[bucket] = [full[i] for i in sorted(idx)]
    return out


# ---------------------------------------------------------------------------
# Token vocabulary shared by the prompt encoder and the enhancer

UNK_TOKEN = "<unk>"
NULL_TOKEN = "<null>"


def vocabulary() -> dict[str, int]:
    """All grammar tokens, with reserved UNK (0) and NULL (1) entries."""
    words = {"a", "an"}
    words.update(SUBJECTS, COLORS, EMOTIONS)
    for phrase in ACTION_PHRASES.values():
        words.update(phrase.split())
    for phrase in SCENE_PHRASES.values():
        words.update(phrase.split())
    for suffix in STYLE_SUFFIXES.values():
        words.update(suffix.split())
    vocab = {UNK_TOKEN: 0, NULL_TOKEN: 1}
    for i, w in enumerate(sorted(words)):
        vocab[w] = 2 + i
    return vocab


def tokenize(text: str) -> list[str]:
    return text.lower().split()
