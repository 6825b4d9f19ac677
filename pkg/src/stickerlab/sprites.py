"""Procedural sprite renderer.

Renders 32x32 RGBA sprites realizing a ``PromptSpec`` in a ``StyleSpec``.
Every attribute the grammar can express (subject shape, color, emotion
glyph, action accessories, pair layout, scene decor) is drawn so that the
programmatic oracle in ``oracle.py`` can recover it; renderer and oracle
share the geometry constants defined here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import ndimage

from .grammar import PromptSpec, GrammarError

SIZE = 32

# Subject fill palette (saturated, hue-separable).
PALETTE = {
    "red": (0.88, 0.15, 0.15),
    "blue": (0.18, 0.35, 0.85),
    "green": (0.18, 0.72, 0.22),
    "yellow": (0.95, 0.83, 0.10),
    "purple": (0.62, 0.22, 0.78),
    "orange": (0.95, 0.52, 0.08),
}

# Default color per shape, used for pair subjects and color-free prompts.
DEFAULT_COLOR = {
    "circle": "blue", "square": "green", "triangle": "orange",
    "star": "yellow", "heart": "red",
}

INK = (0.08, 0.08, 0.12)             # outlines and face glyphs
BALL_BROWN = (0.48, 0.29, 0.10)      # holding / juggling accessory
FLAG_TEAL = (0.05, 0.55, 0.55)       # waving accessory
DECOR_COLORS = {
    "beach": (0.82, 0.70, 0.42),
    "garden": (0.05, 0.42, 0.10),
    "night": (0.16, 0.14, 0.40),
    "party": (0.10, 0.78, 0.85),
    "snow": (0.72, 0.82, 0.95),
}


class StyleId(str, Enum):
    FLAT = "FLAT"                    # target: flat fill + dark outline, transparent bg
    VOLUME = "VOLUME"                # alternate: gradient shading, transparent bg
    NOISE_PASTEL = "NOISE_PASTEL"    # distractor: washed-out fill, white bg
    NOISE_PHOTO = "NOISE_PHOTO"      # distractor: textured opaque background
    NOISE_OUTLINE = "NOISE_OUTLINE"  # distractor: hollow shapes, gray bg


REFERENCE_STYLES = (StyleId.FLAT, StyleId.VOLUME)
NOISE_STYLES = (StyleId.NOISE_PASTEL, StyleId.NOISE_PHOTO, StyleId.NOISE_OUTLINE)
CLEAN_BG_STYLES = (StyleId.FLAT, StyleId.VOLUME, StyleId.NOISE_PASTEL)


@dataclass(frozen=True)
class StyleSpec:
    style_id: StyleId
    outline_width: float = 1.6
    background: str = "transparent"  # transparent | white | photo | gray
    palette: dict = field(default_factory=lambda: dict(PALETTE), compare=False)

    @staticmethod
    def preset(style_id: StyleId | str) -> "StyleSpec":
        style_id = StyleId(style_id)
        if style_id is StyleId.FLAT:
            return StyleSpec(style_id, outline_width=1.6, background="transparent")
        if style_id is StyleId.VOLUME:
            return StyleSpec(style_id, outline_width=0.0, background="transparent")
        if style_id is StyleId.NOISE_PASTEL:
            return StyleSpec(style_id, outline_width=0.0, background="white")
        if style_id is StyleId.NOISE_PHOTO:
            return StyleSpec(style_id, outline_width=0.0, background="photo")
        return StyleSpec(style_id, outline_width=2.6, background="gray")


@dataclass
class Sprite:
    rgb: np.ndarray    # (3, 32, 32) float32 in [0, 1]
    alpha: np.ndarray  # (1, 32, 32) float32 in [0, 1]
    spec: PromptSpec
    style: StyleSpec


class RenderError(ValueError):
    """Raised for spec/style combinations the renderer cannot realize."""


# ---------------------------------------------------------------------------
# Geometry

_YY, _XX = np.mgrid[0:SIZE, 0:SIZE].astype(np.float64)


def shape_mask(shape: str, cx: float, cy: float, r: float) -> np.ndarray:
    """Boolean (32, 32) silhouette of one subject shape."""
    x = _XX - cx
    y = _YY - cy
    if shape == "circle":
        return x * x + y * y <= r * r
    if shape == "square":
        h = 0.82 * r
        return (np.abs(x) <= h) & (np.abs(y) <= h)
    if shape == "triangle":
        # Up-pointing triangle: apex (0, -r), base corners (+-0.95r, +0.75r).
        ax, ay = 0.0, -r
        bx, by = -0.95 * r, 0.75 * r
        cx2, cy2 = 0.95 * r, 0.75 * r
        d1 = (x - bx) * (ay - by) - (y - by) * (ax - bx)
        d2 = (x - cx2) * (by - cy2) - (y - cy2) * (bx - cx2)
        d3 = (x - ax) * (cy2 - ay) - (y - ay) * (cx2 - ax)
        neg = (d1 < 0) | (d2 < 0) | (d3 < 0)
        pos = (d1 > 0) | (d2 > 0) | (d3 > 0)
        return ~(neg & pos)
    if shape == "star":
        # 5-point star, one point up: radius oscillates with angle.
        theta = np.arctan2(y, x) + np.pi / 2
        u = np.mod(theta * 5 / (2 * np.pi), 1.0)
        rb = (0.44 + (1.0 - 0.44) * 2 * np.abs(u - 0.5)) * r * 1.12
        return np.sqrt(x * x + y * y) <= rb
    if shape == "heart":
        xs = x / (r * 1.12)
        ys = -(y / (r * 1.12)) + 0.22
        f = (xs * xs + ys * ys - 0.95) ** 3 - (xs * xs) * (ys ** 3) * 2.2
        return f <= 0
    raise RenderError(f"unknown shape {shape!r}")


def _disc(cx, cy, r):
    return (_XX - cx) ** 2 + (_YY - cy) ** 2 <= r * r


def _segment(x0, y0, x1, y1, w):
    """Mask of points within distance w of segment (x0,y0)-(x1,y1)."""
    dx, dy = x1 - x0, y1 - y0
    L2 = dx * dx + dy * dy
    if L2 == 0:
        return _disc(x0, y0, w)
    t = ((_XX - x0) * dx + (_YY - y0) * dy) / L2
    t = np.clip(t, 0.0, 1.0)
    px, py = x0 + t * dx, y0 + t * dy
    return (_XX - px) ** 2 + (_YY - py) ** 2 <= w * w


def _arc(cx, cy, r, w, lower: bool):
    """Band around a circle, keeping only its lower (smile) or upper half."""
    d = np.sqrt((_XX - cx) ** 2 + (_YY - cy) ** 2)
    band = np.abs(d - r) <= w
    half = _YY >= cy + 0.35 * r if lower else _YY <= cy - 0.35 * r
    return band & half & (np.abs(_XX - cx) <= r * 0.95)


# Face glyph placement, in units of the subject radius.
EYE_DX, EYE_DY, EYE_R = 0.34, -0.26, 0.085
MOUTH_DY = 0.28


def _face_ink(emotion_class: Optional[str], cx, cy, r) -> np.ndarray:
    """Ink mask for the face glyph. ``None`` renders the neutral face."""
    ink = np.zeros((SIZE, SIZE), dtype=bool)
    eye_r = max(1.0, EYE_R * r)
    if emotion_class == "surprised":
        eye_r *= 1.5
    for sx in (-1, 1):
        ink |= _disc(cx + sx * EYE_DX * r, cy + EYE_DY * r, eye_r)
    my = cy + MOUTH_DY * r
    if emotion_class == "happy":
        ink |= _arc(cx, my - 0.30 * r, 0.42 * r, 0.75, lower=True)
    elif emotion_class == "sad":
        ink |= _arc(cx, my + 0.42 * r, 0.42 * r, 0.75, lower=False)
    elif emotion_class == "surprised":
        d = np.sqrt((_XX - cx) ** 2 + (_YY - my) ** 2)
        ink |= np.abs(d - 0.17 * r) <= 0.8
    elif emotion_class == "angry":
        ink |= _segment(cx - 0.30 * r, my, cx + 0.30 * r, my, 0.75)
        for sx in (-1, 1):  # brows slanting toward the nose
            ex = cx + sx * EYE_DX * r
            ey = cy + EYE_DY * r
            ink |= _segment(ex - sx * 0.22 * r, ey - 0.32 * r,
                            ex + sx * 0.16 * r, ey - 0.16 * r, 0.6)
    else:  # neutral: short flat mouth, no brows
        ink |= _segment(cx - 0.22 * r, my, cx + 0.22 * r, my, 0.65)
    return ink


# Layout constants shared with the oracle.
SINGLE_CENTER, SINGLE_R = (16.0, 16.0), 10.0
ACTION_CENTER, ACTION_R = (13.5, 17.5), 7.5
PAIR_R = 5.8
PAIR_NEXT_TO = ((9.0, 16.0), (23.0, 16.0))
PAIR_ABOVE = ((16.0, 8.8), (16.0, 23.2))
SUBJECT_MIN_AREA = 40      # components at least this large count as subjects
ACCESSORY_MAX_AREA = 32


def _layout(spec: PromptSpec, rng: np.random.Generator, jitter: float):
    """Subject centers/radii for a spec, with geometry jitter."""
    def j(v, amt):
        return v + float(rng.uniform(-amt, amt)) * jitter

    if spec.action in ("next_to", "above"):
        (c1, c2) = PAIR_NEXT_TO if spec.action == "next_to" else PAIR_ABOVE
        r = j(PAIR_R, 0.5)
        return [(j(c1[0], 1.0), j(c1[1], 1.0), r), (j(c2[0], 1.0), j(c2[1], 1.0), r)]
    if spec.action is not None:
        return [(j(ACTION_CENTER[0], 1.0), j(ACTION_CENTER[1], 1.0), j(ACTION_R, 0.8))]
    return [(j(SINGLE_CENTER[0], 1.2), j(SINGLE_CENTER[1], 1.2), j(SINGLE_R, 1.2))]


def _accessory_layers(spec, cx, cy, r, rng, jitter):
    """(mask, rgb) layers for action accessories."""
    layers = []
    if spec.action == "holding":
        bx = cx + r + 2.8 + rng.uniform(-0.5, 0.5) * jitter
        by = cy + 0.45 * r
        layers.append((_disc(bx, by, 2.2), BALL_BROWN))
    elif spec.action == "juggling":
        top = cy - r
        for dx, dy in ((-4.5, -2.8), (0.0, -5.0), (4.5, -2.8)):
            layers.append((_disc(cx + dx, top + dy, 1.5), BALL_BROWN))
    elif spec.action == "waving":
        px = cx + r + 2.0 + rng.uniform(-0.4, 0.4) * jitter
        pole_top = cy - r - 1.0
        layers.append((_segment(px, cy, px, pole_top, 0.55), INK))
        flag = _segment(px + 0.4, pole_top + 0.8, px + 3.6, pole_top + 1.6, 1.4)
        layers.append((flag & (_XX >= px), FLAG_TEAL))
    return layers


def _decor_layers(scene, rng, jitter):
    layers = []
    col = DECOR_COLORS.get(scene)
    j = lambda a: float(rng.uniform(-a, a)) * jitter
    if scene == "beach":
        for x in (5, 16, 27):
            layers.append((_disc(x + j(1.5), 29.3 + j(0.7), 1.8), col))
    elif scene == "garden":
        for x in (6, 16, 26):
            bx = x + j(1.5)
            layers.append((_segment(bx, 30.5, bx, 27.5, 0.8), col))
            layers.append((_segment(bx - 1.5, 30.5, bx + 1.5, 30.5, 0.7), col))
    elif scene == "night":
        crescent = _disc(6, 6, 3.6) & ~_disc(7.6, 4.9, 3.1)
        layers.append((crescent, col))
        for x, y in ((24, 4), (28, 8)):
            layers.append((_disc(x + j(1.0), y + j(1.0), 0.8), col))
    elif scene == "party":
        for x, y in ((5, 4), (11, 7), (17, 3), (23, 6), (28, 3)):
            layers.append((_disc(x + j(1.2), y + j(1.2), 1.1), col))
    elif scene == "snow":
        for x, y in ((5, 5), (13, 3), (21, 6), (27, 4), (8, 28), (24, 28)):
            layers.append((_disc(x + j(1.2), y + j(1.2), 1.1), col))
    return layers


# ---------------------------------------------------------------------------
# Style shading

def _paint(canvas, mask, color):
    canvas[:, mask] = np.asarray(color, dtype=np.float64)[:, None]


def _fill_subject(canvas, mask, color_rgb, style: StyleSpec, rng, jitter):
    sid = style.style_id
    color = np.asarray(color_rgb, dtype=np.float64)
    if sid is StyleId.NOISE_OUTLINE:
        pass  # hollow: background shows through
    elif sid is StyleId.NOISE_PASTEL:
        _paint(canvas, mask, 0.55 * color + 0.45)
    elif sid in (StyleId.VOLUME, StyleId.NOISE_PHOTO):
        ys = _YY[mask]
        if ys.size:
            y0, y1 = ys.min(), ys.max()
            g = 1.18 - 0.55 * (ys - y0) / max(y1 - y0, 1.0)
            shaded = np.clip(color[:, None] * g[None, :], 0.0, 1.0)
            if sid is StyleId.NOISE_PHOTO:
                shaded = 0.8 * shaded + 0.08
            canvas[:, mask] = shaded
        if sid is StyleId.VOLUME:
            cx = _XX[mask].mean() if mask.any() else SIZE / 2
            cy = _YY[mask].mean() if mask.any() else SIZE / 2
            ys2 = _YY[mask]
            r_est = np.sqrt(mask.sum() / np.pi)
            hl = np.exp(-(((_XX - (cx - 0.35 * r_est)) ** 2 +
                           (_YY - (cy - 0.35 * r_est)) ** 2) / (0.3 * r_est ** 2 + 1e-9)))
            canvas[:, mask] = np.clip(canvas[:, mask] + 0.35 * hl[mask][None, :], 0, 1)
    else:  # FLAT
        _paint(canvas, mask, color)
    if style.outline_width > 0:
        dist = ndimage.distance_transform_edt(mask)
        outline = mask & (dist <= style.outline_width)
        _paint(canvas, outline, INK)


def _background(style: StyleSpec, rng) -> tuple[np.ndarray, bool]:
    """(rgb canvas, transparent?) before any foreground is drawn."""
    canvas = np.ones((3, SIZE, SIZE), dtype=np.float64)
    if style.background == "transparent":
        return canvas, True
    if style.background == "white":
        return canvas, False
    if style.background == "gray":
        return np.full_like(canvas, 0.84), False
    # photo: vertical two-tone gradient plus grain
    top = np.array([0.55, 0.62, 0.72]) + rng.uniform(-0.06, 0.06, 3)
    bot = np.array([0.72, 0.68, 0.58]) + rng.uniform(-0.06, 0.06, 3)
    g = (_YY / (SIZE - 1))[None, :, :]
    canvas = top[:, None, None] * (1 - g) + bot[:, None, None] * g
    canvas += rng.normal(0.0, 0.02, canvas.shape)
    return np.clip(canvas, 0, 1), False


def render_sprite(spec: PromptSpec, style: StyleSpec, rng: np.random.Generator,
                  jitter: float = 1.0) -> Sprite:
    """Render a spec in a style; deterministic given the rng state."""
    if spec.subject not in DEFAULT_COLOR:
        raise RenderError(f"unrenderable subject {spec.subject!r}")
    canvas, transparent = _background(style, rng)
    fg = np.zeros((SIZE, SIZE), dtype=bool)

    layout = _layout(spec, rng, jitter)
    subjects = [(spec.subject, spec.color or DEFAULT_COLOR[spec.subject])]
    if len(layout) == 2:
        subjects.append((spec.pair_subject, DEFAULT_COLOR[spec.pair_subject]))

    for (shape, color_name), (cx, cy, r) in zip(subjects, layout):
        mask = shape_mask(shape, cx, cy, r)
        _fill_subject(canvas, mask, style.palette[color_name], style, rng, jitter)
        face = _face_ink(spec.emotion_class, cx, cy, r) & mask
        _paint(canvas, face, INK)
        fg |= mask

    cx, cy, r = layout[0]
    for mask, color in _accessory_layers(spec, cx, cy, r, rng, jitter):
        _paint(canvas, mask, color)
        fg |= mask
    for mask, color in _decor_layers(spec.scene, rng, jitter):
        _paint(canvas, mask, color)
        fg |= mask

    alpha = fg.astype(np.float64) if transparent else np.ones((SIZE, SIZE))
    return Sprite(rgb=canvas.astype(np.float32),
                  alpha=alpha[None].astype(np.float32),
                  spec=spec, style=style)


def foreground_fraction(sprite: Sprite) -> float:
    return float((sprite.alpha > 0.5).mean())
