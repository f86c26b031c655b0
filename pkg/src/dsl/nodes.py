"""Arbre syntaxique des expressions de région."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Span:
    """Position 1-based dans le texte source."""
    line: int
    column: int


@dataclass(frozen=True)
class PrimitiveNode:
    """point, seg, line, rect, disk, tri ou poly avec leurs arguments numériques."""
    name: str
    args: tuple[float, ...] = ()
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RotateNode:
    angle: float
    body: "ExpressionNode"
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ReflectNode:
    body: "ExpressionNode"
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class DisplaceNode:
    s: float
    t: float
    body: "ExpressionNode"
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class UnionNode:
    members: tuple["ExpressionNode", ...]
    span: Span | None = field(default=None, compare=False)


ExpressionNode = Union[PrimitiveNode, RotateNode, ReflectNode, DisplaceNode, UnionNode]

# Nombre d'arguments de chaque primitive
PRIMITIVE_ARITY = {
    "point": 0,
    "seg": 2,
    "line": 2,
    "rect": 4,
    "disk": 3,
    "tri": 2,
    "poly": 2,
}

TRANSFORMS = ("rot", "refl", "disp", "union")
