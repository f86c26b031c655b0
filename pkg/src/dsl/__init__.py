"""Langage d'expressions de région : analyse, écriture canonique et conversion."""

from .nodes import (
    DisplaceNode,
    ExpressionNode,
    PrimitiveNode,
    ReflectNode,
    RotateNode,
    Span,
    UnionNode,
)
from .parser import format_expression, parse_region, parse_region_expression, to_region

__all__ = [
    "DisplaceNode", "ExpressionNode", "PrimitiveNode", "ReflectNode", "RotateNode", "Span",
    "UnionNode", "format_expression", "parse_region", "parse_region_expression", "to_region",
]
