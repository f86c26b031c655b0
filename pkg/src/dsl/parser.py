"""
Analyse des expressions de région.

Grammaire :

    expr      := primitive | "rot" "(" num "," expr ")" | "refl" "(" expr ")"
               | "disp" "(" num "," num "," expr ")" | "union" "(" expr { "," expr } ")"
    primitive := "point" | "seg" "(" num "," num ")" | "line" "(" num "," num ")"
               | "rect" "(" num "," num "," num "," num ")" | "disk" "(" num "," num "," num ")"
               | "tri" "(" num "," num ")" | "poly" "(" num "," num ")"

Les angles sont en radians. Les erreurs indiquent ligne:colonne (à partir de 1)
et le lexème fautif.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from typing import NoReturn

from ..core.errors import ExpressionArityError, ExpressionSyntaxError, RegionError
from ..core.geometry import (
    CanonicalPolygon,
    Disk,
    Displaced,
    IsoTriangle,
    Line,
    PointOrigin,
    Rectangle,
    ReflectedOrigin,
    Region,
    Rotated,
    Segment,
    Union,
    format_number,
)
from .nodes import (
    PRIMITIVE_ARITY,
    DisplaceNode,
    ExpressionNode,
    PrimitiveNode,
    ReflectNode,
    RotateNode,
    Span,
    UnionNode,
)

logger = logging.getLogger(__name__)

_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_PUNCTUATION = {"(": "lparen", ")": "rparen", ",": "comma"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    """Découpe le texte en lexèmes ; le dernier est toujours ``end``."""
    tokens = []
    line, column, i = 1, 1, 0
    while i < len(text):
        char = text[i]
        if char == "\n":
            line, column, i = line + 1, 1, i + 1
            continue
        if char.isspace():
            column, i = column + 1, i + 1
            continue
        if char in _PUNCTUATION:
            tokens.append(Token(_PUNCTUATION[char], char, line, column))
            column, i = column + 1, i + 1
            continue
        match = _NUMBER.match(text, i) or _NAME.match(text, i)
        if match is None:
            raise ExpressionSyntaxError(f"Caractère inattendu '{char}'", line, column, char)
        kind = "name" if _NAME.fullmatch(match.group()) else "number"
        tokens.append(Token(kind, match.group(), line, column))
        column += match.end() - i
        i = match.end()
    tokens.append(Token("end", "", line, column))
    return tokens


class _Parser:
    """Descente récursive sur la liste de lexèmes."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.position = 0

    def _peek(self) -> Token:
        return self.tokens[self.position]

    def _advance(self) -> Token:
        token = self.tokens[self.position]
        if token.kind != "end":
            self.position += 1
        return token

    @staticmethod
    def _fail(message: str, token: Token, error=ExpressionSyntaxError) -> NoReturn:
        shown = token.text or "fin de texte"
        raise error(f"{message}, trouvé '{shown}'", token.line, token.column, token.text)

    def _expect(self, kind: str, message: str) -> Token:
        token = self._peek()
        if token.kind != kind:
            self._fail(message, token)
        return self._advance()

    def _separator(self, name: str) -> None:
        """Virgule entre arguments ; une parenthèse fermante signale un argument manquant."""
        token = self._peek()
        if token.kind == "rparen":
            self._fail(f"Argument manquant pour '{name}'", token, ExpressionArityError)
        self._expect("comma", "',' attendu")

    def _number(self) -> float:
        token = self._expect("number", "Nombre attendu")
        value = float(token.text)
        if not math.isfinite(value):
            self._fail("Littéral non fini", token)
        return value

    def parse(self) -> ExpressionNode:
        node = self._expression()
        token = self._peek()
        if token.kind != "end":
            self._fail("Texte inattendu après l'expression", token)
        return node

    def _expression(self) -> ExpressionNode:
        token = self._expect("name", "Région attendue")
        name = token.text
        span = Span(token.line, token.column)

        if name == "point":
            return PrimitiveNode("point", (), span)
        if name in PRIMITIVE_ARITY:
            return self._primitive(name, span)
        if name == "rot":
            self._expect("lparen", "'(' attendu")
            angle = self._number()
            self._separator(name)
            body = self._expression()
            self._expect("rparen", "')' attendu")
            return RotateNode(angle, body, span)
        if name == "refl":
            self._expect("lparen", "'(' attendu")
            body = self._expression()
            self._expect("rparen", "')' attendu")
            return ReflectNode(body, span)
        if name == "disp":
            self._expect("lparen", "'(' attendu")
            s = self._number()
            self._separator(name)
            t = self._number()
            self._separator(name)
            body = self._expression()
            self._expect("rparen", "')' attendu")
            return DisplaceNode(s, t, body, span)
        if name == "union":
            self._expect("lparen", "'(' attendu")
            members = [self._expression()]
            while self._peek().kind == "comma":
                self._advance()
                members.append(self._expression())
            self._expect("rparen", "',' ou ')' attendu")
            return UnionNode(tuple(members), span)
        self._fail("Région inconnue", token)

    def _primitive(self, name: str, span: Span) -> PrimitiveNode:
        self._expect("lparen", "'(' attendu")
        args = [self._number()]
        while self._peek().kind == "comma":
            self._advance()
            args.append(self._number())
        closing = self._expect("rparen", "',' ou ')' attendu")
        expected = PRIMITIVE_ARITY[name]
        if len(args) != expected:
            raise ExpressionArityError(
                f"'{name}' attend {expected} arguments, {len(args)} reçus",
                closing.line, closing.column, closing.text,
            )
        return PrimitiveNode(name, tuple(args), span)


def parse_region_expression(text: str) -> ExpressionNode:
    """
    Analyse une expression de région.

    Args:
        text: Expression source

    Returns:
        ExpressionNode: arbre syntaxique, positions comprises

    Raises:
        ExpressionSyntaxError: erreur de syntaxe ou littéral non fini
        ExpressionArityError: nombre d'arguments incorrect
    """
    node = _Parser(tokenize(text)).parse()
    logger.debug("Expression analysée: %s", format_expression(node))
    return node


def format_expression(node: ExpressionNode) -> str:
    """Écriture canonique, relue à l'identique par parse_region_expression."""
    if isinstance(node, PrimitiveNode):
        if node.name == "point":
            return "point"
        return f"{node.name}(" + ",".join(format_number(a) for a in node.args) + ")"
    if isinstance(node, RotateNode):
        return f"rot({format_number(node.angle)},{format_expression(node.body)})"
    if isinstance(node, ReflectNode):
        return f"refl({format_expression(node.body)})"
    if isinstance(node, DisplaceNode):
        return (f"disp({format_number(node.s)},{format_number(node.t)},"
                f"{format_expression(node.body)})")
    return "union(" + ",".join(format_expression(m) for m in node.members) + ")"


def _sides(value: float) -> int:
    if value != int(value):
        raise RegionError(f"Nombre de côtés non entier: {value}")
    return int(value)


def to_region(node: ExpressionNode) -> Region:
    """Convertit l'arbre syntaxique en région géométrique."""
    if isinstance(node, PrimitiveNode):
        a = node.args
        if node.name == "point":
            return PointOrigin()
        if node.name == "seg":
            return Segment(a[0], a[1])
        if node.name == "line":
            return Line(a[0], a[1])
        if node.name == "rect":
            return Rectangle(*a)
        if node.name == "disk":
            return Disk((a[0], a[1]), a[2])
        if node.name == "tri":
            return IsoTriangle(a[0], _sides(a[1]))
        return CanonicalPolygon(a[0], _sides(a[1]))
    if isinstance(node, RotateNode):
        return Rotated(node.angle, to_region(node.body))
    if isinstance(node, ReflectNode):
        return ReflectedOrigin(to_region(node.body))
    if isinstance(node, DisplaceNode):
        return Displaced((node.s, node.t), to_region(node.body))
    return Union(tuple(to_region(m) for m in node.members), disjoint=True)


def parse_region(text: str) -> Region:
    """Analyse une expression et retourne directement la région."""
    return to_region(parse_region_expression(text))
