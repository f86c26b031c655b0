"""Exceptions levées par fockregions."""


class FockRegionsError(Exception):
    """Base commune de toutes les erreurs du paquet."""


class InvalidTruncationError(FockRegionsError, ValueError):
    """Paramètres de troncature incohérents (dimension, bloc effectif, tolérance)."""


class NotHermitianError(FockRegionsError, ValueError):
    """Opérateur non hermitien là où l'hermiticité est requise."""


class DimensionMismatchError(FockRegionsError, ValueError):
    """Dimensions ou formes de matrices incompatibles."""


class RegionError(FockRegionsError, ValueError):
    """Région de l'espace des phases invalide ou non prise en charge."""


class UnknownMapKindError(FockRegionsError, ValueError):
    """Type d'application CPTI inconnu."""


class NumericalPreconditionError(FockRegionsError, RuntimeError):
    """Entrée non finie ou débordement numérique."""


class CorruptionError(FockRegionsError, RuntimeError):
    """Fichier d'opérateur dont l'empreinte ne correspond plus au contenu."""


class ConfigError(FockRegionsError, ValueError):
    """Fichier ou options de configuration invalides."""


class ExpressionSyntaxError(FockRegionsError, ValueError):
    """Erreur de syntaxe dans une expression de région."""

    def __init__(self, message: str, line: int, column: int, token: str = ""):
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"{line}:{column}: {message}")


class ExpressionArityError(ExpressionSyntaxError):
    """Nombre d'arguments incorrect pour une primitive ou une transformation."""


class MapParameterError(FockRegionsError, ValueError):
    """Paramètres manquants ou invalides pour une application CPTI."""
