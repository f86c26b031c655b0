"""fockregions - Opérateurs de régions de l'espace des phases en base de Fock tronquée."""

__version__ = "0.1.0"
__author__ = "Louis"
