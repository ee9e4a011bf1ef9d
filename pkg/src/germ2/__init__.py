"""Exact jet algebra, blow-up charts, normal forms and orbit dynamics for
germs of holomorphic diffeomorphisms of (C^2, 0)."""
from .scalar import GaussianRational, Poly1, RatFunc, gr
from .jets import Jet1, Jet2, MapGerm, VFieldGerm, compose, invert
from .germio import parse_germ, render_document

__all__ = [
    "GaussianRational", "Poly1", "RatFunc", "gr",
    "Jet1", "Jet2", "MapGerm", "VFieldGerm", "compose", "invert",
    "parse_germ", "render_document",
]
__version__ = "0.1.0"
