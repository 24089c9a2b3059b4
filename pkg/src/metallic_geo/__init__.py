"""Curvature invariants and optimal inequalities for bi-slant submanifolds of
locally metallic product space forms."""

__version__ = "0.1.0"

from .algebra import MetallicParams, metallic_constants, metallic_from_product, product_from_metallic
from .ambient import ProductSpaceForm, make_space
from .immersion import PointData, SlantData, make_immersion, point_data, slant_analysis
from .inequalities import InequalityResult, PointBundle, make_bundle, verify_all

__all__ = [
    "InequalityResult", "MetallicParams", "PointBundle", "PointData", "ProductSpaceForm", "SlantData",
    "make_bundle", "make_immersion", "make_space", "metallic_constants", "metallic_from_product",
    "point_data", "product_from_metallic", "slant_analysis", "verify_all",
]
