"""
Bivariate generating functions of the constant Samuelson-Hicks recurrence.
"""

from multitime.genfunc.closed_form import DiagonalClosedForm, characteristic_constants, diagonal_closed_form
from multitime.genfunc.polynomial import BivariatePolynomial
from multitime.genfunc.rational import (
    BoundaryLayers,
    RationalGF,
    build_gf_univariate,
    build_gf_variant1,
    build_gf_variant2,
    expand,
    verify_functional_equation,
)
from multitime.genfunc.series import BivariateSeries

__all__ = [
    "BivariatePolynomial",
    "BivariateSeries",
    "BoundaryLayers",
    "DiagonalClosedForm",
    "RationalGF",
    "build_gf_univariate",
    "build_gf_variant1",
    "build_gf_variant2",
    "characteristic_constants",
    "diagonal_closed_form",
    "expand",
    "verify_functional_equation",
]
