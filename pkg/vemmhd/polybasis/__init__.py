from vemmhd.polybasis.decomposition import Pk2Decomposition, decompose_Pk2
from vemmhd.polybasis.l2 import l2_project_analytic, mass_matrix, stiffness_matrix
from vemmhd.polybasis.monomials import MonomialBasis, dim_poly, monomial_exponents, scaled_monomials
from vemmhd.polybasis.quadrature import QuadRule, edge_quadrature, polygon_quadrature

__all__ = [
    "MonomialBasis",
    "Pk2Decomposition",
    "QuadRule",
    "decompose_Pk2",
    "dim_poly",
    "edge_quadrature",
    "l2_project_analytic",
    "mass_matrix",
    "monomial_exponents",
    "polygon_quadrature",
    "scaled_monomials",
    "stiffness_matrix",
]
