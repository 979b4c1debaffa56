"""Desk-scale 2D spectral simulator for an incompressible magnetoelastic
solid: Navier-Stokes momentum balance with magnetic and elastic stresses,
regularized transport of the deformation gradient, and the convective
Landau-Lifshitz-Gilbert equation, all on the periodic box."""

from .domain import (ConfigurationError, Domain, Rank, SpectralField, dealias,
                     divergence, gradient, l2_inner, l2_norm, laplacian,
                     leray_project)
from .bases import ScalarBasis, VelocityBasis
from .kernels import BACKEND
from .params import ElasticLaw, ExternalField, ModelParams, UnsupportedParameters

__all__ = [
    "BACKEND",
    "ConfigurationError",
    "Domain",
    "ElasticLaw",
    "ExternalField",
    "ModelParams",
    "Rank",
    "ScalarBasis",
    "SpectralField",
    "UnsupportedParameters",
    "VelocityBasis",
    "dealias",
    "divergence",
    "gradient",
    "l2_inner",
    "l2_norm",
    "laplacian",
    "leray_project",
]

__version__ = "0.1.0"
