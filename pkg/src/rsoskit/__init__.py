"""Groupoid-graded linear algebra for restricted height models: the elliptic
dynamical R-matrix, graded tensor categories, convolution rings as difference
operators, commuting transfer matrices, and the rank-2 fusion ring."""

from .convolution import (ConvolutionElement, DifferenceOperator, character,
                          chi, conv_mul, involution, to_difference_operator)
from .elliptic import (EllipticParams, FlatR, bracket, dynamical_ybe_residual,
                       r_matrix, r_minus1, r_reg1, theta, unitarity_residual)
from .graded import (DualityData, GradedMorphism, GradedSpace, align,
                     dual_space, identity_morphism, tensor_morphism,
                     tensor_space, unit_space)
from .groupoid import (AlcoveKind, AlcoveSpec, Arrow, Context, WeightPoint,
                       alcove_contains, compose, enumerate_alcove, eps,
                       identity_arrow, inverse, rho, rsos_alcove)
from .fusion import (EigenFunction, FusionBases, exterior_character,
                     fusion_bases, fusion_coeff, psi, sym_power_character_n2,
                     sym_square_character, verify_fusion_rules, verify_spectrum)
from .rsos import (BoltzmannBlock, ModelKind, boltzmann_weight,
                   build_vector_space, restricted_r, star_triangle_residual)
from .transfer import (LOperator, TransferOperator, commutator_residual,
                       l_tensor, partial_trace, partition_enumerate,
                       partition_via_transfer, rll_residual, transfer_matrix,
                       trivial_l_operator, vector_chain, vector_l_operator)

__version__ = "0.1.0"
