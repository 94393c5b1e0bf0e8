"""Numerical laboratory for zero-free multivariate polynomials.

Core layers: sparse polynomial arithmetic, circular domains with Möbius
transport, a slicing stability oracle, operator symbols, composition and
apolarity checks, and the spin-system applications.  A FastAPI service and a
thin CLI front them; see ``stablelab.service`` and ``stablelab.cli``.
"""

from .composition import (GraceReport, InternalCheckError, apolarity_bracket,
                          compose_disc, compose_halfplane, grace_check_disc,
                          grace_check_halfplane, run_grace_campaign_disc,
                          run_grace_campaign_halfplane)
from .domains import (CircularDomain, ClassMembership, Disc, DiscExterior, HalfPlane,
                      MoebiusMap, MoebiusPoleError, contains, domain_from_dict,
                      moebius_for, sample_interior, stable_class_membership,
                      to_upper_half_plane, transport, transport_between)
from .operators import (LinearOperator, SymbolReport, apply, asano_contraction,
                        classify_preserver, classify_preserver_ladder,
                        exp_series_symbol, hadamard_schur, identity_operator,
                        lee_yang_edge, lieb_sokal, lieb_sokal_operator, make_operator,
                        multi_affine_part, rank_at_most_one, symbol_disc,
                        symbol_general, symbol_halfplane)
from .oracle import (Counterexample, NoZeroFound, OracleConfig, StabilityVerdict,
                     find_zero, is_stable_exact_univariate, univariate_roots)
from .polynomials import (CapacityError, Exponent, MultiPoly, PolyFormatError,
                          assemble_slices, coefficient_slices, exponents_below,
                          multi_binomial, poly_allclose)
from .statmech import (FugacityPolynomial, SpinSystem, WeightedGraph,
                       circle_theorem_product, cosh_truncation, diagonal_partition,
                       edge_laplace_transform, edge_operator_pipeline, edge_product,
                       heilmann_lieb_check, heilmann_lieb_poly, lee_yang_check,
                       lee_yang_exterior_check, matchings_enumeration, mu_weight,
                       partition_fugacity)

__version__ = "0.1.0"
