"""Exact-plus-numeric Morse-Novikov cohomology on finite models."""

from .cecomplex import (CEComplex, DiffForm, GateFailure, TwistForm,
                        cohomology, d_adjoint, d_twisted, hodge_star,
                        jumping_set, laplacian, wedge)
from .complexstructure import (BidegreeError, ComplexStructure, HodgeDiamond,
                               bidegree_split, dolbeault_twisted,
                               hodge_diamond, lee_torsion)
from .exactlinalg import (DomainMismatch, Matrix, SpecializationError,
                          elementary_divisors, kernel_basis, minor_gcd,
                          pseudo_inverse_apply, rank, specialize)
from .lcs import (DeformationRun, LCSCandidate, deform, lee_class_scan,
                  taming_check, vanishing_audit)
from .models import ModelRecord, load_model, verify_model
from .profile import BettiProfile
from .scalars import GaussianRational, LaurentPoly, RationalFunction, rat
from .simplicial import (IntegerCocycle, SimplicialComplex,
                         build_twisted_complex, betti, cyclic_cover,
                         euler_check, jumping_locus,
                         pullback_injectivity_check, subdivide)

__version__ = "0.1.0"
