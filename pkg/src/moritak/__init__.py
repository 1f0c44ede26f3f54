"""Fredholm operators on Hilbert modules over multi-matrix algebras, and the
K0 maps induced by Hilbert bimodules, computed numerically with exact
integer answers."""

from .algebra import (Algebra, AlgebraElement, AlgebraMatrix, K0Class, Unitization,
                      idempotent_to_projection, is_member, k0_of_projection, make_algebra,
                      minimal_projection, mv_partial_isometry, unitize)
from .bimodule import (Bimodule, check_conjugate_tensor, conjugate, corner_bimodule,
                       external_tensor, internal_tensor, is_left_full, is_right_full,
                       linking_algebra, make_bimodule, module_tensor, op_tensor)
from .decomposition import central_decomposition
from .errors import (AxiomViolationError, InvalidInputError, MoritaError, NoEquivalenceError,
                     NumericalDegeneracyError, PreconditionError)
from .fredholm import (index, pseudo_inverse, regularize, regularize_unitized,
                       same_index_witness, standard_index_op)
from .hilbert import (HilbertModule, ModuleElement, ModuleOperator, check_quasi_stable,
                      construct_isomorphism, direct_sum, inner, module_rank, omega)
from .morita import (K1_NOTE, InducedMap, induced_map_fredholm, multiplicity_matrix,
                     verify_functoriality, verify_morita_iso)

__version__ = "0.1.0"
