"""Exact multisymplectic structures, covariant Poisson brackets and
classical r-matrix checks for 1+1 dimensional field theories."""

__version__ = "0.1.0"

from .scalar import (GQ, Scalar, JetVar, MultiIndex, Param, TrigAtom, Assignment,
                     jet, param, symbol, field_jet, sin_of, cos_of, total_derivative,
                     partial_jet, eval_rational, SingularEvaluation, UnboundGenerator)
from .forms import (Form, MultiVectorField, wedge, vertical_diff, horizontal_diff,
                    interior, prolonged_field, dx, dt, dvar)
from .variational import (Lagrangian, MultisymplecticData, euler_lagrange, boundary_form,
                          multisymplectic, quasisymmetry_check)
from .poisson import (is_hamiltonian, hamiltonian_vector_field, covariant_bracket,
                      single_time_brackets, splitting, energy_momentum,
                      hamilton_field_equations_check)
from .lax import (LaxPair, RMatrix, TensorObject, rational_r, trigonometric_sg_r,
                  verify_sklyanin, verify_single_time, verify_cybe, maurer_cartan,
                  zero_curvature_residual, on_shell_reduce, hamilton_equation_check)
