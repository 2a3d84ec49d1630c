"""Band edges and eigenstates of quasi-exactly solvable elliptic potentials."""
from qesband._kernels import BACKEND
from qesband.bdpoly import (AlgebraizationCase, CriticalPolynomialBundle, critical_polynomial,
                            hatted_coefficients, raw_sequence, recursion_coefficients,
                            recursion_from_hatted)
from qesband.elliptic import JacobiTriple, Modulus, amplitude, complete_K, jacobi
from qesband.errors import (ConvergenceFailure, CriticalPoint, DependentPair, GridTooCoarse,
                            InvalidModulus, NonRealAssembly, NumericalPole, QESError,
                            RestrictionViolated, RootCountMismatch, SingularPoint,
                            ValidationError, ZeroDenominator)
from qesband.liealg import assemble_hamiltonian, generators
from qesband.potentials import (AssociatedLame, CotFamily, GenericQuartic, PotentialSpec,
                                TanFamily, associated_lame, canonicalize, classify,
                                eval_generic, eval_potential, pqrs)
from qesband.spectra import BandEdgeSpectrum, solve_case, solve_spec

__version__ = "0.1.0"
