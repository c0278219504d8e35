"""Both sides of the Poisson-Newton formula for Dirichlet series, and checks of their equality."""
__version__ = "0.1.0"

from .series import (DirichletSeries, FrequencyAtom, LogExpansion, abscissa, atom_measure,
                     detect_functional_equation, evaluate, is_real_analytic, log_derivative,
                     log_expansion)
from .divisor import (Divisor, Rectangle, c0_shift, count_zeros, discrepancy_c0, locate_divisor,
                      structure_at_zero)
from .transforms import PairingResult, TestFunction, atom_pairing, delta_zero_terms, divisor_pairing
from .number_theory import (ExplicitFormulaReport, PrimeTable, ZeroTable, c0_chi0, digamma,
                            explicit_formula_check, load_zeta_zeros, sieve_primes, w0_remainder,
                            weil_psi)
from .verifier import (VerificationReport, verify_classical_poisson, verify_explicit_formula,
                       verify_newton_identities, verify_poisson_newton, verify_selberg)
