"""Rate calculus: counterfunctions, functionals and the concrete bounds."""

from .conditional import EtaFamily, eta_family, halpern_transfer, mu_meta3, mu_tilde, omega_eta, zeta
from .counterfunctions import Counterfunction, affine, constant, doubling, identity, majorize
from .errors import meta_with_errors, rho_error
from .functionals import RateFunctional, combine_meta, combine_meta_bar, parity_merge
from .improved import CaseTower, case_tower, mu_meta4, tau, vartheta
from .xu import rho1, rho2, sigma1, sigma2
