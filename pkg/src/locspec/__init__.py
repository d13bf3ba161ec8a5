"""locspec: spectra of time-frequency localization operators.

Hermite functions and Hagedorn wavepackets, grid and closed-form phase-space
transforms (STFT, Wigner, Cohen's class, Weyl pairing, Fourier-Wigner), and
the eigenvalues of (mixed-state) localization operators computed two
independent ways: Laguerre-type eigenvalue integrals over Reinhardt shadows
in absolute space, and dense operator-matrix assembly plus diagonalization.
Every double-orthogonality statement behind those spectra is executable.
"""

__version__ = "0.1.0"

from .specfun import (hermite, hermite_product, laguerre, laguerre_direct,
                      laguerre_rescale, complex_hermite)
from .symplectic import (LagrangianFrame, SymplecticMatrix, CovarianceMatrix,
                         validate_frame, frame_to_symplectic, symplectic_to_frame,
                         williamson, gaussian_admissible, thermal_covariance)
from .hagedorn import (Wavepacket, gaussian_ground, polynomial_prefactor,
                       wavepacket_eval, ladder_lower, hermite_frame,
                       zero_diagonal_frame)
from .grids import PhaseGrid, GridFunction, default_grid
from .phasespace import (stft, wigner, hermite_stft_closed, hermite_wigner_closed,
                         hagedorn_stft_closed, hagedorn_wigner_closed,
                         cohen_class, weyl_matrix_element, fourier_wigner,
                         heat_convolution_closed, spectrogram_point)
from .reinhardt import (ShadowRegion, MaskSpec, shadow_of, lift_membership,
                        shadow_quadrature, polyradial_check, mask_from_shadow,
                        complement_mask, fubini_study_mask, full_mask,
                        square_mask, table_mask)
from .eigenvalues import (EigenvalueTable, eig_disc, eig_reinhardt, eig_weighted,
                          eig_mixed, eig_gaussian, indices_upto)
from .opmatrix import (OperatorMatrix, assemble_localization, assemble_mixed,
                       diagonalize, verify_double_orthogonality, state_matrix)
