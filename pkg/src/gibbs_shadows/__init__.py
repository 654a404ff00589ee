"""Gibbs-state observable estimation from randomized measurements of
imaginary-time-evolved random stabilizer states, cross-checked against exact
dense oracles at desk scale (n <= 12)."""

__version__ = "0.1.0"

from .paulis import (  # noqa: F401
    PauliString,
    PauliSum,
    SpectralWindow,
    build_qbm,
    build_random_xyz,
    build_xxz,
    one_two_qubit_paulis,
    rescale,
    spectral_window,
)
from .states import (  # noqa: F401
    DensityOperator,
    HermitianEig,
    StateVector,
    apply_gate,
    eig_hermitian,
    mat_func,
    pauli_expectation,
)
from .clifford import (  # noqa: F401
    CliffordTableau,
    enumerate_group,
    sample_clifford,
    sample_pauli_basis,
    synthesize,
)
from .thermal import GibbsSnapshot, gibbs, purity_and_decay, tpq_failure_bound, tpq_moments  # noqa: F401
from .tpq import (  # noqa: F401
    BlockEncoding,
    ChebyshevPoly,
    TpqState,
    build_lcu,
    chebyshev_fit,
    prepare_exact,
    prepare_poly,
    success_probability,
)
from .shadows import (  # noqa: F401
    EstimatorPlan,
    ShadowRecord,
    collect_clifford,
    collect_pauli,
    estimate_clifford,
    estimate_pauli,
    median_of_means,
    mse_bound,
    plan_shadows,
)
