"""Weak measurements on multipartite entangled qubits.

Analytic laws of the pointer mean, frame-dependent state update and
Metropolis-Hastings sampling of the N pointer positions.
"""
from .errors import (
    ConfigError,
    InitOnNode,
    InvalidChainState,
    LengthMismatch,
    NearOrthogonalPostSelection,
    NodeSample,
    UndefinedPosterior,
    WeakMeasError,
    ZeroNorm,
)
from .pointer import (
    DEFAULT_SHAPE,
    EnsembleBranch,
    EnsembleSuperposition,
    PointerShape,
    SignedLog,
    XiMixture,
    combine_mixtures,
    ensemble_overlap,
    log_density,
    single_overlap,
    xi_density,
    xi_mixture,
    xi_moments,
)
from .qubit import (
    MINUS,
    MINUS_X,
    PLUS,
    PLUS_X,
    SIGMA_X,
    SIGMA_Z,
    X_BASIS,
    Z_BASIS,
    Observable,
    QubitState,
    SpinBasis,
    basis_from_angle,
    born_probabilities,
    inner,
    pointer_shift,
    weak_value,
)
from .sampler import (
    ChainState,
    MHConfig,
    SampleRecord,
    accept_prob,
    available_backends,
    default_sigma,
    one_shot,
    propose,
    run_chain,
    run_chains,
)
from .scenario import (
    BipartiteScenario,
    FrameRPrimeState,
    OutcomeBranch,
    ScenarioConfig,
    frame_Rprime_state,
    outcome_weighted_mixture,
    pointer_after_single_wm,
    posterior_given_xi,
    qubitB_given_sample,
    unconditional_xi_density,
    update_after_B,
    update_single_after_B,
)

__version__ = "0.1.0"
