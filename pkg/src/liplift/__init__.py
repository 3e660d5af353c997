"""Lipschitz and Lipschitz-free norms, De Leeuw embeddings and operator
liftings on finite pointed metric spaces."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .free_space import (
    FreeVector,
    MoleculeDecomposition,
    dirac,
    duality_gap,
    free_norm,
    free_norm_witness,
    molecule,
    optimal_representation,
    pairing,
)
from .lifting import (
    LiftingMatrix,
    LipOperator,
    adjoint_molecule,
    build_lifting,
    composition_lifting,
    composition_operator,
    continuity_modulus_check,
    lifting_norm,
    operator_norm,
    operator_norm_witness,
    verify_commutation,
)
from .lipschitz import (
    DeLeeuwMatrix,
    LipschitzFunction,
    apply_de_leeuw,
    composition_function_map,
    de_leeuw_matrix,
    function_from,
    lip_norm,
)
from .lp_core import LinearProgram, LpSolution, Status, max_linear, min_l1, solve_lp
from .metric_space import PairSet, PointedMetricSpace, gen_ultrametric_cube, new_space, pair_set
