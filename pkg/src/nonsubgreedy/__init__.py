"""Greedy maximization of monotone, not necessarily submodular, set functions.

Curvature measurement, clique-cover numbers, bound certificates and the
benefit-of-search objective for multi-agent search.
"""

from .bos import (BeliefState, BenefitOfSearch, CellModel, GridMap, SensorModel, anticipated_risk,
                  bayes_estimate, benefit, bos_oracle, cell_curvature_table, joint_objective, load_map,
                  sensor_likelihood, synthetic_map, update_beliefs)
from .bounds import BoundCertificate, bound_t1, bound_t2, brute_force_optimum, certify
from .curvature import (CurvatureEstimator, CurvatureReport, curvatures, generalized_curvature,
                        interchangeable_cell_curvature, inverse_generalized_curvature, total_curvature)
from .exceptions import (CapacityError, DegenerateBoundError, DegenerateEvidenceError, DomainError,
                         NonSubGreedyError, UncertifiableError, ValidationError)
from .graphs import CommGraph, enumerate_cliques, fractional_clique_cover, load_graph, neighbor_context
from .greedy import GreedyPlanner, GreedyTrace, greedy_full, greedy_limited
from .matroid import PartitionMatroid, enumerate_maximal, is_independent, matroid_axiom_check
from .setfn import GroundElement, SetFunctionOracle, TabularOracle, load_tabular, marginal

__version__ = "0.1.0"
