"""Hutchinson-operator computations for non-hyperbolic iterated function systems.

Compact sets live on uniform grids (:mod:`ifskit.sets`), maps and systems in
:mod:`ifskit.maps`, the operator ``B`` in :mod:`ifskit.hutchinson`, symbolic
coding in :mod:`ifskit.symbolic`, attractor checks in
:mod:`ifskit.attractors`, the chaos game in :mod:`ifskit.chaos` and the
worked examples in :mod:`ifskit.corpus`.
"""
from .errors import (ConfigError, DomainError, EmptySetError, HypothesisUnmetError, IFSError,
                     IncompatibleGridError, NoCertificateError, NotNestedError, PreconditionError,
                     StreamExhaustedError)
from .sets import (Box, BoxDomain, ConvergenceReport, Grid, GridSet, Status, dilate, hausdorff,
                   make_grid, nested_limit, one_sided, point_set_distance)
from .maps import (Affine, Composite, IFSystem, PiecewiseLinear1D, Quadratic1D, eval_map,
                   image_of_gridset, interval_image, lipschitz_bound)
from .hutchinson import a_star, bh_apply, bh_iterate, fixed_point_record, max_fixed_point
from .symbolic import (CertifiedTargetPoint, Disjunctive, Explicit, Periodic, Random, Word,
                       certify_weak_hyperbolic, coding_composition_image, coding_point,
                       disjunctive_prefix, semifractal_approx, target_sample)
from .attractors import (check_conley, check_global_equivalences, check_lemma_dista,
                         check_sf_attraction, check_sf_minimum, check_stability)
from .chaos import OrbitRecord, chaos_orbit, tail_set, verify_chaos_game
from .corpus import load_example, verify_example_conditions
from .config import RunConfig, parse_config

__version__ = "0.1.0"
