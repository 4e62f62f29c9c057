"""Desk-scale constructions and verifiers for two-color Poisson matchings."""

from .geometry import (Disk, Domain, Point, Rect, Segment,
                       DegenerateGeometryError, edge_crosses_region,
                       is_parallel_free, segments_intersect)
from .sampling import ColoredPointSet, SampleConfig, count_diff, derived_rng, sample
from .assignment import (Matching, brute_force_min, improvable_pair,
                         max_cardinality_min_cost, min_cost_all_blue,
                         min_cost_perfect)
from .walks import (ArcSpec, CrossingProfile, StepWalk, build_walk,
                    crossing_profile, cut_time_matching, excursion_matching,
                    laminate_strips, minimality_certificate_d1,
                    one_color_pairing, polygonal_arcs, zero_block_matching)
from .hierarchy import (Block, BlockSystem, build_block_system, heir_frequency,
                        heir_of, run_hierarchical)
from .verify import (ChernoffParams, StatsReport, VerificationReport,
                     box_rematch_experiment, check_arc_disjointness,
                     check_planarity, chernoff_bound, chernoff_mc,
                     crossing_stats, estimate_eta)

__version__ = "0.1.0"
