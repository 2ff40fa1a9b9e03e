"""Combinatorics of Mumford-type Riemann existence theorems.

Graphs of finite groups with cusps, branch-point counts, certification of
ramification data, and explicit *-tree realizations of finite groups.
"""

from .errors import (InadmissibleError, InconsistencyError, MumfordRetError, PreconditionError, ResourceError,
                     StructuralError, ValidationError)
from .permgroup import (ConjClass, FiniteGroup, Perm, Pgl2Class, classify_pgl2_finite, closure,
                        conjugacy_classes, generates, hom_count)
from .presentation import AbelianInvariants, Presentation, abelianization
from .gog import (Cusp, Edge, GraphOfGroups, Signature, Vertex, contract, fundamental_presentation, graph_genus,
                  is_stable, is_type_am, signature_of, slide, stabilize, validate)
from .branch import (BranchCount, BranchLocus, branch_count, branch_pushout, hurwitz_dimension,
                     regular_local_contribution, regular_tree_branch_count, riemann_hurwitz_genus)
from .ret import (MumfordWitness, RamificationDatum, TriangleFlag, exists_genus_g_system, hm_condition,
                  hm_implies_mumford, is_genus_g_system, mumford_schwarz_check, mumford_type_witness,
                  type_am_criterion, virtual_mumford_type)
from .construct import (AmalgamificationResult, CoverSpec, add_genus_edges, amalgamify, harbater_paste, realize,
                        realize_full_aut, star_tree_for_cyclic, subdivide_segment)

__version__ = "0.1.0"
