"""Minimum identifying codes on graphs.

Exact solvers (parallel brute force over unranked subsets, monotone-CNF
branch and bound), an Ising-model compilation with shared OR gadgets solved
by simulated annealing, Chimera-topology minor embedding with gauge
transformations, and alternative IP / energy formulations.
"""

from .graph import (CapacityError, Graph, GraphError, bits_to_list, debruijn,
                    list_to_bits, modified_adjacency, read_graph, write_graph)
from .idcode import (INFEASIBLE, SearchResult, Verdict, code_vertices,
                     default_workers, detect_twins, is_identifying,
                     lex_unrank, min_code_bruteforce, rev_door_unrank)
from .cnf import (BlockingClause, CaseSplit, Cnf, InfeasibleError,
                  assign_true, blocking_clause, build_formula, case_split,
                  choose_pivots, compiled_size, export_dimacs, export_smtlib,
                  format_dimacs, format_smtlib, parse_dimacs,
                  shared_ancilla_count, simplify)
from .exact import (BnbConfig, BnbResult, min_hitting_set,
                    packing_lower_bound, solve_with_case_split)
from .ising import (AnnealResult, GadgetSpec, IsingModel, compile_cnf,
                    decode, energy, exact_ground_states, format_model,
                    gadget, parse_model, read_model, simulated_annealing,
                    write_model)
from .chimera import (ChimeraGraph, EmbedVerdict, checkerboard_gauge,
                      embed_model, gauge_transform, heuristic_embed,
                      read_embedding, unembed, verify_embedding,
                      write_embedding)
from .altmodels import (IpModel, build_ip, eval_energy, export_lp, format_lp,
                        slack_budget)

__version__ = "0.1.0"
