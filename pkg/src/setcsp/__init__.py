"""Set constraint satisfaction over the powerset of the natural numbers."""

from .config import CapExceeded, Limits
from .formula import ClausalFormula, CspInstance, RelationDef, classify_horn, normalize_clause_set, substitute, to_clausal
from .gadgets import Cnf3, extract_boolean_model, gadget_from_3sat, lift_boolean_model
from .inner_res import entails_clause, inner_res
from .membership import check_membership, finite_e, finite_i, search_ei_counterexample
from .oracle import BlockModel, MintermPattern, eval_block_model, oracle_entails, oracle_equiv, oracle_sat
from .outer_res import NotHornHorn, outer_res, replay_trace, solve_instance
from .parser import ParseError, parse_clausal, parse_formula, parse_instance, render
from .reduction import NotInEI, inner_hornify, reduce_language, reduce_relation, strongly_reduce

