"""Fundamental analyses: hierarchy, CFGs, def-use, def chains, guards, process dependences, constants."""

from .cfg import ENTRY, EXIT, BranchInfo, Cfg, GuardMap, analyze_branches, analyze_reaching_guards, build_cfgs
from .constprop import ConstMap, analyze_const_prop, check_fixpoint, index_may_exceed
from .defuse import DefChain, DefUse, Flow, StmtRef, analyze_def_use, build_def_chain
from .hierarchy import Hierarchy, HierarchyError, ProcId, SigInfo, analyze_hierarchy, qualify
from .procdep import ProcDepGraph, build_proc_dep_graph, proc_label

__all__ = [
    "ENTRY", "EXIT", "BranchInfo", "Cfg", "ConstMap", "DefChain", "DefUse", "Flow", "GuardMap",
    "Hierarchy", "HierarchyError", "ProcDepGraph", "ProcId", "SigInfo", "StmtRef",
    "analyze_branches", "analyze_const_prop", "analyze_def_use", "analyze_hierarchy",
    "analyze_reaching_guards", "build_cfgs", "build_def_chain", "build_proc_dep_graph",
    "check_fixpoint", "index_may_exceed", "proc_label", "qualify",
]
