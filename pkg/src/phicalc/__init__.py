"""Workbench for the calculus of decorated objects.

Library surface: term construction and locator arithmetic (``terms``),
one-step reduction with strategies and graphs (``reduce``), parallel
reduction and the diamond machinery (``parallel``), the
term-actions-parents machine (``machine``), the lambda-with-records
target and translations (``lam``), concrete syntax and sugar
(``surface``), seeded generators (``gen``), and property suites
(``props``).
"""

import sys as _sys

# term operations recurse on term depth; give rewriting room to work
if _sys.getrecursionlimit() < 8000:
    _sys.setrecursionlimit(8000)

from .errors import (
    BadLabelError,
    DuplicateLabelError,
    LocatorRangeError,
    MachineError,
    NotAnObjectError,
    OpenTermError,
    ParseError,
    PhiError,
    UnresolvedAttributeError,
    UnsupportedConstructError,
    UnsupportedVariantError,
)
from .terms import (
    PHI,
    VOID,
    Access,
    App,
    Locator,
    ObjectTerm,
    Term,
    attrs,
    inc,
    increment,
    is_abstract,
    is_closed,
    max_free_locator,
    substitute,
    term_size,
)
from .reduce import (
    EvalOutcome,
    EvalStatus,
    Redex,
    ReductionGraph,
    RuleId,
    Strategy,
    evaluate,
    head_step,
    is_nf,
    is_whnf,
    joinable,
    normal_order_step,
    reduction_graph,
    step_all,
)
from .parallel import (
    check_diamond,
    complete_development,
    decompose_standard,
    is_internal_par,
    is_par_step,
    par_reducts,
)
from .machine import Configuration, RunResult, RunStatus, decode, inject, machine_step, run
from .lam import (
    LamTerm,
    ObsResult,
    ObsVerdict,
    lam_normalize,
    lam_pretty,
    lam_shift,
    lam_step,
    lam_substitute,
    lambda_to_phi,
    obs_equal,
    phi_to_lambda,
    pure_lambda_of_phi,
)
from .surface import erase_locators, parse, parse_term, pretty, resolve_locators

__all__ = [name for name in dir() if not name.startswith("_")]
