"""Executable representation theorems for path-independent choice rules.

Rules and utility tables live on a universe of at most 20 contracts and are
stored as full tables indexed by subset bitmasks. The package decides choice
rule properties (path independence, substitutes, IRC, LAD), set-function
properties (ordinal concavity and its variants, M-natural concavity,
submodularity), builds an ordinally concave utility rationalizing any
path-independent rule, and runs the harnesses that check the equivalences
between the two sides.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ChoiceRule,
    Check,
    UtilityTable,
    Universe,
    Witness,
    parse_rule,
    parse_utility,
    serialize_rule,
    serialize_utility,
)
from .concavity import (  # noqa: E402
    induce_choice,
    is_mnatural_concave,
    is_ordinally_concave,
    is_ordinally_concave_plus,
    is_rationalizable,
    is_size_restricted_concave,
    is_submodular,
    rationalizes,
    satisfies_size_exchange,
)
from .represent import alpha_weights, construct, e_sequence, proof_trace, represent  # noqa: E402
from .rules import (  # noqa: E402
    is_path_independent,
    satisfies_irc,
    satisfies_lad,
    satisfies_substitutes,
)
