"""Regular expressions with interleaving, communication and encapsulation,
interpreted as finite automata, with expressibility analyses and the
finite-automaton encoding."""

from .analysis import (
    ExitTransition,
    PropertyReport,
    SccDecomposition,
    UnsupportedExpression,
    Witness,
    alive_exit_states,
    check_bpa_property,
    check_pa_property,
    exit_equivalent,
    exit_transitions,
    generate_random_expression,
    normed_exit_transitions,
    normed_states,
    oc_measure,
    scc_decompose,
)
from .encoding import (
    ControlAlphabet,
    EncodingResult,
    InvalidAutomaton,
    encode_fa,
    encoding_manifest,
    verify_encoding,
)
from .equivalence import (
    BisimResult,
    IsoResult,
    bisimilar,
    check_bisimulation,
    isomorphic,
    minimize,
)
from .semantics import (
    DEFAULT_MAX_STATES,
    Automaton,
    AutomatonFormatError,
    StateLimitExceeded,
    Transition,
    automaton_from_json,
    automaton_to_dot,
    automaton_to_json,
    derive_automaton,
    state_expressions,
    step,
    terminates,
)
from .syntax import (
    DEADLOCK,
    EMPTY,
    EMPTY_COMM,
    Act,
    Action,
    Alt,
    CommFn,
    CommFnError,
    CommValidation,
    Deadlock,
    Empty,
    Encap,
    Expression,
    Par,
    ParseError,
    Seq,
    Star,
    Theory,
    act,
    classify_theory,
    dump_comm_fn,
    load_comm_fn,
    parse_expression,
    render_expression,
    subterms,
    validate_comm_fn,
)
