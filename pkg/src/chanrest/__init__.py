"""Channel restrictions for asynchronous message passing.

Deciders for half-duplex communication, existential boundedness and
k-synchronisability over message sequence charts, lifted to HMSCs, checked
for global types through their HMSC embedding, and monitored on
communicating state machines by bounded exploration.
"""

from .errors import (ChanrestError, DisabledActionError, InvalidMscError, NotCompliantError,
                     ParseError, ResourceLimitError, ValidationError)
from .events import (Event, Kind, SyncEvent, Trace, format_trace, in_flight, is_channel_compliant,
                     is_complete, matching, parse_event, parse_sync_event, parse_trace, project, trace)
from .msc import PrefixMsc, concat, message, msc_of, project_to_csm, satisfies_causal_delivery
from .restrictions import (Classification, bounded_linearization, classify, half_duplex_violation,
                           is_B_bounded_trace, is_existentially_B_bounded, is_half_duplex_msc,
                           is_half_duplex_trace, is_k_synchronous, k_exchange_decomposition,
                           least_existential_bound, least_k)
from .fsm import Fsm, WeakBisimWitness, bounded_language, expand, find_weak_bisimulation
from .hmsc import Hmsc, Membership, hmsc_member
from .mst import (build_sync_automaton, embed_hmsc, is_one_hmsc, parse_global_type, qopt,
                  type_automaton)
from .indist import SwapRule, are_indistinguishable, closure, swap_neighbors
from .csm import (Configuration, Csm, Verdict, bounded_equiv, classify_csm, explore,
                  maximal_traces, monitor_bound, monitor_half_duplex, monitor_k_sync)

__version__ = "0.1.0"
