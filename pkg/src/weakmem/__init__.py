"""Workbench for declarative weak memory models.

Litmus programs are enumerated into execution graphs, graphs are checked
against axiomatic consistency predicates (IMM, IMM_SC, RC11, x86-TSO,
ARMv8), and the event-structure side builds Weakestmo structures whose
extracted executions can be compared against the graph-level verdicts.
The simulation module replays a traversal of a consistent graph while
growing an event structure under a 12-clause invariant.
"""

__version__ = "0.1.0"
