"""Meta-learned initialization for variational quantum circuits.

Submodules: ``hamiltonian`` (Pauli operators and exact solvers),
``circuits``/``simulator`` (ansatz families and statevector execution),
``learner`` (the classical network emitting circuit parameters),
``taskspace`` (task vectors, sampling, distances), ``meta`` (pre-training,
adaptation, baselines, diagnostics), ``embed`` (distribution-matching
application), ``cli`` (command-line front end).
"""

from .backend import active_backend

__version__ = "0.1.0"

__all__ = ["active_backend", "__version__"]
