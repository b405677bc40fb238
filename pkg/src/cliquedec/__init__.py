"""cliquedec: desk-scale surface-code decode triage simulation.

Rotated-lattice geometry, a lightweight local triage decoder with an exact
matching fallback, phenomenological-noise Monte Carlo (coverage and logical
error rates), off-chip bandwidth provisioning with stall modeling, sparse
syndrome-compression accounting, and an SFQ gate-level cost model.
"""

__version__ = "0.1.0"
