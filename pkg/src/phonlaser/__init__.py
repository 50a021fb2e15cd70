"""Sub-Poissonian phonon lasing in a three-mode optomechanical system.

A two-optical-mode cavity (modes a, b) parametrically coupled to a mechanical
oscillator (mode c) acts as a phonon laser whose limit cycle can show
number fluctuations below the coherent-state level.  The package provides

* closed-form semiclassical theory of the limit cycle (:mod:`~phonlaser.analytics`),
* truncated Fock-space operator algebra (:mod:`~phonlaser.hilbert`),
* Lindblad models in the lab or displaced frame (:mod:`~phonlaser.model`),
* sparse steady states and quantum-jump trajectory ensembles (:mod:`~phonlaser.solvers`),
* phonon counting statistics and Wigner-function negativity (:mod:`~phonlaser.observables`),
* a small CLI that writes sweep/figure data as CSV or JSON (:mod:`~phonlaser.cli`).

Rates are expressed in units of the optical linewidth kappa unless a function
says otherwise; SI conversions are confined to the drive/thermal helpers and
config ingestion.
"""

__version__ = "0.1.0"
