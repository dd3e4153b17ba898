"""bsl: a desk-scale spectral laboratory for weighted analytic spaces.

Computes spectra of Toeplitz operators on standard Bergman and Fock
spaces, singular values of composition operators on the H_alpha scale,
Berezin transforms, dyadic cell statistics of positive measures, harmonic
measure by walk-on-spheres, and the two-sided rate verdicts tying them
together.  Submodules: spaces, lattice, measures, toeplitz, berezin,
asymptotics, composition, harmonic, cli.
"""

__version__ = "0.1.0"
