"""Matrix cocycles over subshifts of finite type.

A numpy library for computing with Holder (locally constant) matrix cocycles
over topologically mixing shift spaces: finite-time maximal Lyapunov
exponents and Oseledec spectra, exact Markov-measure integrals, Lyapunov
(Pesin) norms and regular sets, exponential shadowing of glued orbit
segments, Katok separated-set extraction, and the fractal gluing scheme that
certifies entropy lower bounds for Lyapunov-irregular behaviour at finite
depth.
"""

__version__ = "0.1.0"
