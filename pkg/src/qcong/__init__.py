"""Exact verification of truncated multi-sum q-congruences.

Modules, bottom up: ``exact_arith`` (rationals, p-adic helpers), ``poly_q``
(polynomials in q, cyclotomics), ``laurent_x`` (the x-variable, fractions
and the congruence checker), ``convolution_engine`` (N-fold convolution and
its factorization identities), ``qseries_terms`` (the five term families),
``padic_verifier`` (classical corollaries mod p^3) and ``cli``.
"""

__version__ = "0.1.0"
