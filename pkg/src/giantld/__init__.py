"""Large-deviation rates for the giant component of G(n, alpha/n).

Submodules: rate_core (closed forms), saddle (tree generating polynomial),
exact_oracle (finite-n recursions and brute force), sampler (Monte Carlo)
and cli.
"""

__version__ = "0.1.0"
