"""Noisy population recovery toolkit (bindings over the C++ core)."""

from ._popre import (  # noqa: F401
    apply_noise,
    channel_matrix,
    construct_repeated_root_poly,
    estimate_point_mass,
    eta_exact,
    fit_power_law,
    max_dimension,
    push_forward,
    recover_distribution,
    required_samples,
    sup_on_region,
    theory_bounds,
)

__all__ = [
    "apply_noise",
    "channel_matrix",
    "construct_repeated_root_poly",
    "estimate_point_mass",
    "eta_exact",
    "fit_power_law",
    "max_dimension",
    "push_forward",
    "recover_distribution",
    "required_samples",
    "sup_on_region",
    "theory_bounds",
]
