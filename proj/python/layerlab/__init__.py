from ._core import (
    ConfigError,
    LayerlabError,
    circle,
    config_hash,
    evolve_curve,
    evolve_radial,
    extract_level_set,
    hausdorff,
    mobility_constant,
    profile,
    run,
    serialize_config,
    simulate,
    t_eps,
)

__all__ = [
    "ConfigError",
    "LayerlabError",
    "circle",
    "config_hash",
    "evolve_curve",
    "evolve_radial",
    "extract_level_set",
    "hausdorff",
    "mobility_constant",
    "profile",
    "run",
    "serialize_config",
    "simulate",
    "t_eps",
]
