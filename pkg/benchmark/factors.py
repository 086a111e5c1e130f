"""Experimental factors of the simulation grid and their level domains."""

FACTORS = (
    "sample_size",
    "nodes",
    "graph_type",
    "connectivity",
    "relu_fraction",
    "w_upper",
    "scale",
)

# Factors that shape the base draw; sample size and scale only derive
# variants of it.
GENERATING_FACTORS = (
    "nodes",
    "graph_type",
    "connectivity",
    "relu_fraction",
    "w_upper",
)

FULL_DOMAINS = {
    "sample_size": (2500, 250),
    "nodes": (10, 20, 50, 100),
    "graph_type": ("ER", "SF"),
    "connectivity": (0.2, 0.3, 0.4),
    "relu_fraction": (0.0, 0.5, 0.7, 0.9),
    "w_upper": (1.0, 2.0, 3.0, 4.0),
    "scale": ("original", "standardized"),
}

DEFAULT_BASELINES = {
    "sample_size": 2500,
    "nodes": 10,
    "graph_type": "ER",
    "connectivity": 0.2,
    "relu_fraction": 0.0,
    "w_upper": 1.0,
    "scale": "original",
}
