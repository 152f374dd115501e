"""Configuration settings for the application."""
import math
import os
from typing import Optional

from dotenv import load_dotenv

from curverad.errors import InvalidArgumentError

load_dotenv()

# Environment variables
THREADS_ENV_VAR = "CURVERAD_THREADS"
LOG_LEVEL_ENV_VAR = "CURVERAD_LOG_LEVEL"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

# Torus quadrature defaults
QUADRATURE_CONFIG = {
    "initial_grid": 64,
    "max_grid": 8192,
    "rel_tol": 1e-10,
    "threads": 1,
    "block_rows": 64,
    "near_diagonal_switch": 2 * math.pi * 1e-3,
    "simple_samples": 256,
    "simple_threshold": 1e-6,
}

# Curve construction and transform checks
GEOMETRY_CONFIG = {
    "clearance": 1e-9,
    "clearance_samples": 1024,
    "orthogonality_tol": 1e-12,
    "check_simple_samples": 64,
    "diameter_samples": 256,
    "self_approach_candidates": 8,
    "self_approach_min_steps": 3,
}

# Local intersection study
INTERSECTION_CONFIG = {
    "gauss_order": 24,
    "panel_width": 0.5,
    "max_nodes": 200_000,
    "theta_nodes": 512,
    "radial_octaves_below": 3,
}

# Invariance harness
INVARIANCE_CONFIG = {
    "tolerance": 1e-8,
    "i_integral_grid": 256,
    "i_integral_rel_tol": 1e-8,
}

# Emitted JSON/CSV
OUTPUT_CONFIG = {
    "significant_digits": 15,
}

# Shared flags for every sub-command that runs the quadrature engine
COMMON_PARAMETERS = {
    "grid": {"type": "integer", "description": "Initial grid points per axis",
             "default": QUADRATURE_CONFIG["initial_grid"]},
    "max_grid": {"type": "integer", "description": "Largest grid tried before giving up",
                 "default": QUADRATURE_CONFIG["max_grid"]},
    "tol": {"type": "number", "description": "Relative tolerance between grid doublings",
            "default": QUADRATURE_CONFIG["rel_tol"]},
    "threads": {"type": "integer", "description": f"Worker threads (falls back to {THREADS_ENV_VAR})"},
    "output": {"type": "string", "description": "Write the result to this path instead of stdout"},
}

# Available sub-commands
COMMANDS = {
    "command_declarations": [
        {
            "name": "compute",
            "description": "Compute n_C for one curve",
            "parameters": {
                "type": "object",
                "properties": {
                    "curve": {"type": "string", "description": "Curve spec: JSON file path or inline JSON"},
                },
                "required": ["curve"],
            },
            "quadrature": True,
        },
        {
            "name": "sweep-ellipse",
            "description": "Compare numeric and closed-form n over a range of axis ratios",
            "parameters": {
                "type": "object",
                "properties": {
                    "xi_min": {"type": "number", "description": "Smallest axis ratio", "default": 0.2},
                    "xi_max": {"type": "number", "description": "Largest axis ratio", "default": 1.0},
                    "steps": {"type": "integer", "description": "Number of ratios", "default": 9},
                },
                "required": [],
            },
            "quadrature": True,
        },
        {
            "name": "invariance",
            "description": "Check that n is unchanged under a transform",
            "parameters": {
                "type": "object",
                "properties": {
                    "curve": {"type": "string", "description": "Curve spec: JSON file path or inline JSON"},
                    "transform": {"type": "string",
                                  "description": "Transform op(s) as JSON, e.g. '{\"invert\": {\"center\": [0, 0]}}'"},
                    "pass_tol": {"type": "number", "description": "Relative deviation allowed for a pass",
                                 "default": INVARIANCE_CONFIG["tolerance"]},
                },
                "required": ["curve", "transform"],
            },
            "quadrature": True,
        },
        {
            "name": "intersection",
            "description": "Sweep the local two-line-piece contribution as the gap closes",
            "parameters": {
                "type": "object",
                "properties": {
                    "phi": {"type": "number", "description": "Angle between the tangents (radians)"},
                    "mu_min": {"type": "number", "description": "Smallest gap ratio", "default": 1e-4},
                    "mu_max": {"type": "number", "description": "Largest gap ratio", "default": 1e-1},
                    "steps": {"type": "integer", "description": "Geometrically spaced ratios", "default": 13},
                    "output": COMMON_PARAMETERS["output"],
                },
                "required": ["phi"],
            },
            "quadrature": False,
        },
        {
            "name": "check-simple",
            "description": "Report the worst chord/parameter-distance ratio of a curve",
            "parameters": {
                "type": "object",
                "properties": {
                    "curve": {"type": "string", "description": "Curve spec: JSON file path or inline JSON"},
                    "samples": {"type": "integer", "description": "Parameter samples per axis",
                                "default": GEOMETRY_CONFIG["check_simple_samples"]},
                    "threshold": {"type": "number", "description": "Smallest ratio/diameter accepted as simple",
                                  "default": QUADRATURE_CONFIG["simple_threshold"]},
                    "output": COMMON_PARAMETERS["output"],
                },
                "required": ["curve"],
            },
            "quadrature": False,
        },
    ]
}


def resolve_threads(cli_value: Optional[int] = None) -> int:
    """Pick the worker count: --threads, then CURVERAD_THREADS, then the default."""
    if cli_value is not None:
        threads = cli_value
    else:
        raw = os.getenv(THREADS_ENV_VAR)
        if raw is None or not raw.strip():
            return QUADRATURE_CONFIG["threads"]
        try:
            threads = int(raw)
        except ValueError:
            raise InvalidArgumentError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}")
    if threads < 1:
        raise InvalidArgumentError(f"threads must be >= 1, got {threads}")
    return threads


def resolve_log_level(verbose: int = 0) -> str:
    """Log level from -v flags, falling back to CURVERAD_LOG_LEVEL."""
    if verbose >= 2:
        return "DEBUG"
    if verbose == 1:
        return "INFO"
    level = (os.getenv(LOG_LEVEL_ENV_VAR) or "WARNING").strip().upper()
    if level not in LOG_LEVELS:
        raise InvalidArgumentError(f"{LOG_LEVEL_ENV_VAR} must be one of {', '.join(LOG_LEVELS)}, got {level!r}")
    return level
