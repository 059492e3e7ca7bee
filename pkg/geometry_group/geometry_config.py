"""
geometry_config.py - Tolerance profiles for the SO(3) geometry toolkit (v1.0.0)

Profiles are JSON files under configs/ merged over DEFAULT_PROFILE.
Environment:
- SRSO3_TOL         profile name (configs/<name>.json) or path to a JSON profile
- SRSO3_SOLVER_TOL  numeric override for solver.tol
- SRSO3_LOG_DIR     override for logging.log_dir
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

__version__ = "1.0.0"

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

DEFAULT_PROFILE: Dict[str, Any] = {
    "profile": "default",
    "core": {
        "rotation_tol": 1e-12,
        "validate_tol": 1e-8,
        "log_pi_switch": 1e-6,
        "taylor_switch": 1e-4
    },
    "geodesic": {
        "ode_step": 1e-3
    },
    "cut": {
        "bisection_iterations": 100,
        "so2_tol": 1e-10
    },
    "solver": {
        "tol": 1e-9,
        "xi_grid": 192,
        "tau_grid": 96,
        "candidates": 8,
        "max_nfev": 200,
        "fallback_phi_grid": 24,
        "fallback_xi_grid": 64,
        "fallback_tau_grid": 32,
        "tau_log_grid": 24,
        "tau_log_min": 1e-8,
        "small_angle": 0.1,
        "near_fiber": 1e-2,
        "near_fiber_phi": 16
    },
    "oracle": {
        "segments": 16,
        "budget": 200,
        "seed": 0,
        "mismatch_tol": 1e-6
    },
    "check": {
        "core_samples": 10000,
        "geodesic_samples": 10000,
        "ode_samples": 100,
        "gauss_bonnet_betas": 20,
        "boundary_samples": 10000,
        "curvature_samples": 1000,
        "conjugate_grid": 1000,
        "double_cover_samples": 100,
        "monotonic_grid": 1000,
        "diameter_grid": 10000,
        "roundtrip_samples": 1000,
        "oracle_targets": 20,
        "transport_segments": 10,
        "transport_samples": 1000,
        "no_shorter_samples": 100
    },
    "logging": {
        "level": "INFO",
        "console_logging": True,
        "file_logging": False,
        "log_dir": "logs/verify"
    }
}


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class GeometryConfig:
    """Tolerance profile with dot-notation access"""

    def __init__(self, profile: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None):
        self.logger = logging.getLogger('geometry_config')
        self.profile_name = profile or os.getenv("SRSO3_TOL") or "default"
        self.config = self._load_config(self.profile_name)
        if overrides:
            self.config = _deep_merge(self.config, overrides)
        self._validate_config()

    def _resolve_profile_path(self, profile: str) -> Optional[Path]:
        candidate = Path(profile)
        if candidate.suffix == ".json" and candidate.exists():
            return candidate
        named = CONFIG_DIR / f"{profile}.json"
        if named.exists():
            return named
        return None

    def _load_config(self, profile: str) -> Dict[str, Any]:
        config = copy.deepcopy(DEFAULT_PROFILE)
        path = self._resolve_profile_path(profile)
        if path is not None:
            with open(path, 'r', encoding='utf-8') as f:
                config = _deep_merge(config, json.load(f))
            self.logger.debug(f"Loaded tolerance profile {path}")
        elif profile != "default":
            raise ValueError(f"Unknown tolerance profile: {profile}")

        solver_tol = os.getenv("SRSO3_SOLVER_TOL")
        if solver_tol:
            config["solver"]["tol"] = float(solver_tol)
        log_dir = os.getenv("SRSO3_LOG_DIR")
        if log_dir:
            config["logging"]["log_dir"] = log_dir
        return config

    def _validate_config(self):
        errors = []
        for key in ("core.rotation_tol", "core.validate_tol", "solver.tol", "oracle.mismatch_tol"):
            value = self.get(key)
            if not isinstance(value, (int, float)) or value <= 0:
                errors.append(f"{key} must be a positive number (got {value!r})")
        segments = self.get("oracle.segments")
        if not 4 <= int(segments) <= 32:
            errors.append(f"oracle.segments must lie in [4, 32] (got {segments})")
        if errors:
            raise ValueError("Invalid tolerance profile: " + "; ".join(errors))

    def get(self, key: str, default=None):
        """Get config value with dot notation"""
        value = self.config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def as_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.config)
