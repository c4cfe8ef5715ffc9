"""Built-in experiment presets, one per reproduced figure."""

from __future__ import annotations

from importlib import resources

from .experiments import ConfigError, ExperimentConfig, loads_config

_CATALOG = {
    "fig2a": "G2(tau) triangle: constant-dwell phase noise, one arm, classical detection",
    "fig2b": "G2(tau): truncated-exponential dwell phase noise, both arms, classical detection",
    "fig2c": "G2(tau) triangle in the photon counting regime (split-stream coincidences)",
    "fig2d": "G2(tau), exponential dwell both arms, photon counting regime",
    "fig3a": "PND of the unmodulated source: Poisson, mean 42 per 450 us bin",
    "fig3b": "tailored thermal PNDs (nbar = 1.91, 3.85, 5.67) with G2 inset",
    "fig3c": "tailored non-Gaussian zeta-state PNDs (nbar = 2.60, 4.88, 7.41)",
    "fig4": "photon-added P functions (thermal and zeta states), with negativity",
    "fig5": "Mandel Q of photon-added states vs mean photon number",
    "entanglement_scan": "beamsplitter entanglement criterion map over (nbar, mu)",
}


def available() -> dict[str, str]:
    """Preset names with one-line descriptions."""
    return dict(_CATALOG)


def load(name: str) -> ExperimentConfig:
    """Load a built-in preset by name."""
    if name not in _CATALOG:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(_CATALOG))}"
        )
    text = resources.files(__package__).joinpath(
        "presets", f"{name}.toml").read_text()
    return loads_config(text)
