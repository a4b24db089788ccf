"""Effect identification for multi-stage interventions in causal diagrams with hidden confounders."""

__version__ = "0.1.0"
