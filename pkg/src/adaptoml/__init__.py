"""Adaptive AutoML engine for tabular data.

Automated imputation, feature engineering, exhaustive grid search over a
from-scratch model zoo, per-user model adaptation via incremental learning,
and CSV/SVG report emission — driven by a CLI, an HTTP job service, or a
browser UI.
"""

__version__ = "0.1.0"
