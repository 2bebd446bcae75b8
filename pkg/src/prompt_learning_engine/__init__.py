"""
Prompt Learning Engine - learns discrete prompts for black-box text classifiers
from a few labelled examples and a bounded number of scoring API calls.
"""

__version__ = "1.0.0"
