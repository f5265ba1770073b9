"""
structrl: regret minimization over structured policy families in tabular MDPs.
"""

__version__ = "1.0.0"
__description__ = "Policies-as-arms bandits (pUCB, pThompson), PSRL and warm-started PSRL on average-reward MDPs"
