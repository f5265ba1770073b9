"""
JSON-returning experiment tools
"""

from .experiment_tools import *
