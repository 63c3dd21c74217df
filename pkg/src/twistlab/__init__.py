"""Twisting maps of K^m with K^n as families of rational matrices."""

from .core import GuardExceeded, MalformedInputError, TwistlabError
from .twistmap import TwistingFamily, verify

__all__ = ["TwistingFamily", "verify", "TwistlabError", "MalformedInputError", "GuardExceeded"]
