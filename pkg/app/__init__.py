# Tau Odd-Values Verifier

__version__ = "1.0.0"
