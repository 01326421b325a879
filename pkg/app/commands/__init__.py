# Command groups, registered on the CLI parser by app.main
from app.commands import dioph, lucas, sieve, tau, verify

COMMAND_MODULES = (tau, verify, lucas, sieve, dioph)

__all__ = ["COMMAND_MODULES"]
