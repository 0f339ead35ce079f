"""
mobiuscs: coherent states and cat states on a Möbius strip.
Closed forms, a truncated angular-momentum engine to check them against, and sweep data.

Modules are imported top-level from src/ (see main.py); the package itself re-exports nothing.
"""
