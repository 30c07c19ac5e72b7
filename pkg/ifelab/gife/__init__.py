"""
GIFE Module
Trace-power verdicts, the resonance-class recipe and effective local Hamiltonians
"""
