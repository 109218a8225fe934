"""Numerical tolerances shared across the package."""

#: Tolerance for structural checks (unitarity of long products, circuit identities).
STRUCTURAL_TOL = 1e-9
#: Tolerance for algebraic identities on freshly built matrices.
ALGEBRAIC_TOL = 1e-10
#: Dense simulation is refused above this many qubits.
MAX_DENSE_QUBITS = 12
#: Hardware circuit-depth limit of the target device.
DEPTH_LIMIT = 39
#: Maximum number of runs the target device accepts for one computation.
MAX_SHOTS = 8192
