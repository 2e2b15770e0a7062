"""Linear relations, port-Hamiltonian structures and system conversions."""
