"""Hermitian theta lattices over imaginary quadratic fields."""
