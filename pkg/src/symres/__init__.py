"""Resolution with symmetry rules: encodings, constructive refutations, checking."""

__version__ = "0.1.0"
