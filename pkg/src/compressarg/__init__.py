"""Executable compression arguments for probabilistic existence proofs.

Modules:

- ``entropy_coding``: exact arithmetic coder and binary entropy
- ``lll_sat``: resampling CNF solver, bit reconstruction, walk code
- ``avoidance``: tetris process, record coding, Miller's condition
- ``series``: inverse denominator series, allowed-string counts, root criterion
- ``toy``: monochromatic minors and near-periodic rotations
"""

__version__ = "0.1.0"
