"""Numerical toolkit for the vector-state Jensen relation between Hermitian matrices.

Modules
-------
scalar        function descriptors (sqrt, pow, log1p, affine, square) with derivatives
hermitian     spectra, functional calculus, projections, Loewner tests, compressions
relation      the relation ``<h(A)xi,xi> <= h(<B xi,xi>)``: tangent test and sphere oracle
antisymmetry  eigenspace peeling certificate for ``X == Y`` and violation search
sandwich      constants and bound audit for the composed sandwich hypothesis
serialize     matrix JSON files and deterministic reports
ensembles     random Hermitian matrices with prescribed spectra
"""

__version__ = "0.1.0"
