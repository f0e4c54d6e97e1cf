"""kml: an exact-arithmetic workbench for homological module calculus.

Everything here is exact: integer, rational, or prime-field arithmetic,
never floating point.  The package provides

* exact linear algebra (Smith and Hermite forms, kernels, cokernels,
  homology of finitely generated modules) in :mod:`kml.linalg`,
* cube-shaped diagrams of modules and their total complexes in
  :mod:`kml.cubes`,
* truncated graded modules over free commutative monoids with Koszul
  homology in :mod:`kml.graded`,
* modules with commuting endomorphisms, stability of filtrations and an
  Artin-Rees index search in :mod:`kml.affine`,
* K0 class vectors and the verification routines built on them in
  :mod:`kml.k0`,
* Adams operations on Koszul classes of line elements in :mod:`kml.adams`,
* a command line front end ``kml`` in :mod:`kml.cli`.
"""

__version__ = "0.1.0"
