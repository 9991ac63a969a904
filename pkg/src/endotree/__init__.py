"""Exact endoscopy and orbital-sum computations at rank-one scale.

The package is organized around five core modules:

* :mod:`endotree.root_datum` -- root data, Weyl groups, built-in families.
* :mod:`endotree.endoscopy` -- enumeration and testing of endoscopic data.
* :mod:`endotree.tori_cohomology` -- lattice H^1 and induced characters.
* :mod:`endotree.local_field` -- truncated local-field arithmetic and the
  element-expression grammar.
* :mod:`endotree.building_orbital` -- fixed-vertex counting on the
  rank-one lattice tree and the orbital-sum pipelines.

A FastAPI service (:mod:`endotree.service`) wraps every pipeline behind
JSON request/response models, and :mod:`endotree.cli` is a thin client
over the same handler layer.
"""

__version__ = "0.1.0"

from .errors import DomainError, EndotreeError, ExprSyntaxError, PrecisionError

__all__ = [
    "DomainError",
    "EndotreeError",
    "ExprSyntaxError",
    "PrecisionError",
    "__version__",
]
