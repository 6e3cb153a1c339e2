"""Languages of higher-dimensional timed automata.

The package is organised by concern:

* :mod:`hdtalang.ipomsets` - conclists, interval ipomsets, gluing, step sequences
* :mod:`hdtalang.timed` - tipomsets, interval delay words, delay and timed words
* :mod:`hdtalang.clocks` - clock constraints, valuations, regions
* :mod:`hdtalang.models` - precubical sets, HDAs, HDTAs, timed automata
* :mod:`hdtalang.semantics` - moves, paths, bounded language exploration
* :mod:`hdtalang.inclusion` - region automata and untimed decision procedures
* :mod:`hdtalang.syntax` and :mod:`hdtalang.modelio` - text notation and model files
* :mod:`hdtalang.render` - interval diagrams of tipomsets
* :mod:`hdtalang.generators` - seeded random instances
* :mod:`hdtalang.cli` - the ``hdtalang`` command
"""

from .ipomsets import Conclist, Ipomset, StepLetter, StepSequence, glue, glue_sequence, sparse_decompose
from .timed import IdWord, Tipomset, tglue

__version__ = "0.1.0"

__all__ = [
    "Conclist",
    "IdWord",
    "Ipomset",
    "StepLetter",
    "StepSequence",
    "Tipomset",
    "glue",
    "glue_sequence",
    "sparse_decompose",
    "tglue",
]
