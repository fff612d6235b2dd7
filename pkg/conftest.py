# Doctests were written against plain-Python reprs: NumPy 1.x scalars (1.0, not
# np.float64(1.0)) and SymPy's pure-Python ground types (2, not mpz(2)).
import os

os.environ.setdefault("SYMPY_GROUND_TYPES", "python")

import numpy

if int(numpy.__version__.split(".")[0]) >= 2:
    numpy.set_printoptions(legacy="1.25")
