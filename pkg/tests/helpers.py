import numpy as np

from pilotseq.model import InterferenceMatrix, SequenceSet

# reference 3-cell matrices: the first positive definite, the second not
B1 = [[1, .8, .2], [.8, 1, .6], [.2, .6, 1]]
B2 = [[1, 1, 0], [1, 1, .6], [0, .6, 1]]

# filled by test_acceptance, printed by the terminal-summary hook in conftest
ACCEPTANCE_LINES = []


def random_b(rng, cells):
    b = rng.random((cells, cells))
    b = (b + b.T) / 2
    np.fill_diagonal(b, 1.0)
    return InterferenceMatrix(b)


def random_unit_set(rng, tau, cells, users):
    n = cells * users
    s = rng.standard_normal((tau, n)) + 1j * rng.standard_normal((tau, n))
    return SequenceSet(s / np.linalg.norm(s, axis=0), cells, users)
