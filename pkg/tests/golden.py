"""Worked example used across the test suite (8 x 4 integers, 1-based labels in the tables)."""
from cvcbic import Bicluster

B1_RAW = [
    [13, 15, 7, 11],
    [14, 15, 14, 12],
    [2, 3, 12, 12],
    [14, 15, 15, 6],
    [10, 15, 10, 10],
    [2, 8, 1, 3],
    [5, 13, 13, 11],
    [9, 3, 15, 1],
]

B1_BINNED = [
    [3, 3, 2, 3],
    [3, 3, 3, 3],
    [1, 1, 3, 3],
    [3, 3, 3, 2],
    [2, 3, 2, 2],
    [1, 2, 1, 1],
    [1, 3, 3, 3],
    [2, 1, 3, 1],
]

# "x" marks of the itemized table and the extra "+" marks of the multi-item one,
# as (row, item) pairs, both 1-based
B1_PLUS = {
    (1, 7), (1, 11), (2, 11), (3, 8), (3, 11), (4, 10),
    (5, 3), (5, 9), (5, 12), (7, 2), (7, 11), (8, 3),
}


def _bics(pairs):
    return {Bicluster.one_based(r, c) for r, c in pairs}


PERFECT_BINNED = _bics([
    ({3, 6, 7}, {1}), ({3, 7}, {1, 3, 4}), ({5, 8}, {1}),
    ({1, 2, 4}, {1, 2}), ({2, 4}, {1, 2, 3}), ({1, 2}, {1, 2, 4}),
    ({3, 8}, {2, 3}), ({1, 2, 4, 5, 7}, {2}), ({1, 5}, {2, 3}),
    ({2, 4, 7}, {2, 3}), ({2, 7}, {2, 3, 4}), ({4, 5}, {2, 4}),
    ({1, 2, 7}, {2, 4}), ({2, 3, 4, 7, 8}, {3}), ({2, 3, 7}, {3, 4}),
    ({6, 8}, {4}), ({1, 2, 3, 7}, {4}),
])

CONCEPTS_ITEMIZED = _bics([
    ({3, 6, 7}, {1}), ({3, 7}, {1, 9, 12}), ({5, 8}, {2}),
    ({1, 2, 4}, {3, 6}), ({2, 4}, {3, 6, 9}), ({1, 2}, {3, 6, 12}),
    ({3, 8}, {4, 9}), ({1, 2, 4, 5, 7}, {6}), ({1, 5}, {6, 8}),
    ({2, 4, 7}, {6, 9}), ({2, 7}, {6, 9, 12}), ({4, 5}, {6, 11}),
    ({1, 2, 7}, {6, 12}), ({2, 3, 4, 7, 8}, {9}), ({2, 3, 7}, {9, 12}),
    ({6, 8}, {10}), ({1, 2, 3, 7}, {12}),
])

CVC_EPS5 = _bics([
    ({3, 6, 7}, {1}), ({3, 6}, {1, 2}), ({6, 7}, {1, 2}),
    ({3, 7}, {1, 3, 4}), ({5, 7, 8}, {1, 3}), ({5, 7}, {1, 2, 3, 4}),
    ({1, 2, 4, 5, 8}, {1}), ({1, 2, 4, 5}, {1, 2}), ({1, 5}, {1, 2, 3, 4}),
    ({2, 4, 5}, {1, 2, 3}), ({4, 5}, {1, 2, 3, 4}), ({2, 5}, {1, 2, 3, 4}),
    ({1, 4, 5}, {1, 2, 4}), ({1, 2, 5}, {1, 2, 4}), ({2, 4, 5, 8}, {1, 3}),
    ({4, 8}, {1, 3, 4}), ({3, 6, 8}, {2}), ({3, 8}, {2, 3}),
    ({6, 8}, {2, 4}), ({1, 2, 4, 5, 7}, {2}), ({2, 4, 5, 7}, {2, 3}),
    ({4, 5, 7}, {2, 3, 4}), ({2, 5, 7}, {2, 3, 4}), ({1, 4, 5, 7}, {2, 4}),
    ({1, 2, 5, 7}, {2, 4}), ({1, 3, 5}, {3, 4}), ({2, 3, 4, 5, 7, 8}, {3}),
    ({2, 3, 5, 7}, {3, 4}), ({4, 6, 8}, {4}), ({1, 2, 3, 5, 7}, {4}),
])

CONCEPTS_MULTI = _bics([
    ({3, 6, 7}, {1}), ({3, 7}, {1, 9, 11, 12}), ({5, 7, 8}, {2, 9}),
    ({5, 8}, {2, 3, 9}), ({5, 7}, {2, 6, 9, 11, 12}), ({1, 2, 4, 5, 8}, {3}),
    ({1, 2, 4, 5}, {3, 6, 11}), ({1, 5}, {3, 6, 8, 11, 12}), ({2, 4, 5}, {3, 6, 9, 11}),
    ({2, 5}, {3, 6, 9, 11, 12}), ({1, 2, 5}, {3, 6, 11, 12}), ({2, 4, 5, 8}, {3, 9}),
    ({4, 8}, {3, 9, 10}), ({3, 8}, {4, 9}), ({1, 2, 4, 5, 7}, {6, 11}),
    ({2, 4, 5, 7}, {6, 9, 11}), ({2, 5, 7}, {6, 9, 11, 12}), ({1, 2, 5, 7}, {6, 11, 12}),
    ({1, 6}, {7}), ({1, 3, 5}, {8, 11, 12}), ({3, 5}, {8, 9, 11, 12}),
    ({2, 3, 4, 5, 7, 8}, {9}), ({2, 3, 4, 5, 7}, {9, 11}), ({2, 3, 5, 7}, {9, 11, 12}),
    ({4, 6, 8}, {10}), ({1, 2, 3, 4, 5, 7}, {11}), ({1, 2, 3, 5, 7}, {11, 12}),
])

# two-column example: value windows overlap on the first column
FIG_MATRIX = [[0, 0], [0, 5], [1, 9], [1, 9], [1, 9], [2, 5], [2, 0]]
FIG_EXPECTED = _bics([
    ({1, 2, 3, 4, 5}, {1}), ({3, 4, 5, 6, 7}, {1}), ({3, 4, 5}, {1, 2}),
    ({1, 7}, {2}), ({2, 6}, {2}),
])
