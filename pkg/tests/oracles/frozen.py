"""Reference values frozen before the implementation was tested against them.

High-precision constants were evaluated with mpmath at 50 digits.
"""

# tabulated counterexample over ids 0 = "get", 1 = "cinema"
COUNTEREXAMPLE_VALUES = (2.432e-5, 2.724e-5, 2.664e-5, 3.141e-5)
COUNTEREXAMPLE_GAIN_SMALL = 2.92e-6
COUNTEREXAMPLE_GAIN_LARGE = 4.77e-6
COUNTEREXAMPLE_SMI = -1.85e-6

# modular weights over blocks {0, 1} and {2}
MODULAR_WEIGHTS = (0.3, 0.5, 0.2)
MODULAR_OPT = frozenset({1, 2})
MODULAR_OPT_VALUE = 0.7

# (1 / alpha) * (1 - exp(-alpha / d)) with dbar = 1
PRIOR_BOUND = {
    (1.0, 3): 0.28346868942621074957439590307462033254688794017852,
    (0.1, 3): 0.32783899517994097928864194136778722220040582086357,
    (5.0, 20): 0.044239843385719026350965946604335870540645541914772,
    (0.1, 2): 0.48770575499285990841455909998079727113563240213315,
    (1.0, 1): 0.63212055882855767840447622983853913255418886896823,
}
