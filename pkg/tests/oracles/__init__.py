# Reference implementations used only by the tests: slow, loop-based,
# written straight from the defining formulas rather than sharing code
# with the package.
