"""corelab: a verification laboratory for the rank behavior of sparse random
graphs and their minimum-degree cores."""

__version__ = "0.1.0"
