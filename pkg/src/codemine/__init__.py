"""codemine: self-hostable source-code mining and dataset-construction platform."""

__version__ = "0.1.0"
