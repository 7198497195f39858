"""Static analysis of Verilog designs over a three-address intermediate representation."""

__version__ = "0.1.0"
