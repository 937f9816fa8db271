"""Aligned AST, CFG and DFG views of C and C++ programs."""
