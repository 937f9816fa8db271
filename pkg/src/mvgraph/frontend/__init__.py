"""Parsing and name binding."""

from .cst import IDENTIFIER_KINDS, UNSUPPORTED, SyntaxNode, SyntaxTree, grammar_kinds, parse
from .symbols import Param, Scope, Symbol, SymbolTable, build_symbol_table

__all__ = [
    "IDENTIFIER_KINDS", "UNSUPPORTED", "SyntaxNode", "SyntaxTree", "grammar_kinds", "parse",
    "Param", "Scope", "Symbol", "SymbolTable", "build_symbol_table",
]
