from .document import SourceDocument, StateSpec
from .parser import parse, parse_expression
from .printer import print_document, print_signature

__all__ = ["SourceDocument", "StateSpec", "parse", "parse_expression",
           "print_document", "print_signature"]
