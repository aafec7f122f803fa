from .scalars import HBAR, QI, Scalar, Sym
from .poly import NCPolynomial, adjoint, commutator, is_hermitian, normal_form
from .signature import AlgebraSignature, SignatureBuilder, real_scalar_multiple_of_one

__all__ = [
    "HBAR", "QI", "Scalar", "Sym", "NCPolynomial", "adjoint", "commutator",
    "is_hermitian", "normal_form", "AlgebraSignature", "SignatureBuilder",
    "real_scalar_multiple_of_one",
]
