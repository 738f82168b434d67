"""Exact scalar minimum-storage coordinated regenerating codes for k=2."""

from .code import CodeParams, Code, DeviceBlock, build_code, change_of_variables, decode, encode
from .errors import (
    FieldUnsuitable,
    MSCRError,
    ParameterError,
    SingularMatrix,
)
from .field import FieldElement, FieldSpec
from .linalg import Matrix, mat_inverse, mat_rank, mat_solve
from .repair import RepairTranscript, repair, repair_pair, repair_single

__all__ = [
    "Code",
    "CodeParams",
    "DeviceBlock",
    "FieldElement",
    "FieldSpec",
    "FieldUnsuitable",
    "MSCRError",
    "Matrix",
    "ParameterError",
    "RepairTranscript",
    "SingularMatrix",
    "build_code",
    "change_of_variables",
    "decode",
    "encode",
    "mat_inverse",
    "mat_rank",
    "mat_solve",
    "repair",
    "repair_pair",
    "repair_single",
]

__version__ = "0.1.0"
