"""Exact DR hierarchy computations for the rank-N family (Id + R1 z) c^{triv,G}.

Submodules: ``diffpoly`` (truncated differential polynomials), ``multipoly``,
``trees``, ``fcohft``, ``drcycle`` (vertex integrals), ``laxkdv`` (reference KdV),
``hierarchy`` (assembly of the flows) and ``cli``.
"""
from .diffpoly import DiffPoly, MiuraMap, TruncationContext, dx, flow_apply, invert_miura, substitute
from .drcycle import UnsupportedPattern, VertexIntegralQuery, evaluate
from .fcohft import FamilySpec
from .hierarchy import FlowTable, assemble_P, check_commutativity, miura_flows
from .kernels import KERNEL_NAME
from .laxkdv import kdv_P
from .params import ParamRational

__version__ = "0.1.0"

__all__ = [
    "DiffPoly",
    "FamilySpec",
    "FlowTable",
    "KERNEL_NAME",
    "MiuraMap",
    "ParamRational",
    "TruncationContext",
    "UnsupportedPattern",
    "VertexIntegralQuery",
    "assemble_P",
    "check_commutativity",
    "dx",
    "evaluate",
    "flow_apply",
    "invert_miura",
    "kdv_P",
    "miura_flows",
    "substitute",
]
