"""Constructive class-field-theory toolkit.

Exact verification of universal trace/norm generators and normal
elements over cyclotomic fields, plus a high-precision modular-function
engine with a Shimura-reciprocity layer for imaginary quadratic
ray class fields.
"""

import sys

# Coprime-denominator tables grow doubly exponentially and certificates
# serialize them as decimal strings; lift CPython's conversion cap.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(max(sys.get_int_max_str_digits(), 2_000_000))

from .coprime import CoprimeSeq, coprime_seq
from .cyclotomic import (
    AbelianGroupData,
    CycElem,
    GaloisAut,
    SubgroupData,
    apply_aut,
    cyc_arith,
    cyc_reduce,
    galois_group,
    generates,
    rel_discriminant,
    rel_norm,
    rel_trace,
    subgroup_lattice,
)
from .norm_gen import NormGenCertificate, TowerData, build_norm_element, power_stable
from .normal_elem import (
    AbelianCharTable,
    NormalElemCertificate,
    build_normal_element,
    char_sum_S,
    char_table,
    is_normal,
    nonvanishing_exponents,
)
from .trace_gen import (
    TraceGenCertificate,
    build_trace_generator,
    default_subfield_generator,
    trace_budget,
)

__version__ = "0.1.0"

__all__ = [
    "AbelianCharTable",
    "AbelianGroupData",
    "CoprimeSeq",
    "CycElem",
    "GaloisAut",
    "NormGenCertificate",
    "NormalElemCertificate",
    "SubgroupData",
    "TowerData",
    "TraceGenCertificate",
    "apply_aut",
    "build_norm_element",
    "build_normal_element",
    "build_trace_generator",
    "char_sum_S",
    "char_table",
    "coprime_seq",
    "cyc_arith",
    "cyc_reduce",
    "default_subfield_generator",
    "galois_group",
    "generates",
    "is_normal",
    "nonvanishing_exponents",
    "power_stable",
    "rel_discriminant",
    "rel_norm",
    "rel_trace",
    "subgroup_lattice",
    "trace_budget",
]
