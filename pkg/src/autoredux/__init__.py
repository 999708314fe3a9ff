"""Finite-universe laboratory for enumeration reducibility and autoreducibility."""

from .autoreduce import (
    AutoreductionProcedure,
    DensityReport,
    constant_psi,
    count_autoreducible,
    density_experiment,
    flip_refute,
    is_autoreducible,
    make_cototal_psi,
    make_diag_psi,
    make_rule_psi,
    make_table_psi,
    make_uie_psi,
    psi_eval,
    sample_fraction,
    wilson_interval,
)
from .cototal import (
    LeftCEReal,
    enumerate_from_complement,
    make_toy_omega,
    trace_enumeration,
    true_bits,
)
from .diagonal import (
    Compressible,
    DiagonalState,
    diag_run,
    diag_run_degree,
    diag_step_degree,
    diag_step_subset,
    fallback_psi,
    verify_diag,
)
from .enumop import (
    EnumerationOperator,
    apply,
    apply_composed,
    apply_stream,
    format_operator,
    parse_operator,
    reify_composition,
    stage_apply,
)
from .prefixmachine import (
    MachineInput,
    compression_report,
    decode_header,
    encode_header,
    machine_decode,
    machine_decode_rel,
    machine_encode,
    machine_encode_rel,
)
from .universe import (
    BitVector,
    SetEnumeration,
    Universe,
    decode_finite_set,
    encode_finite_set,
    flip,
    mask,
    pair,
    unpair,
)
from .witness import (
    WitnessReport,
    gen_cototal_example,
    gen_threshold_uie,
    gen_trivial_uie,
    is_cototal_witness,
    is_uie_witness,
)

__version__ = "0.1.0"
