"""heapshield: curve-hash cryptography over a simulated, self-encrypting heap.

The toolkit hashes messages through derived elliptic curves and their
L-series coefficients, keys a one-time stream cipher from that hash, and
wires both into a simulated memory heap whose garbage collector encrypts
reclaimed regions.  Adversary games (address prediction, task-label
inference) and a timing harness quantify the protection.
"""

from ._backend import BACKEND, NUMBA_ENABLED
from .attacks import ATTACK_KINDS, AttackConfig, AttackReport, ltb_attack, nmao_attack, run_scenario
from .bench import (
    ALGORITHMS,
    DEFAULT_SIZES_KB,
    BenchReport,
    TimingRecord,
    render_report,
    run_suite,
    spearman,
    time_cipher,
)
from .cipher import (
    CipherEnvelope,
    KeyMaterial,
    decrypt,
    encrypt,
    keystream,
    random_nonce,
)
from .curves import (
    Curve,
    ProjectivePoint,
    ReductionInfo,
    ReductionKind,
    TraceTable,
    count_points,
    discriminant,
    legendre_symbol,
    reduction_type,
    trace_ap,
    trace_table,
)
from .errors import (
    BadReductionError,
    DerivationFailureError,
    EnvelopeFormatError,
    HeapshieldError,
    InvalidArgumentError,
    InvalidHandleError,
    OutOfDomainError,
    OutOfMemoryError,
    ParamsError,
    ScenarioFormatError,
    UnknownParamsError,
)
from .hashing import (
    PARAMS,
    DerivedCurve,
    Digest,
    HashParams,
    derive_curve,
    hash_digest,
    point_encode,
    select_k,
)
from .heap import (
    HeapModel,
    HeapTrace,
    TaskObject,
    bundled_scenarios,
    heap_new,
    load_scenario,
    replay_scenario,
)
from .lseries import (
    CoefficientVector,
    PartialSum,
    dirichlet_coefficients,
    euler_expand,
    l_series_partial,
)

__version__ = "0.1.0"
