"""Tight frames on ellipsoids and decompositions of positive operators into projections."""

__version__ = "0.1.0"

from .diag_stream import DiagSpec, next_block, plan, run_prefix
from .ellipsoid import (
    Ellipsoid,
    membership,
    onb_on_ellipsoid,
    tight_frame_on_ellipsoid,
    to_axes,
    to_operator,
)
from .errors import (
    EndOfStream,
    FrameError,
    InfeasiblePrefix,
    InvalidCase2State,
    InvalidInput,
    NotDecomposable,
    NotInvertible,
    NotPSD,
)
from .frames import (
    Frame,
    etf_synthesize,
    frame_bounds,
    frame_operator,
    parsevalize,
    spherical_frame,
)
from .operator_core import (
    EigenSystem,
    ToleranceConfig,
    eig,
    inv_sqrt,
    mu,
    outer,
    psd_clamp,
    rank_eps,
    trace,
)
from .projection import (
    check_decomposable,
    decompose_rank_k,
    decompose_rank_one,
    peel_root,
)
