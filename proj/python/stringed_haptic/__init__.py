"""Tension solving, pose estimation, workspace analysis and scenario replay for the stringed haptic rig."""

from ._core import (
    Error,
    InvalidInput,
    NoConvergence,
    ParseError,
    RankDeficient,
    RigConfig,
    TensionBounds,
    condition_number,
    decode_command,
    default_rig,
    diameter_sweep,
    encode_command,
    estimate_pose,
    load_rig,
    parse_rig_json,
    replay,
    solve_tensions,
    string_lengths,
    structure_matrix,
    workspace,
    wrench_capability,
)

__all__ = [
    "Error",
    "InvalidInput",
    "NoConvergence",
    "ParseError",
    "RankDeficient",
    "RigConfig",
    "TensionBounds",
    "condition_number",
    "decode_command",
    "default_rig",
    "diameter_sweep",
    "encode_command",
    "estimate_pose",
    "load_rig",
    "parse_rig_json",
    "replay",
    "solve_tensions",
    "string_lengths",
    "structure_matrix",
    "workspace",
    "wrench_capability",
]
