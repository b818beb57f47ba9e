"""Cue-guided multi-agent RL grid-world simulator."""

from ._core import (
    Action,
    GridMap,
    LinkBudget,
    __version__,
    apply_joint_action,
    attempted_cell,
    cell_distance_m,
    default_config,
    gps_estimate,
    line_of_sight,
    load_map,
    noise_floor_dbm,
    paper_map,
    paper_map_text,
    parse_config,
    path_loss_db,
    peb,
    rss_dbm,
    run_monte_carlo,
    run_training,
    sample_action,
    save_map,
    schedule_value,
    softmax_probs,
)

__all__ = [
    "Action",
    "GridMap",
    "LinkBudget",
    "__version__",
    "apply_joint_action",
    "attempted_cell",
    "cell_distance_m",
    "default_config",
    "gps_estimate",
    "line_of_sight",
    "load_map",
    "noise_floor_dbm",
    "paper_map",
    "paper_map_text",
    "parse_config",
    "path_loss_db",
    "peb",
    "rss_dbm",
    "run_monte_carlo",
    "run_training",
    "sample_action",
    "save_map",
    "schedule_value",
    "softmax_probs",
]
