"""Python access to the skein chromatin model toolkit."""

from ._skein import (
    InvalidArgument,
    Model,
    OutOfRange,
    ParseError,
    bins_for_length,
    distance_map,
    distance_tile,
    level_for,
    load_model,
    parse_model,
    render_model,
    run_cli,
    sasa,
    select_sequence,
    select_sphere,
    select_sphere_at,
    tube_radius,
)

__all__ = [
    "InvalidArgument",
    "Model",
    "OutOfRange",
    "ParseError",
    "bins_for_length",
    "distance_map",
    "distance_tile",
    "level_for",
    "load_model",
    "parse_model",
    "render_model",
    "run_cli",
    "sasa",
    "select_sequence",
    "select_sphere",
    "select_sphere_at",
    "tube_radius",
]
