"""Hyperelastic virtual element solver on polygonal meshes."""

from ._core import (
    Material,
    Mesh,
    effective_config,
    generate_mesh,
    mvee,
    run,
    stab_params,
    study,
    taylor_lambda,
)

__all__ = [
    "Material",
    "Mesh",
    "effective_config",
    "generate_mesh",
    "mvee",
    "run",
    "stab_params",
    "study",
    "taylor_lambda",
]
