"""Nonlinear XFEM fracture solver on polygonal meshes."""

from ._core import patch_test, run, run_json, shape_values

__all__ = ["run", "run_json", "patch_test", "shape_values"]
