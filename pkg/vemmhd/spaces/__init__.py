from vemmhd.spaces.magnetic import (
    MagneticDofLayout,
    MagneticElement,
    MagneticProjections,
    build_magnetic_projections,
    mag_curl_div_rep,
    mag_dof_count,
    mag_edge_trace,
    mag_interpolate,
    mag_p0,
    mag_pnabla,
)
from vemmhd.spaces.velocity import (
    VelocityDofLayout,
    VelocityElement,
    VelocityProjections,
    build_velocity_projections,
    vel_div_rep,
    vel_dof_count,
    vel_grad_p0,
    vel_interpolate,
    vel_p0,
    vel_pnabla,
)

__all__ = [
    "MagneticDofLayout",
    "MagneticElement",
    "MagneticProjections",
    "VelocityDofLayout",
    "VelocityElement",
    "VelocityProjections",
    "build_magnetic_projections",
    "build_velocity_projections",
    "mag_curl_div_rep",
    "mag_dof_count",
    "mag_edge_trace",
    "mag_interpolate",
    "mag_p0",
    "mag_pnabla",
    "vel_div_rep",
    "vel_dof_count",
    "vel_grad_p0",
    "vel_interpolate",
    "vel_p0",
    "vel_pnabla",
]
