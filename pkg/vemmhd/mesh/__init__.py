from vemmhd.mesh.generators import gen_family, perturbed_quad_mesh, quad_mesh, tri_mesh, voronoi_mesh
from vemmhd.mesh.io import read_mesh, write_mesh
from vemmhd.mesh.polymesh import ElementGeometry, PolyMesh, build_mesh, mesh_size
from vemmhd.mesh.quality import QualityReport, quality_report

__all__ = [
    "ElementGeometry",
    "PolyMesh",
    "QualityReport",
    "build_mesh",
    "gen_family",
    "mesh_size",
    "perturbed_quad_mesh",
    "quad_mesh",
    "quality_report",
    "read_mesh",
    "tri_mesh",
    "voronoi_mesh",
    "write_mesh",
]
