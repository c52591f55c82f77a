#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "diraclab/quat.hpp"

namespace diraclab {

/// Per-boundary-vertex frame (T, N, B) stored in boundary-loop order:
/// loops[l][k] is the vertex whose frame is T[l][k], N[l][k], B[l][k].
struct BoundaryFrame {
  std::vector<std::vector<ImVec>> T, N, B;
};

/// Oriented immersed triangle mesh.  Faces are oriented triples; boundary
/// loops traverse boundary edges with the surface on the left.  Meshes are
/// immutable after construction.
struct TriMesh {
  std::vector<ImVec> positions;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::vector<int>> boundary_loops;
  std::string tag;

  // Analytic frame, present on generated meshes with boundary.
  std::optional<BoundaryFrame> frame;

  // Exact vertex permutation realizing the rotation by 2*pi/rot_order about
  // the i-axis, present on generators with rotational symmetry.
  std::vector<int> rotation_perm;
  int rot_order = 0;

  int n_vertices() const { return static_cast<int>(positions.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }
  int n_boundary_vertices() const {
    int n = 0;
    for (const auto& loop : boundary_loops) n += static_cast<int>(loop.size());
    return n;
  }
  bool closed() const { return boundary_loops.empty(); }
  double bbox_diameter() const;

  /// Flat list of boundary vertices in loop order (loop 0 first).
  std::vector<int> boundary_vertices() const;
  std::vector<bool> boundary_mask() const;
};

/// Unit disc {|z| <= 1} with n_r concentric rings and n_s-fold rotational
/// symmetry, immersed by z -> j*z into the jk-plane.  Carries the analytic
/// frame T = j*i*e^{is}, N = -i, B = j*e^{is} on |z| = 1.
TriMesh gen_flat_disc(int n_r, int n_s);

/// Same parameter triangulation as gen_flat_disc, immersed onto the southern
/// hemisphere by inverse stereographic projection from the north pole i.
/// Equator frame: N = position, T = dF/ds normalized, B = T x N = i.
TriMesh gen_hemisphere(int n_r, int n_s);

/// Icosahedron subdivided `level` times and projected to the unit sphere,
/// oriented outward.  0 <= level <= 6.
TriMesh gen_icosphere(int level);

/// Closed sphere with exact n_s-fold rotational symmetry: the hemisphere mesh
/// welded to its mirror image through the jk-plane.
TriMesh gen_symmetric_sphere(int n_r, int n_s);

/// All boundary cycles in positive orientation; empty for closed meshes.
std::vector<std::vector<int>> boundary_loops(const std::vector<ImVec>& positions,
                                             const std::vector<std::array<int, 3>>& faces);

/// Discrete frame for imported meshes: T from the boundary chord, N from
/// area-weighted incident face normals, B = normalize(T x N).
BoundaryFrame discrete_frame(const TriMesh& mesh);

double face_area(const TriMesh& mesh, int f);
ImVec face_normal(const TriMesh& mesh, int f);  // unit, orientation-induced
std::vector<double> vertex_areas(const TriMesh& mesh);

/// Oriented-triangle invariants: face non-degeneracy, edge manifoldness,
/// boundary consistency.  Throws on violation.
void validate(const TriMesh& mesh);

TriMesh read_obj(const std::string& path);
void write_obj(const TriMesh& mesh, const std::string& path);

/// Frame sidecar: {"boundary_frame": [...]} JSON next to an OBJ.
void write_frame_json(const TriMesh& mesh, const std::string& path);

}  // namespace diraclab
