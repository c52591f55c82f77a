#include "diraclab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace diraclab {

namespace {

constexpr double kPi = 3.14159265358979323846;

int disc_vertex(int n_s, int r, int m) {
  // r = 0 is the center; rings are 1..n_r with n_s vertices each.
  if (r == 0) return 0;
  return 1 + (r - 1) * n_s + ((m % n_s + n_s) % n_s);
}

struct DiscTopology {
  std::vector<std::array<int, 3>> faces;
  std::vector<int> boundary_loop;
  std::vector<int> rotation_perm;
};

DiscTopology disc_topology(int n_r, int n_s) {
  if (n_r < 1 || n_s < 3)
    throw Error(ErrorCode::InvalidResolution, "disc needs n_r >= 1, n_s >= 3");
  DiscTopology topo;
  for (int m = 0; m < n_s; ++m)
    topo.faces.push_back({0, disc_vertex(n_s, 1, m), disc_vertex(n_s, 1, m + 1)});
  for (int r = 1; r < n_r; ++r) {
    for (int m = 0; m < n_s; ++m) {
      topo.faces.push_back(
          {disc_vertex(n_s, r, m), disc_vertex(n_s, r + 1, m), disc_vertex(n_s, r + 1, m + 1)});
      topo.faces.push_back(
          {disc_vertex(n_s, r, m), disc_vertex(n_s, r + 1, m + 1), disc_vertex(n_s, r, m + 1)});
    }
  }
  for (int m = 0; m < n_s; ++m) topo.boundary_loop.push_back(disc_vertex(n_s, n_r, m));
  topo.rotation_perm.assign(1 + n_r * n_s, 0);
  for (int r = 1; r <= n_r; ++r)
    for (int m = 0; m < n_s; ++m)
      topo.rotation_perm[disc_vertex(n_s, r, m)] = disc_vertex(n_s, r, m + 1);
  return topo;
}

}  // namespace

double TriMesh::bbox_diameter() const {
  if (positions.empty()) return 0;
  ImVec lo = positions[0], hi = positions[0];
  for (const auto& p : positions) {
    lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
  }
  return (hi - lo).norm();
}

std::vector<int> TriMesh::boundary_vertices() const {
  std::vector<int> out;
  for (const auto& loop : boundary_loops) out.insert(out.end(), loop.begin(), loop.end());
  return out;
}

std::vector<bool> TriMesh::boundary_mask() const {
  std::vector<bool> mask(positions.size(), false);
  for (const auto& loop : boundary_loops)
    for (int v : loop) mask[v] = true;
  return mask;
}

TriMesh gen_flat_disc(int n_r, int n_s) {
  DiscTopology topo = disc_topology(n_r, n_s);
  TriMesh mesh;
  mesh.tag = "flat_disc(" + std::to_string(n_r) + "," + std::to_string(n_s) + ")";
  mesh.positions.resize(1 + n_r * n_s);
  mesh.positions[0] = {0, 0, 0};
  for (int r = 1; r <= n_r; ++r) {
    double rad = static_cast<double>(r) / n_r;
    for (int m = 0; m < n_s; ++m) {
      double s = 2.0 * kPi * m / n_s;
      // z = x + iy maps to x*j - y*k
      mesh.positions[disc_vertex(n_s, r, m)] = {0, rad * std::cos(s), -rad * std::sin(s)};
    }
  }
  mesh.faces = std::move(topo.faces);
  mesh.boundary_loops = {topo.boundary_loop};
  mesh.rotation_perm = std::move(topo.rotation_perm);
  mesh.rot_order = n_s;

  BoundaryFrame frame;
  frame.T.resize(1); frame.N.resize(1); frame.B.resize(1);
  for (int m = 0; m < n_s; ++m) {
    double s = 2.0 * kPi * m / n_s;
    frame.T[0].push_back({0, -std::sin(s), -std::cos(s)});  // j*i*e^{is}
    frame.N[0].push_back({-1, 0, 0});
    frame.B[0].push_back({0, std::cos(s), -std::sin(s)});   // j*e^{is}
  }
  mesh.frame = std::move(frame);
  return mesh;
}

TriMesh gen_hemisphere(int n_r, int n_s) {
  DiscTopology topo = disc_topology(n_r, n_s);
  TriMesh mesh;
  mesh.tag = "hemisphere(" + std::to_string(n_r) + "," + std::to_string(n_s) + ")";
  mesh.positions.resize(1 + n_r * n_s);
  mesh.positions[0] = {-1, 0, 0};  // f(0) = -i, the south pole
  for (int r = 1; r <= n_r; ++r) {
    double rad = static_cast<double>(r) / n_r;
    for (int m = 0; m < n_s; ++m) {
      double s = 2.0 * kPi * m / n_s;
      double x = rad * std::cos(s), y = rad * std::sin(s);
      double d = 1.0 + rad * rad;
      // f(z) = ((|z|^2 - 1) i + 2 j z) / (1 + |z|^2)
      mesh.positions[disc_vertex(n_s, r, m)] = {(rad * rad - 1.0) / d, 2 * x / d, -2 * y / d};
    }
  }
  mesh.faces = std::move(topo.faces);
  mesh.boundary_loops = {topo.boundary_loop};
  mesh.rotation_perm = std::move(topo.rotation_perm);
  mesh.rot_order = n_s;

  BoundaryFrame frame;
  frame.T.resize(1); frame.N.resize(1); frame.B.resize(1);
  for (int m = 0; m < n_s; ++m) {
    double s = 2.0 * kPi * m / n_s;
    frame.T[0].push_back({0, -std::sin(s), -std::cos(s)});
    frame.N[0].push_back({0, std::cos(s), -std::sin(s)});  // outward sphere normal
    frame.B[0].push_back({1, 0, 0});
  }
  mesh.frame = std::move(frame);
  return mesh;
}

TriMesh gen_icosphere(int level) {
  if (level < 0 || level > 6)
    throw Error(ErrorCode::InvalidResolution, "icosphere level must be in [0,6]");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<ImVec> verts = {
      {-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0},
      {0, -1, p}, {0, 1, p}, {0, -1, -p}, {0, 1, -p},
      {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  for (auto& v : verts) v = normalized(v);
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int idx = static_cast<int>(verts.size());
      verts.push_back(normalized(verts[a] + verts[b]));
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int m01 = mid(f[0], f[1]), m12 = mid(f[1], f[2]), m20 = mid(f[2], f[0]);
      next.push_back({f[0], m01, m20});
      next.push_back({f[1], m12, m01});
      next.push_back({f[2], m20, m12});
      next.push_back({m01, m12, m20});
    }
    faces = std::move(next);
  }

  TriMesh mesh;
  mesh.tag = "icosphere(" + std::to_string(level) + ")";
  mesh.positions = std::move(verts);
  mesh.faces = std::move(faces);

  // orient outward: face normal must have positive dot with the centroid
  for (auto& f : mesh.faces) {
    ImVec a = mesh.positions[f[0]], b = mesh.positions[f[1]], c = mesh.positions[f[2]];
    ImVec n = cross(b - a, c - a);
    if (dot(n, (a + b + c) / 3.0) < 0) std::swap(f[1], f[2]);
  }
  return mesh;
}

TriMesh gen_symmetric_sphere(int n_r, int n_s) {
  TriMesh south = gen_hemisphere(n_r, n_s);
  const int n_south = south.n_vertices();
  std::vector<bool> on_equator(n_south, false);
  for (int v : south.boundary_loops[0]) on_equator[v] = true;

  TriMesh mesh;
  mesh.tag = "symmetric_sphere(" + std::to_string(n_r) + "," + std::to_string(n_s) + ")";
  mesh.positions = south.positions;
  std::vector<int> mirror(n_south);
  for (int v = 0; v < n_south; ++v) {
    if (on_equator[v]) {
      mirror[v] = v;
    } else {
      mirror[v] = static_cast<int>(mesh.positions.size());
      ImVec p = south.positions[v];
      mesh.positions.push_back({-p.x, p.y, p.z});
    }
  }
  mesh.faces = south.faces;
  for (const auto& f : south.faces)
    mesh.faces.push_back({mirror[f[0]], mirror[f[2]], mirror[f[1]]});  // reversed winding

  mesh.rotation_perm.resize(mesh.positions.size());
  for (int v = 0; v < n_south; ++v) mesh.rotation_perm[v] = south.rotation_perm[v];
  for (int v = 0; v < n_south; ++v)
    if (!on_equator[v]) mesh.rotation_perm[mirror[v]] = mirror[south.rotation_perm[v]];
  mesh.rot_order = n_s;
  return mesh;
}

std::vector<std::vector<int>> boundary_loops(const std::vector<ImVec>& positions,
                                             const std::vector<std::array<int, 3>>& faces) {
  (void)positions;
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;  // undirected -> directed
  for (const auto& f : faces) {
    for (int e = 0; e < 3; ++e) {
      int a = f[e], b = f[(e + 1) % 3];
      edges[std::minmax(a, b)].push_back({a, b});
    }
  }
  std::map<int, int> next;  // boundary successor
  for (const auto& [key, dirs] : edges) {
    if (dirs.size() > 2)
      throw Error(ErrorCode::NonManifold, "edge shared by more than two faces");
    if (dirs.size() == 2 && dirs[0] == dirs[1])
      throw Error(ErrorCode::NonManifold, "inconsistently oriented interior edge");
    if (dirs.size() == 1) {
      auto [a, b] = dirs[0];
      if (next.count(a))
        throw Error(ErrorCode::NonManifold, "boundary vertex with two outgoing boundary edges");
      next[a] = b;
    }
  }
  std::vector<std::vector<int>> loops;
  std::map<int, bool> used;
  for (const auto& [start, succ] : next) {
    (void)succ;
    if (used.count(start)) continue;
    std::vector<int> loop;
    int v = start;
    do {
      loop.push_back(v);
      used[v] = true;
      auto it = next.find(v);
      if (it == next.end()) throw Error(ErrorCode::NonManifold, "open boundary chain");
      v = it->second;
    } while (v != start);
    auto mn = std::min_element(loop.begin(), loop.end());
    std::rotate(loop.begin(), mn, loop.end());
    loops.push_back(std::move(loop));
  }
  std::sort(loops.begin(), loops.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  return loops;
}

double face_area(const TriMesh& mesh, int f) {
  const auto& t = mesh.faces[f];
  ImVec a = mesh.positions[t[0]], b = mesh.positions[t[1]], c = mesh.positions[t[2]];
  return 0.5 * cross(b - a, c - a).norm();
}

ImVec face_normal(const TriMesh& mesh, int f) {
  const auto& t = mesh.faces[f];
  ImVec a = mesh.positions[t[0]], b = mesh.positions[t[1]], c = mesh.positions[t[2]];
  return normalized(cross(b - a, c - a));
}

std::vector<double> vertex_areas(const TriMesh& mesh) {
  std::vector<double> area(mesh.positions.size(), 0.0);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    double a = face_area(mesh, f) / 3.0;
    for (int v : mesh.faces[f]) area[v] += a;
  }
  return area;
}

BoundaryFrame discrete_frame(const TriMesh& mesh) {
  if (mesh.boundary_loops.empty())
    throw Error(ErrorCode::MissingFrame, "mesh has no boundary");
  std::vector<ImVec> vnormal(mesh.positions.size(), ImVec{0, 0, 0});
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto& t = mesh.faces[f];
    ImVec a = mesh.positions[t[0]], b = mesh.positions[t[1]], c = mesh.positions[t[2]];
    ImVec n = cross(b - a, c - a) * 0.5;  // area-weighted
    for (int v : t) vnormal[v] = vnormal[v] + n;
  }
  BoundaryFrame frame;
  for (const auto& loop : mesh.boundary_loops) {
    std::vector<ImVec> Ts, Ns, Bs;
    int n = static_cast<int>(loop.size());
    for (int k = 0; k < n; ++k) {
      int prev = loop[(k + n - 1) % n], next = loop[(k + 1) % n];
      ImVec T = normalized(mesh.positions[next] - mesh.positions[prev]);
      ImVec N = normalized(vnormal[loop[k]]);
      ImVec TxN = cross(T, N);
      if (TxN.norm() < 1e-8)
        throw Error(ErrorCode::DegenerateFrame, "collinear tangent and normal at boundary vertex");
      Ts.push_back(T);
      Ns.push_back(N);
      Bs.push_back(normalized(TxN));
    }
    frame.T.push_back(std::move(Ts));
    frame.N.push_back(std::move(Ns));
    frame.B.push_back(std::move(Bs));
  }
  return frame;
}

void validate(const TriMesh& mesh) {
  double scale = mesh.bbox_diameter();
  for (int f = 0; f < mesh.n_faces(); ++f) {
    for (int v : mesh.faces[f])
      if (v < 0 || v >= mesh.n_vertices())
        throw Error(ErrorCode::ParseError, "face index out of range");
    if (face_area(mesh, f) <= 1e-14 * scale * scale)
      throw Error(ErrorCode::DegenerateFace, "degenerate face " + std::to_string(f));
  }
  auto loops = boundary_loops(mesh.positions, mesh.faces);
  if (loops != mesh.boundary_loops)
    throw Error(ErrorCode::NonManifold, "stored boundary loops disagree with connectivity");
}

TriMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  TriMesh mesh;
  mesh.tag = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string kind;
    if (!(ss >> kind)) continue;
    if (kind == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z))
        throw Error(ErrorCode::ParseError, "bad vertex at line " + std::to_string(lineno));
      mesh.positions.push_back({x, y, z});
    } else if (kind == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        // accept v, v/vt, v/vt/vn, v//vn forms; only the vertex index is used
        size_t slash = tok.find('/');
        std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
        int v = 0;
        try {
          v = std::stoi(head);
        } catch (...) {
          throw Error(ErrorCode::ParseError, "bad face token at line " + std::to_string(lineno));
        }
        if (v <= 0 || v > static_cast<int>(mesh.positions.size()))
          throw Error(ErrorCode::ParseError, "face index out of range at line " + std::to_string(lineno));
        idx.push_back(v - 1);
      }
      if (idx.size() != 3)
        throw Error(ErrorCode::NonTriangleFace,
                    "face with " + std::to_string(idx.size()) + " vertices at line " + std::to_string(lineno));
      mesh.faces.push_back({idx[0], idx[1], idx[2]});
    }
  }
  if (mesh.positions.empty() || mesh.faces.empty())
    throw Error(ErrorCode::ParseError, "no triangle mesh in " + path);
  mesh.boundary_loops = boundary_loops(mesh.positions, mesh.faces);
  return mesh;
}

void write_obj(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  char buf[128];
  for (const auto& p : mesh.positions) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", p.x, p.y, p.z);
    out << buf;
  }
  for (const auto& f : mesh.faces)
    out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

void write_frame_json(const TriMesh& mesh, const std::string& path) {
  if (!mesh.frame) throw Error(ErrorCode::MissingFrame, "mesh carries no analytic frame");
  nlohmann::json j;
  j["loops"] = mesh.boundary_loops;
  nlohmann::json frames = nlohmann::json::array();
  for (size_t l = 0; l < mesh.boundary_loops.size(); ++l) {
    for (size_t k = 0; k < mesh.boundary_loops[l].size(); ++k) {
      auto vec = [](const ImVec& v) { return nlohmann::json::array({v.x, v.y, v.z}); };
      frames.push_back(nlohmann::json::array({vec(mesh.frame->T[l][k]),
                                              vec(mesh.frame->N[l][k]),
                                              vec(mesh.frame->B[l][k])}));
    }
  }
  j["boundary_frame"] = std::move(frames);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace diraclab
