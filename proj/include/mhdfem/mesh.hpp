#pragma once

#include "mhdfem/types.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

namespace mhdfem {

/// Axis-aligned box with per-axis subdivision counts.
template <int Dim>
struct BoxSpec {
  Vec<Dim> lower = -Vec<Dim>::Ones();
  Vec<Dim> upper = Vec<Dim>::Ones();
  std::array<int, Dim> subdivisions;

  BoxSpec() { subdivisions.fill(1); }
  BoxSpec(const Vec<Dim>& lo, const Vec<Dim>& hi, std::array<int, Dim> sub)
      : lower(lo), upper(hi), subdivisions(sub) {}

  void validate() const {
    for (int a = 0; a < Dim; ++a) {
      if (!(upper[a] > lower[a]))
        throw ConfigError("box spec: upper must exceed lower on every axis");
      if (subdivisions[a] < 1)
        throw ConfigError("box spec: subdivisions must be positive");
    }
  }
};

/// Conforming simplicial mesh of a box. Immutable after construction.
///
/// Conventions:
///  - facet and edge vertex tuples are stored with ascending vertex indices,
///    which fixes a global orientation shared by all adjacent cells;
///  - the facet normal points from the first adjacent cell to the second,
///    and outward on the boundary;
///  - local facet i of a cell is the one opposite local vertex i.
template <int Dim>
struct Mesh {
  static constexpr int dim = Dim;

  std::vector<Vec<Dim>> vertices;
  std::vector<std::array<int, Dim + 1>> cells;  // positively oriented

  std::vector<std::array<int, Dim>> facets;
  std::vector<std::array<int, 2>> facet_cells;  // second entry -1 on boundary
  std::vector<Vec<Dim>> facet_normal;           // unit length
  std::vector<double> facet_area;
  std::vector<std::array<int, Dim + 1>> cell_facets;
  // +1 where the stored facet normal is outward of the cell, else -1.
  std::vector<std::array<std::int8_t, Dim + 1>> cell_facet_sign;

  std::vector<double> cell_volume;
  std::vector<double> cell_diameter;

  // Edge entities carry the 3D Nedelec dofs. In 2D edges coincide with
  // facets and these stay empty.
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 6>> cell_edges;

  std::vector<std::uint8_t> facet_on_boundary;
  std::vector<std::uint8_t> edge_on_boundary;
  std::vector<std::uint8_t> vertex_on_boundary;

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_facets() const { return static_cast<int>(facets.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  int n_interior_facets() const {
    int n = 0;
    for (auto b : facet_on_boundary) n += (b == 0);
    return n;
  }

  std::array<Vec<Dim>, Dim + 1> cell_vertices(int c) const {
    std::array<Vec<Dim>, Dim + 1> v;
    for (int i = 0; i <= Dim; ++i) v[i] = vertices[cells[c][i]];
    return v;
  }

  Vec<Dim> cell_centroid(int c) const {
    Vec<Dim> x = Vec<Dim>::Zero();
    for (int i = 0; i <= Dim; ++i) x += vertices[cells[c][i]];
    return x / (Dim + 1);
  }

  Vec<Dim> facet_centroid(int f) const {
    Vec<Dim> x = Vec<Dim>::Zero();
    for (int i = 0; i < Dim; ++i) x += vertices[facets[f][i]];
    return x / Dim;
  }

  double max_diameter() const {
    double h = 0;
    for (double d : cell_diameter) h = std::max(h, d);
    return h;
  }
};

template <int Dim>
struct InteriorFacet {
  int facet;
  std::array<int, 2> cells;
  Vec<Dim> normal;
};

namespace detail {

template <int Dim>
double signed_volume(const std::array<Vec<Dim>, Dim + 1>& v) {
  Eigen::Matrix<double, Dim, Dim> T;
  for (int j = 0; j < Dim; ++j) T.col(j) = v[j + 1] - v[0];
  double f = 1;
  for (int i = 2; i <= Dim; ++i) f *= i;
  return T.determinant() / f;
}

template <int Dim>
void finalize_connectivity(Mesh<Dim>& m) {
  const int nc = m.n_cells();

  // Orient every cell positively so signed volumes sum to the box volume.
  for (auto& cell : m.cells) {
    std::array<Vec<Dim>, Dim + 1> v;
    for (int i = 0; i <= Dim; ++i) v[i] = m.vertices[cell[i]];
    if (signed_volume<Dim>(v) < 0) std::swap(cell[Dim - 1], cell[Dim]);
  }

  m.cell_volume.resize(nc);
  m.cell_diameter.resize(nc);
  for (int c = 0; c < nc; ++c) {
    auto v = m.cell_vertices(c);
    m.cell_volume[c] = signed_volume<Dim>(v);
    double h = 0;
    for (int i = 0; i <= Dim; ++i)
      for (int j = i + 1; j <= Dim; ++j) h = std::max(h, (v[i] - v[j]).norm());
    m.cell_diameter[c] = h;
  }

  // Facets, keyed by their sorted vertex tuple.
  std::map<std::array<int, Dim>, int> facet_id;
  m.cell_facets.resize(nc);
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i <= Dim; ++i) {
      std::array<int, Dim> key;
      int p = 0;
      for (int j = 0; j <= Dim; ++j)
        if (j != i) key[p++] = m.cells[c][j];
      std::sort(key.begin(), key.end());
      auto it = facet_id.find(key);
      int f;
      if (it == facet_id.end()) {
        f = static_cast<int>(m.facets.size());
        facet_id.emplace(key, f);
        m.facets.push_back(key);
        m.facet_cells.push_back({c, -1});
      } else {
        f = it->second;
        m.facet_cells[f][1] = c;
      }
      m.cell_facets[c][i] = f;
    }
  }

  const int nf = m.n_facets();
  // Normal points from the first adjacent cell to the second; choose the
  // first cell as the lower index so the convention is reproducible.
  for (int f = 0; f < nf; ++f) {
    auto& fc = m.facet_cells[f];
    if (fc[1] >= 0 && fc[1] < fc[0]) std::swap(fc[0], fc[1]);
  }

  m.facet_normal.resize(nf);
  m.facet_area.resize(nf);
  m.facet_on_boundary.assign(nf, 0);
  for (int f = 0; f < nf; ++f) {
    Vec<Dim> n;
    if constexpr (Dim == 2) {
      Vec<2> t = m.vertices[m.facets[f][1]] - m.vertices[m.facets[f][0]];
      m.facet_area[f] = t.norm();
      n = Vec<2>(t[1], -t[0]) / m.facet_area[f];
    } else {
      Vec<3> a = m.vertices[m.facets[f][1]] - m.vertices[m.facets[f][0]];
      Vec<3> b = m.vertices[m.facets[f][2]] - m.vertices[m.facets[f][0]];
      Vec<3> cr = a.cross(b);
      m.facet_area[f] = 0.5 * cr.norm();
      n = cr.normalized();
    }
    if (n.dot(m.facet_centroid(f) - m.cell_centroid(m.facet_cells[f][0])) < 0)
      n = -n;
    m.facet_normal[f] = n;
    m.facet_on_boundary[f] = (m.facet_cells[f][1] < 0);
  }

  m.cell_facet_sign.resize(nc);
  for (int c = 0; c < nc; ++c)
    for (int i = 0; i <= Dim; ++i) {
      int f = m.cell_facets[c][i];
      m.cell_facet_sign[c][i] = (m.facet_cells[f][0] == c) ? 1 : -1;
    }

  m.vertex_on_boundary.assign(m.n_vertices(), 0);
  for (int f = 0; f < nf; ++f)
    if (m.facet_on_boundary[f])
      for (int v : m.facets[f]) m.vertex_on_boundary[v] = 1;

  if constexpr (Dim == 3) {
    std::map<std::array<int, 2>, int> edge_id;
    static constexpr int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                        {1, 2}, {1, 3}, {2, 3}};
    m.cell_edges.resize(nc);
    for (int c = 0; c < nc; ++c) {
      for (int e = 0; e < 6; ++e) {
        std::array<int, 2> key = {m.cells[c][pairs[e][0]],
                                  m.cells[c][pairs[e][1]]};
        if (key[0] > key[1]) std::swap(key[0], key[1]);
        auto it = edge_id.find(key);
        int id;
        if (it == edge_id.end()) {
          id = static_cast<int>(m.edges.size());
          edge_id.emplace(key, id);
          m.edges.push_back(key);
        } else {
          id = it->second;
        }
        m.cell_edges[c][e] = id;
      }
    }
    m.edge_on_boundary.assign(m.n_edges(), 0);
    for (int f = 0; f < nf; ++f) {
      if (!m.facet_on_boundary[f]) continue;
      const auto& fv = m.facets[f];
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          std::array<int, 2> key = {fv[i], fv[j]};
          if (key[0] > key[1]) std::swap(key[0], key[1]);
          m.edge_on_boundary[edge_id.at(key)] = 1;
        }
    }
  }
}

}  // namespace detail

template <int Dim>
Mesh<Dim> build_box_mesh(const BoxSpec<Dim>& spec) {
  spec.validate();
  Mesh<Dim> m;

  std::array<int, Dim> n = spec.subdivisions;
  std::array<double, Dim> h;
  for (int a = 0; a < Dim; ++a)
    h[a] = (spec.upper[a] - spec.lower[a]) / n[a];

  if constexpr (Dim == 2) {
    const int nvx = n[0] + 1;
    auto vid = [&](int i, int j) { return j * nvx + i; };
    for (int j = 0; j <= n[1]; ++j)
      for (int i = 0; i <= n[0]; ++i)
        m.vertices.push_back(
            Vec<2>(spec.lower[0] + i * h[0], spec.lower[1] + j * h[1]));
    // Each grid square is split along the diagonal from its lower-left to
    // its upper-right corner.
    for (int j = 0; j < n[1]; ++j)
      for (int i = 0; i < n[0]; ++i) {
        int v00 = vid(i, j), v10 = vid(i + 1, j);
        int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
        m.cells.push_back({v00, v10, v11});
        m.cells.push_back({v00, v11, v01});
      }
  } else {
    const int nvx = n[0] + 1, nvy = n[1] + 1;
    auto vid = [&](int i, int j, int k) { return (k * nvy + j) * nvx + i; };
    for (int k = 0; k <= n[2]; ++k)
      for (int j = 0; j <= n[1]; ++j)
        for (int i = 0; i <= n[0]; ++i)
          m.vertices.push_back(Vec<3>(spec.lower[0] + i * h[0],
                                      spec.lower[1] + j * h[1],
                                      spec.lower[2] + k * h[2]));
    // Kuhn subdivision: one tetrahedron per permutation of the axes, all
    // sharing the main diagonal of the cube. Translation-invariant, hence
    // conforming across neighboring cubes.
    static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                        {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int k = 0; k < n[2]; ++k)
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i)
          for (const auto& p : perms) {
            std::array<int, 3> q = {i, j, k};
            std::array<int, 4> tet;
            tet[0] = vid(q[0], q[1], q[2]);
            for (int step = 0; step < 3; ++step) {
              q[p[step]] += 1;
              tet[step + 1] = vid(q[0], q[1], q[2]);
            }
            m.cells.push_back(tet);
          }
  }

  detail::finalize_connectivity(m);
  return m;
}

/// All interior facets with their adjacent cell pair and stored normal.
template <int Dim>
std::vector<InteriorFacet<Dim>> interior_facets(const Mesh<Dim>& mesh) {
  std::vector<InteriorFacet<Dim>> out;
  out.reserve(mesh.n_interior_facets());
  for (int f = 0; f < mesh.n_facets(); ++f)
    if (!mesh.facet_on_boundary[f])
      out.push_back({f, mesh.facet_cells[f], mesh.facet_normal[f]});
  return out;
}

}  // namespace mhdfem
