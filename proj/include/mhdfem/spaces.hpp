#pragma once

#include "mhdfem/mesh.hpp"
#include "mhdfem/quadrature.hpp"

#include <functional>

namespace mhdfem {

/// Lowest-order element families.
///
///  RT0  - facet-based H(div) elements; dof = normal flux through the facet
///         with respect to the globally stored normal.
///  NED0 - edge elements; dof = circulation along the edge in ascending
///         vertex order (in 2D edges coincide with facets).
///  DG0  - one value per cell.
///  CG1  - continuous piecewise linear scalars; dof = vertex value. Serves
///         as the scalar curl space in 2D.
enum class Family { RT0, NED0, DG0, CG1 };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::RT0: return "RT0";
    case Family::NED0: return "NED0";
    case Family::DG0: return "DG0";
    case Family::CG1: return "CG1";
  }
  return "?";
}

template <int Dim>
struct Space {
  Family family;
  const Mesh<Dim>* mesh = nullptr;
  bool constrained = true;  // homogeneous essential boundary conditions
  int n_dofs = 0;
  std::vector<int> entity_to_dof;  // -1 where constrained
  std::vector<int> dof_to_entity;

  int n_entities() const { return static_cast<int>(entity_to_dof.size()); }
  int dof(int entity) const { return entity_to_dof[entity]; }
};

namespace detail {

template <int Dim>
int space_entity_count(const Mesh<Dim>& m, Family f) {
  switch (f) {
    case Family::RT0: return m.n_facets();
    case Family::NED0: return Dim == 2 ? m.n_facets() : m.n_edges();
    case Family::DG0: return m.n_cells();
    case Family::CG1: return m.n_vertices();
  }
  return 0;
}

template <int Dim>
bool entity_on_boundary(const Mesh<Dim>& m, Family f, int e) {
  switch (f) {
    case Family::RT0: return m.facet_on_boundary[e];
    case Family::NED0:
      return Dim == 2 ? m.facet_on_boundary[e] != 0
                      : m.edge_on_boundary[e] != 0;
    case Family::DG0: return false;
    case Family::CG1: return m.vertex_on_boundary[e];
  }
  return false;
}

}  // namespace detail

/// Boundary dofs of constrained spaces are eliminated from the numbering;
/// the associated basis coefficients are implicitly zero.
template <int Dim>
Space<Dim> make_space(const Mesh<Dim>& mesh, Family family,
                      bool constrained = true) {
  Space<Dim> s;
  s.family = family;
  s.mesh = &mesh;
  s.constrained = constrained;
  const int ne = detail::space_entity_count(mesh, family);
  s.entity_to_dof.assign(ne, -1);
  for (int e = 0; e < ne; ++e) {
    if (constrained && detail::entity_on_boundary(mesh, family, e)) continue;
    s.entity_to_dof[e] = s.n_dofs;
    s.dof_to_entity.push_back(e);
    ++s.n_dofs;
  }
  return s;
}

template <int Dim>
struct Field {
  const Space<Dim>* space = nullptr;
  VectorXd coeffs;

  Field() = default;
  explicit Field(const Space<Dim>& s)
      : space(&s), coeffs(VectorXd::Zero(s.n_dofs)) {}
  Field(const Space<Dim>& s, VectorXd c) : space(&s), coeffs(std::move(c)) {}
};

/// Affine geometry of one cell: barycentric coordinates and their gradients.
template <int Dim>
struct CellFrame {
  std::array<Vec<Dim>, Dim + 1> verts;
  std::array<Vec<Dim>, Dim + 1> grad_lambda;
  double volume;

  CellFrame(const Mesh<Dim>& mesh, int c) {
    verts = mesh.cell_vertices(c);
    volume = mesh.cell_volume[c];
    Eigen::Matrix<double, Dim, Dim> T;
    for (int j = 0; j < Dim; ++j) T.col(j) = verts[j + 1] - verts[0];
    Eigen::Matrix<double, Dim, Dim> Tinv = T.inverse();
    grad_lambda[0] = Vec<Dim>::Zero();
    for (int i = 1; i <= Dim; ++i) {
      grad_lambda[i] = Tinv.row(i - 1).transpose();
      grad_lambda[0] -= grad_lambda[i];
    }
  }

  double lambda(int i, const Vec<Dim>& x) const {
    return (i == 0 ? 1.0 : 0.0) + grad_lambda[i].dot(x - verts[0]);
  }

  bool contains(const Vec<Dim>& x, double tol = 1e-10) const {
    for (int i = 0; i <= Dim; ++i) {
      double l = lambda(i, x);
      if (l < -tol || l > 1.0 + tol) return false;
    }
    return true;
  }
};

/// Number of local basis functions of a family on one cell.
template <int Dim>
constexpr int n_local_dofs(Family f) {
  switch (f) {
    case Family::RT0: return Dim + 1;
    case Family::NED0: return Dim == 2 ? 3 : 6;
    case Family::DG0: return 1;
    case Family::CG1: return Dim + 1;
  }
  return 0;
}

/// Global entity carrying local dof `i` of family `f` on cell `c`.
template <int Dim>
int local_entity(const Mesh<Dim>& mesh, Family f, int c, int i) {
  switch (f) {
    case Family::RT0: return mesh.cell_facets[c][i];
    case Family::NED0:
      if constexpr (Dim == 2)
        return mesh.cell_facets[c][i];
      else
        return mesh.cell_edges[c][i];
    case Family::DG0: return c;
    case Family::CG1: return mesh.cells[c][i];
  }
  return -1;
}

namespace detail {

// Local vertex indices (ascending global id) of the edge carrying Nedelec
// local dof i. In 2D the edge is the facet opposite local vertex i.
template <int Dim>
std::array<int, 2> ned_edge_local_vertices(const Mesh<Dim>& mesh, int c,
                                           int i) {
  if constexpr (Dim == 2) {
    std::array<int, 2> lv;
    int p = 0;
    for (int j = 0; j < 3; ++j)
      if (j != i) lv[p++] = j;
    if (mesh.cells[c][lv[0]] > mesh.cells[c][lv[1]]) std::swap(lv[0], lv[1]);
    return lv;
  } else {
    static constexpr int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3},
                                        {1, 2}, {1, 3}, {2, 3}};
    std::array<int, 2> lv = {pairs[i][0], pairs[i][1]};
    if (mesh.cells[c][lv[0]] > mesh.cells[c][lv[1]]) std::swap(lv[0], lv[1]);
    return lv;
  }
}

}  // namespace detail

/// Value of vector-valued local basis function i at x.
///  RT0:  sign * (x - p_i) / (Dim |K|), unit flux through its facet.
///  NED0: Whitney edge function, unit circulation along its (ascending) edge.
template <int Dim>
Vec<Dim> basis_vector(const Mesh<Dim>& mesh, const CellFrame<Dim>& fr,
                      Family f, int c, int i, const Vec<Dim>& x) {
  if (f == Family::RT0) {
    double s = mesh.cell_facet_sign[c][i];
    return s / (Dim * fr.volume) * (x - fr.verts[i]);
  }
  auto lv = detail::ned_edge_local_vertices(mesh, c, i);
  return fr.lambda(lv[0], x) * fr.grad_lambda[lv[1]] -
         fr.lambda(lv[1], x) * fr.grad_lambda[lv[0]];
}

template <int Dim>
double basis_scalar(const CellFrame<Dim>& fr, Family f, int i,
                    const Vec<Dim>& x) {
  return f == Family::DG0 ? 1.0 : fr.lambda(i, x);
}

template <int Dim>
bool is_vector_family(Family f) {
  return f == Family::RT0 || f == Family::NED0;
}

/// Evaluate a vector-valued field (RT0 or NED0) inside cell c.
template <int Dim>
Vec<Dim> eval_vector(const Field<Dim>& u, int c, const Vec<Dim>& x) {
  const Space<Dim>& sp = *u.space;
  const Mesh<Dim>& mesh = *sp.mesh;
  CellFrame<Dim> fr(mesh, c);
  if (!fr.contains(x)) throw std::domain_error("eval: point outside cell");
  Vec<Dim> val = Vec<Dim>::Zero();
  for (int i = 0; i < n_local_dofs<Dim>(sp.family); ++i) {
    int dof = sp.dof(local_entity(mesh, sp.family, c, i));
    if (dof >= 0)
      val += u.coeffs[dof] * basis_vector(mesh, fr, sp.family, c, i, x);
  }
  return val;
}

/// Evaluate a scalar field (DG0 or CG1) inside cell c.
template <int Dim>
double eval_scalar(const Field<Dim>& u, int c, const Vec<Dim>& x) {
  const Space<Dim>& sp = *u.space;
  const Mesh<Dim>& mesh = *sp.mesh;
  if (sp.family == Family::DG0) {
    int dof = sp.dof(c);
    return dof >= 0 ? u.coeffs[dof] : 0.0;
  }
  CellFrame<Dim> fr(mesh, c);
  if (!fr.contains(x)) throw std::domain_error("eval: point outside cell");
  double val = 0;
  for (int i = 0; i <= Dim; ++i) {
    int dof = sp.dof(mesh.cells[c][i]);
    if (dof >= 0) val += u.coeffs[dof] * fr.lambda(i, x);
  }
  return val;
}

/// Value of a curl-space field: CG1 scalar in 2D, NED0 vector in 3D.
template <int Dim>
CurlVal<Dim> eval_curl_space(const Field<Dim>& w, int c, const Vec<Dim>& x) {
  if constexpr (Dim == 2) {
    return eval_scalar(w, c, x);
  } else {
    return eval_vector(w, c, x);
  }
}

/// Curl of a curl-space field; constant on each cell. 2D: the rotated
/// gradient (d_y f, -d_x f) of the CG1 scalar. 3D: curl of the NED0 field.
template <int Dim>
Vec<Dim> eval_curl(const Field<Dim>& w, int c) {
  const Space<Dim>& sp = *w.space;
  const Mesh<Dim>& mesh = *sp.mesh;
  CellFrame<Dim> fr(mesh, c);
  Vec<Dim> val = Vec<Dim>::Zero();
  if constexpr (Dim == 2) {
    for (int i = 0; i <= 2; ++i) {
      int dof = sp.dof(mesh.cells[c][i]);
      if (dof < 0) continue;
      const Vec<2>& g = fr.grad_lambda[i];
      val += w.coeffs[dof] * Vec<2>(g[1], -g[0]);
    }
  } else {
    for (int i = 0; i < 6; ++i) {
      int dof = sp.dof(mesh.cell_edges[c][i]);
      if (dof < 0) continue;
      auto lv = detail::ned_edge_local_vertices(mesh, c, i);
      val += w.coeffs[dof] * 2.0 *
             fr.grad_lambda[lv[0]].cross(fr.grad_lambda[lv[1]]);
    }
  }
  return val;
}

/// Cellwise-constant divergence of an RT0 field: the signed flux balance.
template <int Dim>
double div_value(const Field<Dim>& u, int c) {
  const Space<Dim>& sp = *u.space;
  const Mesh<Dim>& mesh = *sp.mesh;
  double s = 0;
  for (int i = 0; i <= Dim; ++i) {
    int dof = sp.dof(mesh.cell_facets[c][i]);
    if (dof >= 0) s += mesh.cell_facet_sign[c][i] * u.coeffs[dof];
  }
  return s / mesh.cell_volume[c];
}

/// Canonical interpolation onto a space from a pointwise evaluator.
/// RT0: facet fluxes; NED0: edge circulations; DG0: cell averages;
/// CG1: vertex values. Sub-simplex integrals use the given quadrature degree.
template <int Dim, class F>
Field<Dim> interpolate(const Space<Dim>& sp, F&& fn, int degree = 9) {
  using Ret = std::invoke_result_t<F, Vec<Dim>>;
  constexpr bool scalar_fn = std::is_convertible_v<Ret, double>;
  const Mesh<Dim>& mesh = *sp.mesh;
  Field<Dim> out(sp);
  if constexpr (!scalar_fn) {
    if (sp.family == Family::RT0) {
      const auto& rule = simplex_rule<Dim - 1>(degree);
      for (int d = 0; d < sp.n_dofs; ++d) {
        int f = sp.dof_to_entity[d];
        std::array<Vec<Dim>, Dim> fv;
        for (int i = 0; i < Dim; ++i) fv[i] = mesh.vertices[mesh.facets[f][i]];
        double flux = 0;
        for (int q = 0; q < rule.size(); ++q) {
          Vec<Dim> x = Vec<Dim>::Zero();
          for (int i = 0; i < Dim; ++i) x += rule.bary[q][i] * fv[i];
          flux += rule.weight[q] * fn(x).dot(mesh.facet_normal[f]);
        }
        out.coeffs[d] = flux * mesh.facet_area[f];
      }
      return out;
    }
    if (sp.family == Family::NED0) {
      const auto& rule = simplex_rule<1>(degree);
      for (int d = 0; d < sp.n_dofs; ++d) {
        int e = sp.dof_to_entity[d];
        Vec<Dim> a, b;
        if constexpr (Dim == 2) {
          a = mesh.vertices[mesh.facets[e][0]];
          b = mesh.vertices[mesh.facets[e][1]];
        } else {
          a = mesh.vertices[mesh.edges[e][0]];
          b = mesh.vertices[mesh.edges[e][1]];
        }
        Vec<Dim> t = b - a;  // circulation in ascending vertex order
        double circ = 0;
        for (int q = 0; q < rule.size(); ++q) {
          Vec<Dim> x = rule.bary[q][0] * a + rule.bary[q][1] * b;
          circ += rule.weight[q] * fn(x).dot(t);
        }
        out.coeffs[d] = circ;
      }
      return out;
    }
  } else {
    if (sp.family == Family::DG0) {
      const auto& rule = simplex_rule<Dim>(degree);
      for (int c = 0; c < mesh.n_cells(); ++c) {
        auto v = mesh.cell_vertices(c);
        double avg = 0;
        for (int q = 0; q < rule.size(); ++q)
          avg += rule.weight[q] * fn(bary_to_point<Dim, Dim>(rule.bary[q], v));
        out.coeffs[sp.dof(c)] = avg;
      }
      return out;
    }
    if (sp.family == Family::CG1) {
      for (int d = 0; d < sp.n_dofs; ++d)
        out.coeffs[d] = fn(mesh.vertices[sp.dof_to_entity[d]]);
      return out;
    }
  }
  throw SolverError("interpolate: evaluator kind does not match space");
}

}  // namespace mhdfem
