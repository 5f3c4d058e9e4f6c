#pragma once

#include "mhdfem/linalg.hpp"
#include "mhdfem/spaces.hpp"

namespace mhdfem {

/// Mass matrix of a space, optionally weighted by a cellwise-constant DG0
/// density. All lowest-order integrands are quadratic, so the degree-3 rule
/// is exact.
template <int Dim>
SparseMatrix mass_matrix(const Space<Dim>& sp,
                         const Field<Dim>* dg0_weight = nullptr) {
  const Mesh<Dim>& mesh = *sp.mesh;
  std::vector<Triplet> trip;
  if (sp.family == Family::DG0) {
    for (int d = 0; d < sp.n_dofs; ++d) {
      int c = sp.dof_to_entity[d];
      double w = dg0_weight ? eval_scalar(*dg0_weight, c, Vec<Dim>()) : 1.0;
      trip.emplace_back(d, d, w * mesh.cell_volume[c]);
    }
    return assemble(sp.n_dofs, sp.n_dofs, trip);
  }

  const auto& rule = simplex_rule<Dim>(3);
  const int nl = n_local_dofs<Dim>(sp.family);
  const bool vec = is_vector_family<Dim>(sp.family);
  std::vector<int> dofs(nl);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellFrame<Dim> fr(mesh, c);
    double w_cell = 1.0;
    if (dg0_weight) {
      int wd = dg0_weight->space->dof(c);
      w_cell = wd >= 0 ? dg0_weight->coeffs[wd] : 0.0;
    }
    for (int i = 0; i < nl; ++i)
      dofs[i] = sp.dof(local_entity(mesh, sp.family, c, i));
    for (int q = 0; q < rule.size(); ++q) {
      Vec<Dim> x = bary_to_point<Dim, Dim>(rule.bary[q], fr.verts);
      double wq = rule.weight[q] * fr.volume * w_cell;
      for (int i = 0; i < nl; ++i) {
        if (dofs[i] < 0) continue;
        for (int j = 0; j < nl; ++j) {
          if (dofs[j] < 0) continue;
          double v = vec ? basis_vector(mesh, fr, sp.family, c, i, x)
                               .dot(basis_vector(mesh, fr, sp.family, c, j, x))
                         : basis_scalar(fr, sp.family, i, x) *
                               basis_scalar(fr, sp.family, j, x);
          trip.emplace_back(dofs[i], dofs[j], wq * v);
        }
      }
    }
  }
  return assemble(sp.n_dofs, sp.n_dofs, trip);
}

/// Mixed mass <psi_i, phi_j> between two vector-valued spaces on one mesh.
template <int Dim>
SparseMatrix mixed_mass(const Space<Dim>& rows, const Space<Dim>& cols) {
  const Mesh<Dim>& mesh = *rows.mesh;
  const auto& rule = simplex_rule<Dim>(3);
  const int nr = n_local_dofs<Dim>(rows.family);
  const int nc = n_local_dofs<Dim>(cols.family);
  std::vector<Triplet> trip;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellFrame<Dim> fr(mesh, c);
    for (int q = 0; q < rule.size(); ++q) {
      Vec<Dim> x = bary_to_point<Dim, Dim>(rule.bary[q], fr.verts);
      double wq = rule.weight[q] * fr.volume;
      for (int i = 0; i < nr; ++i) {
        int di = rows.dof(local_entity(mesh, rows.family, c, i));
        if (di < 0) continue;
        Vec<Dim> bi = basis_vector(mesh, fr, rows.family, c, i, x);
        for (int j = 0; j < nc; ++j) {
          int dj = cols.dof(local_entity(mesh, cols.family, c, j));
          if (dj < 0) continue;
          trip.emplace_back(di, dj,
                            wq * bi.dot(basis_vector(mesh, fr, cols.family,
                                                     c, j, x)));
        }
      }
    }
  }
  return assemble(rows.n_dofs, cols.n_dofs, trip);
}

/// Divergence constraint matrix D with D[c, f] = +-1: the signed flux
/// balance, so that q^T D u = <div u, q> for DG0 test functions q. Exact.
template <int Dim>
SparseMatrix div_matrix(const Space<Dim>& rt) {
  const Mesh<Dim>& mesh = *rt.mesh;
  std::vector<Triplet> trip;
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int i = 0; i <= Dim; ++i) {
      int dof = rt.dof(mesh.cell_facets[c][i]);
      if (dof >= 0)
        trip.emplace_back(c, dof,
                          static_cast<double>(mesh.cell_facet_sign[c][i]));
    }
  return assemble(mesh.n_cells(), rt.n_dofs, trip);
}

/// Coefficient map of the curl from the curl space into RT0: C z holds the
/// facet fluxes of curl z. By Stokes' theorem the flux through a facet is
/// the circulation around its boundary, so the entries are +-1 and the
/// inclusion curl(curl space) subset RT0 holds exactly.
template <int Dim>
SparseMatrix curl_matrix(const Space<Dim>& curl_sp, const Space<Dim>& rt) {
  const Mesh<Dim>& mesh = *rt.mesh;
  std::vector<Triplet> trip;
  if constexpr (Dim == 2) {
    // Flux of the rotated gradient through an edge is the difference of the
    // scalar's endpoint values taken along the direction rot90(normal).
    for (int d = 0; d < rt.n_dofs; ++d) {
      int f = rt.dof_to_entity[d];
      int a = mesh.facets[f][0], b = mesh.facets[f][1];
      const Vec<2>& n = mesh.facet_normal[f];
      Vec<2> t(-n[1], n[0]);
      double s = (mesh.vertices[b] - mesh.vertices[a]).dot(t) > 0 ? 1.0 : -1.0;
      int da = curl_sp.dof(a), db = curl_sp.dof(b);
      if (db >= 0) trip.emplace_back(d, db, s);
      if (da >= 0) trip.emplace_back(d, da, -s);
    }
  } else {
    std::map<std::array<int, 2>, int> edge_id;
    for (int e = 0; e < mesh.n_edges(); ++e) edge_id.emplace(mesh.edges[e], e);
    for (int d = 0; d < rt.n_dofs; ++d) {
      int f = rt.dof_to_entity[d];
      const auto& fv = mesh.facets[f];
      Vec<3> ref = (mesh.vertices[fv[1]] - mesh.vertices[fv[0]])
                       .cross(mesh.vertices[fv[2]] - mesh.vertices[fv[0]]);
      // Traverse the facet boundary with the right-hand rule around the
      // stored normal.
      bool forward = ref.dot(mesh.facet_normal[f]) > 0;
      std::array<int, 3> loop = forward
                                    ? std::array<int, 3>{fv[0], fv[1], fv[2]}
                                    : std::array<int, 3>{fv[0], fv[2], fv[1]};
      for (int k = 0; k < 3; ++k) {
        int a = loop[k], b = loop[(k + 1) % 3];
        std::array<int, 2> key = {std::min(a, b), std::max(a, b)};
        int dof = curl_sp.dof(edge_id.at(key));
        if (dof >= 0) trip.emplace_back(d, dof, a < b ? 1.0 : -1.0);
      }
    }
  }
  return assemble(rt.n_dofs, curl_sp.n_dofs, trip);
}

/// Coefficient map of the gradient from CG1 into the edge-element space:
/// the circulation of a gradient along an edge is the difference of the
/// endpoint values. Exact; curl_matrix * gradient_matrix = 0.
template <int Dim>
SparseMatrix gradient_matrix(const Space<Dim>& cg, const Space<Dim>& ned) {
  const Mesh<Dim>& mesh = *cg.mesh;
  std::vector<Triplet> trip;
  for (int d = 0; d < ned.n_dofs; ++d) {
    int e = ned.dof_to_entity[d];
    int a, b;
    if constexpr (Dim == 2) {
      a = mesh.facets[e][0];
      b = mesh.facets[e][1];
    } else {
      a = mesh.edges[e][0];
      b = mesh.edges[e][1];
    }
    int da = cg.dof(a), db = cg.dof(b);
    if (db >= 0) trip.emplace_back(d, db, 1.0);
    if (da >= 0) trip.emplace_back(d, da, -1.0);
  }
  return assemble(ned.n_dofs, cg.n_dofs, trip);
}

/// Right-hand side <fn, basis_i> for an analytic integrand. The evaluator
/// must be scalar-valued for DG0/CG1 and vector-valued for RT0/NED0.
template <int Dim, class F>
VectorXd load_vector(const Space<Dim>& sp, F&& fn, int degree = 9) {
  using Ret = std::invoke_result_t<F, Vec<Dim>>;
  constexpr bool scalar_fn = std::is_convertible_v<Ret, double>;
  if (scalar_fn == is_vector_family<Dim>(sp.family))
    throw SolverError("load_vector: evaluator kind does not match space");
  const Mesh<Dim>& mesh = *sp.mesh;
  const auto& rule = simplex_rule<Dim>(degree);
  const int nl = n_local_dofs<Dim>(sp.family);
  VectorXd rhs = VectorXd::Zero(sp.n_dofs);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    CellFrame<Dim> fr(mesh, c);
    for (int q = 0; q < rule.size(); ++q) {
      Vec<Dim> x = bary_to_point<Dim, Dim>(rule.bary[q], fr.verts);
      double wq = rule.weight[q] * fr.volume;
      auto fx = fn(x);
      for (int i = 0; i < nl; ++i) {
        int dof = sp.dof(local_entity(mesh, sp.family, c, i));
        if (dof < 0) continue;
        if constexpr (scalar_fn)
          rhs[dof] += wq * fx * basis_scalar(fr, sp.family, i, x);
        else
          rhs[dof] += wq * fx.dot(basis_vector(mesh, fr, sp.family, c, i, x));
      }
    }
  }
  return rhs;
}

/// L2-orthogonal projection onto a space: the unique field with
/// <f - Pf, phi> = 0 for every basis function phi.
template <int Dim, class F>
Field<Dim> project_l2(const Space<Dim>& sp, F&& fn, int degree = 9) {
  VectorXd rhs = load_vector(sp, fn, degree);
  if (sp.family == Family::DG0) {
    Field<Dim> out(sp);
    for (int d = 0; d < sp.n_dofs; ++d)
      out.coeffs[d] = rhs[d] / sp.mesh->cell_volume[sp.dof_to_entity[d]];
    return out;
  }
  FactorHandle M = factorize(mass_matrix(sp),
                             std::string("mass matrix ") +
                                 family_name(sp.family));
  return Field<Dim>(sp, M.solve(rhs));
}

/// Nearest element of the discretely divergence-free subspace of RT0,
/// realized as a mass-matrix saddle solve with the divergence constraint
/// and a zero-mean gauge column for the multiplier.
template <int Dim, class F>
Field<Dim> project_div_free(const Space<Dim>& rt, F&& fn, int degree = 9) {
  const Mesh<Dim>& mesh = *rt.mesh;
  SparseMatrix M = mass_matrix(rt);
  SparseMatrix D = div_matrix(rt);
  VectorXd vols(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) vols[c] = mesh.cell_volume[c];
  VectorXd f = load_vector(rt, fn, degree);
  SaddleResult r = solve_saddle(M, D, f, VectorXd::Zero(mesh.n_cells()),
                                &vols, "divergence-free projection");
  return Field<Dim>(rt, std::move(r.primal));
}

}  // namespace mhdfem
