#include "mhdfem/operators.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace mhdfem;
using mhdfem::test::dense_mass_via_eval;
using mhdfem::test::integrate;
using mhdfem::test::random_field;

namespace {

Mesh<2> mesh2(int n, double lo = -1, double hi = 1) {
  return build_box_mesh(BoxSpec<2>(Vec<2>(lo, lo), Vec<2>(hi, hi), {n, n}));
}

Mesh<3> mesh3(int n, double lo = -1, double hi = 1) {
  return build_box_mesh(
      BoxSpec<3>(Vec<3>(lo, lo, lo), Vec<3>(hi, hi, hi), {n, n, n}));
}

}  // namespace

TEST(Spaces, DofCountsOnSmallMeshes) {
  auto m2 = mesh2(1, 0, 1);
  EXPECT_EQ(make_space(m2, Family::RT0).n_dofs, 1);   // interior diagonal
  EXPECT_EQ(make_space(m2, Family::NED0).n_dofs, 1);  // same edge
  EXPECT_EQ(make_space(m2, Family::DG0).n_dofs, 2);
  EXPECT_EQ(make_space(m2, Family::CG1).n_dofs, 0);  // all vertices on bdry

  auto m3 = mesh3(2);
  EXPECT_EQ(make_space(m3, Family::RT0).n_dofs, 72);
  EXPECT_EQ(make_space(m3, Family::NED0).n_dofs, 26);
  EXPECT_EQ(make_space(m3, Family::DG0).n_dofs, 48);
  EXPECT_EQ(make_space(m3, Family::CG1).n_dofs, 1);  // center vertex

  // Unconstrained variants number every entity.
  EXPECT_EQ(make_space(m3, Family::RT0, false).n_dofs, m3.n_facets());
  EXPECT_EQ(make_space(m3, Family::NED0, false).n_dofs, m3.n_edges());
}

TEST(Spaces, BoundaryDofsAreConstrained) {
  auto m = mesh3(2);
  auto rt = make_space(m, Family::RT0);
  for (int f = 0; f < m.n_facets(); ++f)
    EXPECT_EQ(rt.dof(f) < 0, m.facet_on_boundary[f] != 0);
  auto ned = make_space(m, Family::NED0);
  for (int e = 0; e < m.n_edges(); ++e)
    EXPECT_EQ(ned.dof(e) < 0, m.edge_on_boundary[e] != 0);
}

TEST(Eval, Dg0IsCellwiseConstant) {
  auto m = mesh2(1, 0, 1);
  auto dg = make_space(m, Family::DG0);
  Field<2> f(dg);
  f.coeffs[0] = 3.0;
  EXPECT_DOUBLE_EQ(eval_scalar(f, 0, m.cell_centroid(0)), 3.0);
  EXPECT_DOUBLE_EQ(eval_scalar(f, 0, Vec<2>(0.5, 0.25)), 3.0);
  EXPECT_DOUBLE_EQ(eval_scalar(f, 1, m.cell_centroid(1)), 0.0);
}

TEST(Eval, PointOutsideCellRejected) {
  auto m = mesh2(2, 0, 1);
  auto rt = make_space(m, Family::RT0, false);
  Field<2> f(rt);
  EXPECT_THROW(eval_vector(f, 0, Vec<2>(5.0, 5.0)), std::domain_error);
}

TEST(Eval, Rt0ReproducesConstantFields) {
  // Constants lie in the local RT0 space; the canonical interpolant of a
  // constant reproduces it pointwise (unconstrained space: constants do not
  // satisfy the zero-flux boundary condition).
  auto run = [](const auto& m) {
    constexpr int D = std::remove_reference_t<decltype(m)>::dim;
    auto rt = make_space(m, Family::RT0, false);
    Vec<D> c = Vec<D>::Zero();
    c[0] = 1.0;
    auto u = interpolate(rt, [&](const Vec<D>&) { return c; });
    const auto& rule = simplex_rule<D>(4);
    for (int cell = 0; cell < m.n_cells(); ++cell) {
      auto v = m.cell_vertices(cell);
      for (int q = 0; q < rule.size(); ++q) {
        Vec<D> x = bary_to_point<D, D>(rule.bary[q], v);
        EXPECT_NEAR((eval_vector(u, cell, x) - c).norm(), 0.0, 1e-13);
      }
    }
  };
  run(mesh2(2));
  run(mesh3(1));
}

TEST(Eval, NedInterpolantReproducesLinearFields) {
  // 2D: (-y, x)/2 lies in the rotated lowest-order space; 3D: a + b cross x.
  auto m2 = mesh2(2);
  auto ned2 = make_space(m2, Family::NED0, false);
  auto f2 = [](const Vec<2>& x) { return Vec<2>(-x[1] / 2, x[0] / 2); };
  auto u2 = interpolate(ned2, f2);
  const auto& rule2 = simplex_rule<2>(4);
  for (int c = 0; c < m2.n_cells(); ++c) {
    auto v = m2.cell_vertices(c);
    for (int q = 0; q < rule2.size(); ++q) {
      Vec<2> x = bary_to_point<2, 2>(rule2.bary[q], v);
      EXPECT_NEAR((eval_vector(u2, c, x) - f2(x)).norm(), 0.0, 1e-13);
    }
  }

  auto m3 = mesh3(1);
  auto ned3 = make_space(m3, Family::NED0, false);
  Vec<3> a(0.3, -0.2, 0.5), b(1.0, 2.0, -1.0);
  auto f3 = [&](const Vec<3>& x) { return Vec<3>(a + b.cross(x)); };
  auto u3 = interpolate(ned3, f3);
  const auto& rule3 = simplex_rule<3>(4);
  for (int c = 0; c < m3.n_cells(); ++c) {
    auto v = m3.cell_vertices(c);
    for (int q = 0; q < rule3.size(); ++q) {
      Vec<3> x = bary_to_point<3, 3>(rule3.bary[q], v);
      EXPECT_NEAR((eval_vector(u3, c, x) - f3(x)).norm(), 0.0, 1e-13);
    }
  }
}

TEST(Spaces, MassMatricesMatchDenseEvalOracle) {
  auto m = mesh2(2);
  for (Family fam : {Family::RT0, Family::NED0, Family::CG1, Family::DG0}) {
    auto sp = make_space(m, fam);
    if (sp.n_dofs == 0) continue;
    Eigen::MatrixXd M(mass_matrix(sp));
    Eigen::MatrixXd O = dense_mass_via_eval(sp, sp);
    EXPECT_NEAR((M - O).cwiseAbs().maxCoeff(), 0.0, 1e-13) << family_name(fam);
  }
  auto m3 = mesh3(1);
  auto rt = make_space(m3, Family::RT0);
  auto ned = make_space(m3, Family::NED0);
  Eigen::MatrixXd Mix(mixed_mass(ned, rt));
  EXPECT_NEAR((Mix - dense_mass_via_eval(ned, rt)).cwiseAbs().maxCoeff(), 0.0,
              1e-13);
}

TEST(Spaces, WeightedMassUsesCellwiseDensity) {
  auto m = mesh2(2);
  auto rt = make_space(m, Family::RT0);
  auto dg = make_space(m, Family::DG0);
  std::mt19937 rng(5);
  auto rho = random_field(dg, rng, 0.5, 2.0);
  auto u = random_field(rt, rng);
  auto v = random_field(rt, rng);
  SparseMatrix Mr = mass_matrix(rt, &rho);
  double got = u.coeffs.dot(Mr * v.coeffs);
  double want = integrate(m, [&](int c, const Vec<2>& x) {
    return eval_scalar(rho, c, x) *
           eval_vector(u, c, x).dot(eval_vector(v, c, x));
  });
  EXPECT_NEAR(got, want, 1e-13 * (1 + std::abs(want)));
}

TEST(Curl, InclusionIntoRt0IsExact) {
  // For every coefficient vector z of the curl space, C z represents curl z
  // in RT0 with zero residual, checked pointwise at quadrature nodes.
  auto check = [](const auto& m) {
    constexpr int D = std::remove_reference_t<decltype(m)>::dim;
    auto curl_sp = make_space(m, D == 2 ? Family::CG1 : Family::NED0);
    auto rt = make_space(m, Family::RT0);
    if (curl_sp.n_dofs == 0) return;
    SparseMatrix C = curl_matrix(curl_sp, rt);
    std::mt19937 rng(17);
    auto z = random_field(curl_sp, rng);
    Field<D> r(rt, C * z.coeffs);
    const auto& rule = simplex_rule<D>(3);
    for (int c = 0; c < m.n_cells(); ++c) {
      Vec<D> curl_z = eval_curl(z, c);
      auto v = m.cell_vertices(c);
      for (int q = 0; q < rule.size(); ++q) {
        Vec<D> x = bary_to_point<D, D>(rule.bary[q], v);
        EXPECT_NEAR((eval_vector(r, c, x) - curl_z).norm(), 0.0, 1e-13);
      }
      // div curl = 0, cellwise.
      EXPECT_NEAR(div_value(r, c), 0.0, 1e-13);
    }
  };
  check(mesh2(3));
  check(mesh3(2));
}

TEST(Curl, RotOfInteriorHatIsNonzero) {
  auto m = mesh2(2);
  auto cg = make_space(m, Family::CG1);
  ASSERT_EQ(cg.n_dofs, 1);
  auto rt = make_space(m, Family::RT0);
  SparseMatrix C = curl_matrix(cg, rt);
  VectorXd z = VectorXd::Ones(1);
  EXPECT_GT((C * z).norm(), 0.5);
  EXPECT_NEAR((C * VectorXd::Zero(1)).norm(), 0.0, 0.0);
}

TEST(Curl, GradientFieldsAreCurlFree) {
  // curl o grad = 0 holds exactly as an integer matrix identity.
  auto m3 = mesh3(2);
  auto cg = make_space(m3, Family::CG1);
  auto ned = make_space(m3, Family::NED0);
  auto rt = make_space(m3, Family::RT0);
  SparseMatrix C = curl_matrix(ned, rt);
  SparseMatrix G = gradient_matrix(cg, ned);
  SparseMatrix CG = C * G;
  EXPECT_EQ(Eigen::MatrixXd(CG).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Project, ConstantOntoDg0IsExact) {
  auto m = mesh2(2);
  auto dg = make_space(m, Family::DG0);
  auto f = project_l2(dg, [](const Vec<2>&) { return 4.25; });
  for (int i = 0; i < dg.n_dofs; ++i) EXPECT_NEAR(f.coeffs[i], 4.25, 1e-14);
}

TEST(Project, Dg0ProjectionIsCellwiseMean) {
  // DG0 projection of u.u for a discrete RT0 field equals the per-cell
  // quadrature average.
  auto m = mesh2(2);
  auto rt = make_space(m, Family::RT0);
  auto dg = make_space(m, Family::DG0);
  std::mt19937 rng(23);
  auto u = random_field(rt, rng);
  const auto& rule = simplex_rule<2>(4);
  for (int c = 0; c < m.n_cells(); ++c) {
    double mean = 0;
    auto v = m.cell_vertices(c);
    for (int q = 0; q < rule.size(); ++q) {
      Vec<2> x = bary_to_point<2, 2>(rule.bary[q], v);
      mean += rule.weight[q] * eval_vector(u, c, x).squaredNorm();
    }
    // Oracle via an independent rhs assembly through project_l2's path on
    // an analytic closure is not possible for discrete fields; integrate
    // directly instead.
    double proj = integrate(m, [&](int cc, const Vec<2>& x) {
                    return cc == c ? eval_vector(u, cc, x).squaredNorm() : 0.0;
                  }) / m.cell_volume[c];
    EXPECT_NEAR(proj, mean, 1e-13 * (1 + std::abs(mean)));
  }
}

TEST(Project, GalerkinOrthogonalityAndIdempotence) {
  auto m = mesh2(2);
  for (Family fam : {Family::CG1, Family::NED0, Family::RT0}) {
    auto sp = make_space(m, fam);
    if (sp.n_dofs == 0) continue;
    const int deg = 7;
    VectorXd rhs;
    Field<2> p(sp);
    if (is_vector_family<2>(fam)) {
      auto fn = [](const Vec<2>& x) {
        return Vec<2>(std::sin(x[0] + 0.3 * x[1]), std::cos(x[1]));
      };
      p = project_l2(sp, fn, deg);
      rhs = load_vector(sp, fn, deg);
    } else {
      auto fn = [](const Vec<2>& x) { return std::sin(x[0]) * x[1]; };
      p = project_l2(sp, fn, deg);
      rhs = load_vector(sp, fn, deg);
    }
    // <f - Pf, phi_i> = rhs - M x, with the same quadrature on both sides.
    VectorXd resid = rhs - mass_matrix(sp) * p.coeffs;
    EXPECT_NEAR(resid.lpNorm<Eigen::Infinity>(), 0.0, 1e-11)
        << family_name(fam);
    // Projecting the projection changes nothing: M x = M x.
    VectorXd twice = factorize(mass_matrix(sp)).solve(mass_matrix(sp) *
                                                      p.coeffs);
    EXPECT_NEAR((twice - p.coeffs).lpNorm<Eigen::Infinity>(), 0.0,
                1e-12 * (1 + p.coeffs.lpNorm<Eigen::Infinity>()));
  }
}

TEST(ProjectDivFree, FeasibleFieldReturnedUnchanged) {
  auto m = mesh2(3);
  auto rt = make_space(m, Family::RT0);
  auto cg = make_space(m, Family::CG1);
  std::mt19937 rng(29);
  auto z = random_field(cg, rng);
  VectorXd u = curl_matrix(cg, rt) * z.coeffs;  // exactly divergence-free

  SparseMatrix M = mass_matrix(rt);
  SparseMatrix D = div_matrix(rt);
  VectorXd vols(m.n_cells());
  for (int c = 0; c < m.n_cells(); ++c) vols[c] = m.cell_volume[c];
  auto r = solve_saddle(M, D, VectorXd(M * u), VectorXd::Zero(m.n_cells()),
                        &vols);
  EXPECT_NEAR((r.primal - u).norm(), 0.0, 1e-11 * (1 + u.norm()));
}

TEST(ProjectDivFree, GradientProjectsToZero) {
  // (x, 0) is a gradient; its divergence-free part with zero normal trace
  // vanishes, and the returned field is pointwise divergence-free.
  auto m = mesh2(2);
  auto rt = make_space(m, Family::RT0);
  auto p = project_div_free(rt, [](const Vec<2>& x) {
    return Vec<2>(x[0], 0.0);
  });
  EXPECT_NEAR(p.coeffs.norm(), 0.0, 1e-12);
  for (int c = 0; c < m.n_cells(); ++c)
    EXPECT_NEAR(div_value(p, c), 0.0, 1e-12);
}

TEST(ProjectDivFree, MatchesDenseKktOracleFor3dInitialVelocity) {
  // Initial swirl used by the 3D experiments; it violates u.n = 0 on the
  // boundary, so the projection is a genuine constrained least squares.
  auto m = mesh3(1);
  auto rt = make_space(m, Family::RT0);
  auto u0 = [](const Vec<3>& x) {
    double g = std::exp(-4.0 * (x[0] * x[0] + x[1] * x[1]));
    return Vec<3>(x[1] * g, -x[0] * g, 0.0);
  };
  auto p = project_div_free(rt, u0);

  // Dense KKT oracle with the same gauge row.
  Eigen::MatrixXd M(mass_matrix(rt));
  Eigen::MatrixXd D(div_matrix(rt));
  VectorXd f = load_vector(rt, u0);
  const int n = rt.n_dofs, k = m.n_cells();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k + 1, n + k + 1);
  K.topLeftCorner(n, n) = M;
  K.block(n, 0, k, n) = D;
  K.block(0, n, n, k) = D.transpose();
  for (int c = 0; c < k; ++c) {
    K(n + c, n + k) = m.cell_volume[c];
    K(n + k, n + c) = m.cell_volume[c];
  }
  VectorXd rhs = VectorXd::Zero(n + k + 1);
  rhs.head(n) = f;
  VectorXd sol = K.fullPivLu().solve(rhs);
  EXPECT_NEAR((p.coeffs - sol.head(n)).norm(), 0.0, 1e-10 * (1 + f.norm()));
  for (int c = 0; c < m.n_cells(); ++c)
    EXPECT_NEAR(div_value(p, c), 0.0, 1e-11);
}

namespace {

// Polynomial vector field together with its exact Jacobian.
template <int D>
struct FieldWithJacobian {
  std::function<Vec<D>(const Vec<D>&)> value;
  std::function<Eigen::Matrix<double, D, D>(const Vec<D>&)> jacobian;
};

template <int D>
void check_jacobian(const FieldWithJacobian<D>& f, const Vec<D>& x) {
  const double h = 1e-6;
  for (int j = 0; j < D; ++j) {
    Vec<D> e = Vec<D>::Zero();
    e[j] = h;
    Vec<D> fd = (f.value(x + e) - f.value(x - e)) / (2 * h);
    EXPECT_NEAR((fd - f.jacobian(x).col(j)).norm(), 0.0, 1e-7);
  }
}

}  // namespace

TEST(Conventions, IntegrationByPartsIdentityHolds2d) {
  // <(curl w) x u, v> = <w, rot(cross(u, v))> for fields with zero normal
  // trace, with exact polynomial derivatives so the identity is resolved to
  // machine precision by a quadrature rule of matching degree.
  auto m2 = mesh2(2);
  FieldWithJacobian<2> w{
      [](const Vec<2>& x) {
        return Vec<2>(0.3 * x[0] * x[1] - x[1] * x[1],
                      x[0] + 0.2 * x[0] * x[0]);
      },
      [](const Vec<2>& x) {
        Eigen::Matrix2d J;
        J << 0.3 * x[1], 0.3 * x[0] - 2 * x[1], 1 + 0.4 * x[0], 0;
        return J;
      }};
  FieldWithJacobian<2> u{
      [](const Vec<2>& x) {
        return Vec<2>((1 - x[0] * x[0]) * (0.5 + x[1]),
                      (1 - x[1] * x[1]) * (1.0 - 0.3 * x[0]));
      },
      [](const Vec<2>& x) {
        Eigen::Matrix2d J;
        J << -2 * x[0] * (0.5 + x[1]), 1 - x[0] * x[0],
            -0.3 * (1 - x[1] * x[1]), -2 * x[1] * (1.0 - 0.3 * x[0]);
        return J;
      }};
  FieldWithJacobian<2> v{
      [](const Vec<2>& x) {
        return Vec<2>((1 - x[0] * x[0]) * (-0.2 + 0.7 * x[1]),
                      (1 - x[1] * x[1]) * (0.4 + x[0]));
      },
      [](const Vec<2>& x) {
        Eigen::Matrix2d J;
        J << -2 * x[0] * (-0.2 + 0.7 * x[1]), 0.7 * (1 - x[0] * x[0]),
            1 - x[1] * x[1], -2 * x[1] * (0.4 + x[0]);
        return J;
      }};
  check_jacobian(w, Vec<2>(0.31, -0.47));
  check_jacobian(u, Vec<2>(-0.62, 0.11));
  check_jacobian(v, Vec<2>(0.05, 0.83));

  double lhs = integrate(m2, [&](int, const Vec<2>& x) {
    double curl_w = w.jacobian(x)(1, 0) - w.jacobian(x)(0, 1);
    return cross<2>(curl_w, u.value(x)).dot(v.value(x));
  });
  double rhs = integrate(m2, [&](int, const Vec<2>& x) {
    // d(cross(u,v)) by the product rule, then rot c = (d_y c, -d_x c).
    Vec<2> uu = u.value(x), vv = v.value(x);
    Eigen::Matrix2d Ju = u.jacobian(x), Jv = v.jacobian(x);
    Vec<2> grad_c;
    for (int j = 0; j < 2; ++j)
      grad_c[j] = Ju(0, j) * vv[1] + uu[0] * Jv(1, j) - Ju(1, j) * vv[0] -
                  uu[1] * Jv(0, j);
    return w.value(x).dot(Vec<2>(grad_c[1], -grad_c[0]));
  });
  EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(lhs)));
}

TEST(Conventions, IntegrationByPartsIdentityHolds3d) {
  auto m3 = mesh3(1);
  FieldWithJacobian<3> w{
      [](const Vec<3>& x) {
        return Vec<3>(x[1] * x[2], 0.3 * x[0] * x[0], -x[0] * x[1]);
      },
      [](const Vec<3>& x) {
        Eigen::Matrix3d J;
        J << 0, x[2], x[1], 0.6 * x[0], 0, 0, -x[1], -x[0], 0;
        return J;
      }};
  FieldWithJacobian<3> u{
      [](const Vec<3>& x) {
        return Vec<3>((1 - x[0] * x[0]) * 0.8,
                      (1 - x[1] * x[1]) * (0.1 + x[2]),
                      (1 - x[2] * x[2]) * (-0.5 + x[0]));
      },
      [](const Vec<3>& x) {
        Eigen::Matrix3d J;
        J << -1.6 * x[0], 0, 0, 0, -2 * x[1] * (0.1 + x[2]), 1 - x[1] * x[1],
            1 - x[2] * x[2], 0, -2 * x[2] * (-0.5 + x[0]);
        return J;
      }};
  FieldWithJacobian<3> v{
      [](const Vec<3>& x) {
        return Vec<3>((1 - x[0] * x[0]) * (x[1] - 0.2),
                      (1 - x[1] * x[1]) * 0.6,
                      (1 - x[2] * x[2]) * (0.3 + x[1]));
      },
      [](const Vec<3>& x) {
        Eigen::Matrix3d J;
        J << -2 * x[0] * (x[1] - 0.2), 1 - x[0] * x[0], 0, 0, -1.2 * x[1], 0,
            0, 1 - x[2] * x[2], -2 * x[2] * (0.3 + x[1]);
        return J;
      }};
  check_jacobian(w, Vec<3>(0.31, -0.47, 0.19));
  check_jacobian(u, Vec<3>(-0.62, 0.11, -0.33));
  check_jacobian(v, Vec<3>(0.05, 0.83, 0.41));

  double lhs = integrate(m3, [&](int, const Vec<3>& x) {
    Eigen::Matrix3d Jw = w.jacobian(x);
    Vec<3> curl_w(Jw(2, 1) - Jw(1, 2), Jw(0, 2) - Jw(2, 0),
                  Jw(1, 0) - Jw(0, 1));
    return curl_w.cross(u.value(x)).dot(v.value(x));
  });
  double rhs = integrate(m3, [&](int, const Vec<3>& x) {
    Vec<3> uu = u.value(x), vv = v.value(x);
    Eigen::Matrix3d Ju = u.jacobian(x), Jv = v.jacobian(x);
    Eigen::Matrix3d Jc;  // Jacobian of u x v, column by column
    for (int j = 0; j < 3; ++j)
      Jc.col(j) = Vec<3>(Ju.col(j)).cross(vv) + uu.cross(Vec<3>(Jv.col(j)));
    Vec<3> curl_c(Jc(2, 1) - Jc(1, 2), Jc(0, 2) - Jc(2, 0),
                  Jc(1, 0) - Jc(0, 1));
    return w.value(x).dot(curl_c);
  });
  EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(lhs)));
}
