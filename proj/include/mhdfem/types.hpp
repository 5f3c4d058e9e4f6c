#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mhdfem {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

using Eigen::VectorXd;

/// Value type of fields in the curl-conforming auxiliary space: a scalar
/// (out-of-plane component) in 2D, a 3-vector in 3D.
template <int Dim>
using CurlVal = std::conditional_t<Dim == 2, double, Vec<3>>;

template <int Dim>
inline CurlVal<Dim> curl_val_zero() {
  if constexpr (Dim == 2) {
    return 0.0;
  } else {
    return Vec<3>::Zero();
  }
}

/// Cross product of two in-plane/space vectors. 2D: the out-of-plane scalar
/// u_x v_y - u_y v_x. 3D: the usual vector product.
template <int Dim>
inline CurlVal<Dim> cross(const Vec<Dim>& u, const Vec<Dim>& v) {
  if constexpr (Dim == 2) {
    return u[0] * v[1] - u[1] * v[0];
  } else {
    return u.cross(v);
  }
}

/// Cross product of a curl-type value with a vector. 2D: w * (-u_y, u_x)
/// (out-of-plane scalar times in-plane vector). 3D: w x u.
template <int Dim>
inline Vec<Dim> cross(const CurlVal<Dim>& w, const Vec<Dim>& u) {
  if constexpr (Dim == 2) {
    return Vec<2>(-w * u[1], w * u[0]);
  } else {
    return w.cross(u);
  }
}

template <int Dim>
inline double dot(const CurlVal<Dim>& a, const CurlVal<Dim>& b) {
  if constexpr (Dim == 2) {
    return a * b;
  } else {
    return a.dot(b);
  }
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fixed-point iteration did not reach the requested tolerance.
struct StepFailure : std::runtime_error {
  StepFailure(const std::string& what, double increment)
      : std::runtime_error(what), last_increment(increment) {}
  double last_increment;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mhdfem
