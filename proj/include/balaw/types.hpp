#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

namespace balaw {

/// Largest system dimension supported. States and matrices are stack-allocated up to this size.
inline constexpr int kMaxDim = 4;

using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline State zero_state(int n) { return State::Zero(n); }

inline double norm1(const State& u) { return u.lpNorm<1>(); }
inline double norm_inf(const State& u) { return u.size() == 0 ? 0.0 : u.lpNorm<Eigen::Infinity>(); }

/// Inverse of a small square matrix using the fixed-size closed forms.
inline Matrix small_inverse(const Matrix& a) {
  switch (a.rows()) {
    case 1:
      return Matrix::Constant(1, 1, 1.0 / a(0, 0));
    case 2: {
      const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
      Matrix out(2, 2);
      out << a(1, 1) / det, -a(0, 1) / det, -a(1, 0) / det, a(0, 0) / det;
      return out;
    }
    case 3:
      return Eigen::Matrix3d(a).inverse();
    default:
      return Eigen::Matrix4d(a).inverse();
  }
}

/// Signed wave strengths, one entry per characteristic family.
struct StrengthVector {
  State values;

  StrengthVector() = default;
  explicit StrengthVector(State v) : values(std::move(v)) {}
  static StrengthVector zero(int n) { return StrengthVector(State::Zero(n)); }

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
  double l1() const { return norm1(values); }
};

}  // namespace balaw
