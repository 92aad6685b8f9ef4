#pragma once

#include <Eigen/Dense>
#include <complex>

namespace eclab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kE = 2.71828182845904523536;

// The uniform norm |p| = max_j |p_j| is the default throughout.
enum class Norm { Sup, Euclidean };

inline double norm(const Vec& v, Norm n = Norm::Sup) {
  if (v.size() == 0) return 0.0;
  return n == Norm::Sup ? v.cwiseAbs().maxCoeff() : v.norm();
}

inline double norm(const CVec& v, Norm n = Norm::Sup) {
  if (v.size() == 0) return 0.0;
  return n == Norm::Sup ? v.cwiseAbs().maxCoeff() : v.norm();
}

}  // namespace eclab
