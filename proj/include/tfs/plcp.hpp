#pragma once

#include <optional>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "json.hpp"
#include "tfs/dsr.hpp"

namespace tfs {

// Expression templates off: Eigen's own expression machinery cannot
// propagate Boost's lazy types through products.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using RatMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RatVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

struct LcpInstance {
  RatMatrix M;
  RatVector q;

  Eigen::Index n() const { return q.size(); }
};

// Exact elimination; Scalar must be a field without rounding.
template <class Scalar>
Scalar determinant(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a) {
  const Eigen::Index n = a.rows();
  Scalar det = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      a.row(p).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (a(r, c) == 0) continue;
      Scalar f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

// Solves a x = b, nullopt when a is singular.
template <class Scalar>
std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> solve_exact(
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != c) {
      a.row(p).swap(a.row(c));
      std::swap(b(p), b(c));
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c || a(r, c) == 0) continue;
      Scalar f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
      b(r) -= f * b(c);
    }
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = b(i) / a(i, i);
  return x;
}

bool is_p_matrix(const RatMatrix& M);
bool lcp_verify(const LcpInstance& inst, const RatVector& z);
// (M_i, q_i): row and column i removed.
LcpInstance lcp_minor(const LcpInstance& inst, Eigen::Index i);

BitString encode_lcp(const LcpInstance& inst);
LcpInstance decode_lcp(const BitString& bits);
BitString encode_rational_vector(const RatVector& v);
RatVector decode_rational_vector(const BitString& bits);
// Bits needed by any solution of the instance or of its principal minors.
size_t lcp_solution_bound(const LcpInstance& inst);

nlohmann::json lcp_to_json(const LcpInstance& inst);
LcpInstance lcp_from_json(const nlohmann::json& j);
std::string rational_to_string(const Rational& r);

// M = BᵀB + I with integer B in [-range, range]; q has small denominators.
LcpInstance plcp_random_spd(Eigen::Index n, Rng& rng, int range = 3);

ProblemPtr plcp_problem();
DsrPtr plcp_dsr();

}  // namespace tfs
