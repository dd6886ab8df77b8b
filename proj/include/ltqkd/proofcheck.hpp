#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ltqkd/detection_stats.hpp"
#include "ltqkd/detector.hpp"
#include "ltqkd/linalg.hpp"
#include "ltqkd/security.hpp"

namespace ltqkd {

// Operator on B (qubit) tensor T, ordered kron(B, T).
struct JointOperator {
  Matrix matrix;
  int dim_t = 0;
};

// |s_beta><s_beta| on B.
Matrix basis_projector(int s, Basis beta);

// |s_beta><s_beta| (x) F_s^dag F_s.
JointOperator measurement_povm(const EfficiencyOperator& f0, const EfficiencyOperator& f1, int s, Basis beta);
// I - M^{0_beta} - M^{1_beta}.
JointOperator fail_povm(const EfficiencyOperator& f0, const EfficiencyOperator& f1, Basis beta);

// |0_Z><0_Z| (x) F_0 + |1_Z><1_Z| (x) F_1. Requires factors.
JointOperator build_qz(const EfficiencyOperator& f0, const EfficiencyOperator& f1);
// |0_Z><0_Z| (x) C F_0^{-1} + |1_Z><1_Z| (x) C F_1^{-1}; throws InvalidFilter
// when a singular value exceeds 1 + 1e-8.
JointOperator build_g(const CMatrix& c, const EfficiencyOperator& f0, const EfficiencyOperator& f1);
// Q^dag G^dag (|s_X><s_X| (x) I) G Q.
JointOperator virtual_povm(const JointOperator& qz, const JointOperator& g, int s);

enum class Omega { one = 0, x = 1, z = 2 };

struct TOperatorSet {
  // Twelve normalized rank-1 projectors, names like "X++", "Z01", "Y-+".
  std::vector<std::pair<std::string, Eigen::Matrix4d>> projectors;
  std::array<std::array<Eigen::Matrix4d, 3>, 2> t;

  const Eigen::Matrix4d& at(int s, Omega w) const { return t[s][static_cast<int>(w)]; }
  const Eigen::Matrix4d& projector(const std::string& name) const;
};

const TOperatorSet& build_t_operators();

struct SandwichCheck {
  std::string name;
  double max_violation = 0.0;  // largest amount by which a bound was crossed (<= 0 if never)
};

struct SandwichReport {
  std::vector<SandwichCheck> checks;
  int trials = 0;
  // Largest |upper - lower| seen across the operator sandwiches.
  double max_side_gap = 0.0;

  double max_violation() const;
  bool passed(double tol = 1e-9) const { return max_violation() <= tol; }
};

// Draws trials random (rho_E, Pi) pairs and evaluates every sandwich and
// phase-error bound inequality. Does not throw on violation.
SandwichReport measure_lambda_sandwich(const LambdaBounds& lam, const CMatrix& c, const EfficiencyOperator& f0,
                                       const EfficiencyOperator& f1, int trials, std::uint64_t seed);

// As measure_lambda_sandwich, throwing BoundViolated above 1e-9.
SandwichReport verify_lambda_sandwich(const LambdaBounds& lam, const CMatrix& c, const EfficiencyOperator& f0,
                                      const EfficiencyOperator& f1, int trials, std::uint64_t seed);

}  // namespace ltqkd
