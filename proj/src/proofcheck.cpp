#include "ltqkd/proofcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ltqkd/errors.hpp"

namespace ltqkd {

Matrix basis_projector(int s, Basis beta) {
  if (s != 0 && s != 1) throw std::invalid_argument("outcome must be 0 or 1");
  Vector v(2);
  if (beta == Basis::Z) {
    v << (s == 0 ? 1.0 : 0.0), (s == 0 ? 0.0 : 1.0);
  } else {
    double r = std::sqrt(0.5);
    v << r, (s == 0 ? r : -r);
  }
  return v * v.adjoint();
}

JointOperator measurement_povm(const EfficiencyOperator& f0, const EfficiencyOperator& f1, int s, Basis beta) {
  const EfficiencyOperator& f = s == 0 ? f0 : f1;
  return {kron(basis_projector(s, beta), f.gram()), f.dim()};
}

JointOperator fail_povm(const EfficiencyOperator& f0, const EfficiencyOperator& f1, Basis beta) {
  Matrix id = Matrix::Identity(2 * f0.dim(), 2 * f0.dim());
  return {id - measurement_povm(f0, f1, 0, beta).matrix - measurement_povm(f0, f1, 1, beta).matrix, f0.dim()};
}

JointOperator build_qz(const EfficiencyOperator& f0, const EfficiencyOperator& f1) {
  if (f0.dim() != f1.dim()) throw std::invalid_argument("detector efficiency operators differ in dimension");
  return {kron(basis_projector(0, Basis::Z), f0.factor()) + kron(basis_projector(1, Basis::Z), f1.factor()),
          f0.dim()};
}

JointOperator build_g(const CMatrix& c, const EfficiencyOperator& f0, const EfficiencyOperator& f1) {
  if (f0.dim() != f1.dim()) throw std::invalid_argument("detector efficiency operators differ in dimension");
  Matrix g = kron(basis_projector(0, Basis::Z), c.c * checked_inverse(f0.factor())) +
             kron(basis_projector(1, Basis::Z), c.c * checked_inverse(f1.factor()));
  Eigen::JacobiSVD<Matrix> svd(g);
  double top = svd.singularValues()(0);
  if (top > 1.0 + 1e-8) {
    throw InvalidFilter("virtual filter has singular value " + std::to_string(top) + " above 1");
  }
  return {g, f0.dim()};
}

JointOperator virtual_povm(const JointOperator& qz, const JointOperator& g, int s) {
  Matrix p = kron(basis_projector(s, Basis::X), Matrix::Identity(qz.dim_t, qz.dim_t));
  return {qz.matrix.adjoint() * g.matrix.adjoint() * p * g.matrix * qz.matrix, qz.dim_t};
}

namespace {

Eigen::Matrix4d projector_from(double a, double b, double c, double d) {
  Eigen::Vector4d v(a, b, c, d);
  return v * v.transpose() / 2.0;
}

TOperatorSet make_t_operators() {
  TOperatorSet t;
  t.projectors = {
      {"Z00", projector_from(1, 0, 0, 1)},  {"Z10", projector_from(0, 1, 1, 0)},
      {"Z01", projector_from(0, 1, -1, 0)}, {"Z11", projector_from(1, 0, 0, -1)},
      {"X++", projector_from(1, 1, 0, 0)},  {"X-+", projector_from(0, 0, -1, 1)},
      {"X+-", projector_from(0, 0, 1, 1)},  {"X--", projector_from(1, -1, 0, 0)},
      {"Y++", projector_from(1, 0, 1, 0)},  {"Y-+", projector_from(0, -1, 0, 1)},
      {"Y+-", projector_from(0, 1, 0, 1)},  {"Y--", projector_from(1, 0, -1, 0)},
  };
  auto p = [&t](const char* name) { return t.projector(name); };
  t.t[0][0] = p("X++") + p("X-+");
  t.t[1][0] = p("X--") + p("X+-");
  t.t[0][1] = p("X++") - p("X-+");
  t.t[1][1] = -p("X--") + p("X+-");
  t.t[0][2] = p("Z00") + p("Z01") - p("Y-+") - p("Y++");
  t.t[1][2] = -p("Z11") - p("Z10") + p("Y-+") + p("Y++");
  return t;
}

}  // namespace

const Eigen::Matrix4d& TOperatorSet::projector(const std::string& name) const {
  for (const auto& [n, m] : projectors) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown projector " + name);
}

const TOperatorSet& build_t_operators() {
  static const TOperatorSet t = make_t_operators();
  return t;
}

double SandwichReport::max_violation() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const SandwichCheck& c : checks) v = std::max(v, c.max_violation);
  return v;
}

namespace {

Matrix random_state(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> gauss;
  Matrix w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = cplx(gauss(rng), gauss(rng));
  }
  Matrix rho = w.adjoint() * w;
  return rho / rho.trace().real();
}

Matrix random_projector(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vector v(4);
  for (Eigen::Index i = 0; i < 4; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  v.normalize();
  return v * v.adjoint();
}

double expectation(const Matrix& rho, const Matrix& b, const Matrix& t) {
  return (rho * kron(b, t)).trace().real();
}

// Check order used by measure_lambda_sandwich.
enum CheckId {
  kPiLower0,
  kPiUpper0,
  kPiLower1,
  kPiUpper1,
  kQ1Lower0,
  kQ1Upper0,
  kQ1Lower1,
  kQ1Upper1,
  kQxLower0,
  kQxUpper0,
  kQxLower1,
  kQxUpper1,
  kErrNumerator,
  kVirtDenominator,
  kNumChecks
};

const char* kCheckNames[kNumChecks] = {
    "Pi(x)lm0*G0 <= Pi(x)CdC",  "Pi(x)CdC <= Pi(x)lp0*G0",  "Pi(x)lm1*G1 <= Pi(x)CdC", "Pi(x)CdC <= Pi(x)lp1*G1",
    "q_virt(0X,1) lower",       "q_virt(0X,1) upper",       "q_virt(1X,1) lower",      "q_virt(1X,1) upper",
    "q_virt(0X,X) lower",       "q_virt(0X,X) upper",       "q_virt(1X,X) lower",      "q_virt(1X,X) upper",
    "phase-error numerator",    "virtual-detection denominator",
};

}  // namespace

SandwichReport measure_lambda_sandwich(const LambdaBounds& lam, const CMatrix& c, const EfficiencyOperator& f0,
                                       const EfficiencyOperator& f1, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (f0.dim() != f1.dim() || c.c.cols() != f0.dim()) {
    throw std::invalid_argument("C and efficiency operators differ in dimension");
  }
  const TOperatorSet& tops = build_t_operators();
  const Eigen::Index n = 4 * f0.dim();
  const Matrix cdc = c.c.adjoint() * c.c;
  const Matrix* grams[2] = {&f0.gram(), &f1.gram()};

  SandwichReport rep;
  rep.trials = trials;
  std::vector<double> worst(kNumChecks, -std::numeric_limits<double>::infinity());
  auto record = [&worst](int id, double v) { worst[id] = std::max(worst[id], v); };

  for (int trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    Matrix rho = random_state(rng, n);
    Matrix pi = random_projector(rng);
    double c01 = std::uniform_real_distribution<double>(-0.95, 0.95)(rng);

    double q[2][2];
    double qv[2][2];
    for (int s = 0; s < 2; ++s) {
      double lm = lam.minus(s);
      double lp = lam.plus(s);
      double g_pi = expectation(rho, pi, *grams[s]);
      double c_pi = expectation(rho, pi, cdc);
      record(s == 0 ? kPiLower0 : kPiLower1, lm * g_pi - c_pi);
      record(s == 0 ? kPiUpper0 : kPiUpper1, c_pi - lp * g_pi);
      rep.max_side_gap = std::max(rep.max_side_gap, std::abs(lp * g_pi - lm * g_pi));

      for (int w = 0; w < 2; ++w) {
        Matrix t = tops.t[s][w].cast<cplx>();
        q[s][w] = expectation(rho, t, *grams[s]) / 2.0;
        qv[s][w] = expectation(rho, t, cdc) / 2.0;
      }
      double q1 = q[s][0];
      double qx = q[s][1];
      record(s == 0 ? kQ1Lower0 : kQ1Lower1, lm * q1 - qv[s][0]);
      record(s == 0 ? kQ1Upper0 : kQ1Upper1, qv[s][0] - lp * q1);
      double mid = (lp + lm) / 2.0 * qx;
      double half = (lp - lm) / 2.0 * q1;
      record(s == 0 ? kQxLower0 : kQxLower1, (mid - half) - qv[s][1]);
      record(s == 0 ? kQxUpper0 : kQxUpper1, qv[s][1] - (mid + half));
    }

    // Phase-error bounds with p_ZA p_ZB = 1.
    double p0v = (1.0 + c01) / 2.0;
    double p1v = (1.0 - c01) / 2.0;
    double err = p1v * (qv[0][0] - qv[0][1]) + p0v * (qv[1][0] + qv[1][1]);
    double err_bound =
        p1v * ((3.0 * lam.lp0 - lam.lm0) / 2.0 * q[0][0] - (lam.lp0 + lam.lm0) / 2.0 * q[0][1]) +
        p0v * ((3.0 * lam.lp1 - lam.lm1) / 2.0 * q[1][0] + (lam.lp1 + lam.lm1) / 2.0 * q[1][1]);
    record(kErrNumerator, err - err_bound);
    double virt = qv[0][0] + qv[1][0] + c01 * (qv[0][1] + qv[1][1]);
    double virt_bound = c01 * ((lam.lp0 + lam.lm0) / 2.0 * q[0][1] + (lam.lp1 + lam.lm1) / 2.0 * q[1][1]) -
                        ((lam.lp0 - 3.0 * lam.lm0) / 2.0 * q[0][0] + (lam.lp1 - 3.0 * lam.lm1) / 2.0 * q[1][0]);
    record(kVirtDenominator, virt_bound - virt);
  }
  for (int id = 0; id < kNumChecks; ++id) rep.checks.push_back({kCheckNames[id], worst[id]});
  return rep;
}

SandwichReport verify_lambda_sandwich(const LambdaBounds& lam, const CMatrix& c, const EfficiencyOperator& f0,
                                      const EfficiencyOperator& f1, int trials, std::uint64_t seed) {
  SandwichReport rep = measure_lambda_sandwich(lam, c, f0, f1, trials, seed);
  if (!rep.passed()) {
    throw BoundViolated(rep.max_violation(),
                        "lambda sandwich violated by " + std::to_string(rep.max_violation()));
  }
  return rep;
}

}  // namespace ltqkd
