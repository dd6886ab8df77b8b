#include "ltqkd/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ltqkd/errors.hpp"

namespace ltqkd {

const char* polarization_name(Polarization p) {
  switch (p) {
    case Polarization::H:
      return "H";
    case Polarization::V:
      return "V";
    case Polarization::D:
      return "D";
    case Polarization::L:
      return "L";
  }
  return "?";
}

std::optional<Polarization> parse_polarization(std::string_view s) {
  for (Polarization p : kPolarizations) {
    if (s == polarization_name(p)) return p;
  }
  return std::nullopt;
}

Vector polarization_state(Polarization p) {
  const double r = std::numbers::sqrt2 / 2.0;
  Vector v(2);
  switch (p) {
    case Polarization::H:
      v << 1.0, 0.0;
      break;
    case Polarization::V:
      v << 0.0, 1.0;
      break;
    case Polarization::D:
      v << r, r;
      break;
    case Polarization::L:
      v << r, cplx(0.0, r);
      break;
  }
  return v;
}

double detected_rate_model(double r_in, double eta, double tau_d, double r_dark) {
  double r = eta * r_in + r_dark;
  return r / (1.0 + r * tau_d);
}

double DetectorFit::tau_d() const {
  if (by_pol.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [p, f] : by_pol) sum += f.tau_d;
  return sum / static_cast<double>(by_pol.size());
}

double DetectorFit::tau_spread() const {
  if (by_pol.empty()) return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [p, f] : by_pol) {
    lo = std::min(lo, f.tau_d);
    hi = std::max(hi, f.tau_d);
  }
  return hi - lo;
}

namespace {

// Dead time is carried in microseconds so both parameters are O(1).
constexpr double kTauScale = 1e-6;

struct Point {
  double r_in;
  double r_det;
};

double cost(const std::vector<Point>& pts, double eta, double tau_us, double r_dark) {
  double c = 0.0;
  for (const Point& p : pts) {
    double r = (detected_rate_model(p.r_in, eta, tau_us * kTauScale, r_dark) - p.r_det) / p.r_det;
    c += r * r;
  }
  return c;
}

PolarizationFit fit_one(Polarization pol, const std::vector<Point>& pts, double r_dark, const FitOptions& opt) {
  const std::string name = polarization_name(pol);
  double eta = opt.eta0;
  double tau = opt.tau0 / kTauScale;
  double c = cost(pts, eta, tau, r_dark);
  double mu = 1e-3;
  int stalled = 0;
  int it = 0;
  bool done = false;
  while (!done && it < opt.max_iterations) {
    ++it;
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (const Point& p : pts) {
      double rp = eta * p.r_in + r_dark;
      double den = 1.0 + rp * tau * kTauScale;
      double res = (rp / den - p.r_det) / p.r_det;
      Eigen::Vector2d j(p.r_in / (den * den) / p.r_det, -rp * rp * kTauScale / (den * den) / p.r_det);
      jtj += j * j.transpose();
      jtr += j * res;
    }
    if (jtr.norm() <= 1e-15 * (1.0 + c)) break;

    for (;;) {
      Eigen::Matrix2d a = jtj;
      a.diagonal() += mu * jtj.diagonal();
      Eigen::Vector2d step = a.ldlt().solve(-jtr);
      double eta_new = eta + step(0);
      double tau_new = tau + step(1);
      double c_new = (eta_new > 0.0 && tau_new > 0.0) ? cost(pts, eta_new, tau_new, r_dark)
                                                       : std::numeric_limits<double>::infinity();
      bool tiny = std::abs(step(0)) <= 1e-12 * eta && std::abs(step(1)) <= 1e-12 * tau;
      if (c_new < c) {
        done = tiny || c - c_new <= 1e-12 * c;
        eta = eta_new;
        tau = tau_new;
        c = c_new;
        mu = std::max(mu / 3.0, 1e-12);
        stalled = 0;
        break;
      }
      // Rejected steps already at rounding size mean we sit on the minimum.
      if (tiny && std::isfinite(c_new)) {
        done = true;
        break;
      }
      mu *= 4.0;
      if (++stalled >= opt.max_stalled_steps) {
        if (c <= 1e-24 || jtr.norm() <= 1e-10 * std::sqrt(c)) {
          done = true;
          break;
        }
        throw FitDiverged("fit for polarization " + name + " made no progress in " +
                          std::to_string(opt.max_stalled_steps) + " consecutive steps");
      }
    }
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw FitDiverged("fit for polarization " + name + " left the efficiency range (0, 1]: eta = " +
                      std::to_string(eta));
  }
  if (!(tau > 0.0)) throw FitDiverged("fit for polarization " + name + " produced nonpositive dead time");
  double r_max = 0.0;
  for (const Point& p : pts) r_max = std::max(r_max, eta * p.r_in + r_dark);
  // Dead time driven onto the zero boundary: saturation no longer resolvable.
  if (r_max * tau * kTauScale < 1e-6) {
    throw FitDiverged("fit for polarization " + name + " drove the dead time to zero");
  }
  for (const Point& p : pts) {
    if (p.r_det * tau * kTauScale >= 1.0) {
      throw FitDiverged("fit for polarization " + name + ": detected rate exceeds the 1/tau_d saturation");
    }
  }
  return {eta, tau * kTauScale, std::sqrt(c), it};
}

}  // namespace

DetectorFit fit_detector(std::span<const CountRateSample> samples, double r_dark, const FitOptions& options) {
  if (!(r_dark >= 0.0)) throw std::invalid_argument("dark rate must be nonnegative");
  std::map<Polarization, std::vector<Point>> groups;
  for (const CountRateSample& s : samples) {
    if (!(s.r_in > 0.0) || !(s.r_det > 0.0)) {
      throw InsufficientData(std::string("rates must be positive (polarization ") +
                             polarization_name(s.polarization) + ")");
    }
    if (s.r_det > s.r_in) {
      throw InsufficientData(std::string("detected rate exceeds incident rate (polarization ") +
                             polarization_name(s.polarization) + ")");
    }
    groups[s.polarization].push_back({s.r_in, s.r_det});
  }
  if (groups.empty()) throw InsufficientData("no samples");

  DetectorFit fit;
  fit.r_dark = r_dark;
  for (const auto& [pol, pts] : groups) {
    if (pts.size() < 3) {
      throw InsufficientData(std::string("polarization ") + polarization_name(pol) + " has fewer than 3 samples");
    }
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                        [](const Point& a, const Point& b) { return a.r_in < b.r_in; });
    if (hi->r_in < 10.0 * lo->r_in) {
      throw InsufficientData(std::string("polarization ") + polarization_name(pol) +
                             " samples span less than one decade of incident rate");
    }
    fit.by_pol[pol] = fit_one(pol, pts, r_dark, options);
  }
  return fit;
}

EfficiencyOperator::EfficiencyOperator(const Matrix& gram, double psd_tol) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) {
    throw std::invalid_argument("efficiency operator must be a nonempty square matrix");
  }
  if (!gram.allFinite()) throw std::invalid_argument("efficiency operator has non-finite entries");
  if (hermiticity_error(gram) > 1e-12) throw NotPSD("efficiency operator is not Hermitian");
  gram_ = hermitian_part(gram);
  RealVector ev = hermitian_eigen(gram_).values;
  if (ev.minCoeff() < -psd_tol) {
    throw NotPSD("efficiency operator has negative eigenvalue " + std::to_string(ev.minCoeff()));
  }
  if (ev.maxCoeff() > 1.0 + psd_tol) {
    throw NotPSD("efficiency operator has eigenvalue above 1: " + std::to_string(ev.maxCoeff()));
  }
}

const Matrix& EfficiencyOperator::factor() const {
  if (!factor_) throw std::logic_error("efficiency operator has not been factorized");
  return *factor_;
}

EfficiencyOperator EfficiencyOperator::isotropic(double eta, int dim) {
  return EfficiencyOperator(eta * Matrix::Identity(dim, dim));
}

EfficiencyOperator tomography(double eta_h, double eta_v, double eta_d, double eta_l) {
  for (double e : {eta_h, eta_v, eta_d, eta_l}) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("tomography efficiencies must lie in [0, 1]");
  }
  double mean = (eta_h + eta_v) / 2.0;
  cplx beta(eta_d - mean, mean - eta_l);
  Matrix g(2, 2);
  g << eta_h, beta, std::conj(beta), eta_v;
  return EfficiencyOperator(g, 1e-9);
}

EfficiencyOperator factorize(const EfficiencyOperator& op) {
  HermitianEigen es = hermitian_eigen(op.gram());
  if (es.values.minCoeff() < kInvertibilityFloor) {
    throw SingularGram("efficiency operator has eigenvalue " + std::to_string(es.values.minCoeff()) +
                       " below the invertibility floor");
  }
  EfficiencyOperator out = op;
  out.factor_ = es.values.cwiseSqrt().asDiagonal() * es.vectors.adjoint();
  return out;
}

EfficiencyOperator ensure_factorized(const EfficiencyOperator& op) {
  return op.has_factor() ? op : factorize(op);
}

namespace {

// Fixes the global phase so the first non-negligible component is real positive.
Vector canonical_phase(Vector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      break;
    }
  }
  return v.normalized();
}

bool lexicographically_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

}  // namespace

EigenState min_eigen_state(const EfficiencyOperator& op) {
  HermitianEigen es = hermitian_eigen(op.gram());
  double lo = es.values(0);
  Vector best = canonical_phase(es.vectors.col(0));
  // Degenerate minimum: choose among the standard-basis projections onto the
  // eigenspace so the answer does not depend on solver internals.
  double scale = std::max(1.0, std::abs(es.values(es.values.size() - 1)));
  if (es.values.size() > 1 && es.values(1) - lo <= 1e-12 * scale) {
    Eigen::Index k = 1;
    while (k < es.values.size() && es.values(k) - lo <= 1e-12 * scale) ++k;
    Matrix basis = es.vectors.leftCols(k);
    bool have = false;
    for (Eigen::Index i = 0; i < op.dim(); ++i) {
      Vector e = Vector::Zero(op.dim());
      e(i) = 1.0;
      Vector proj = basis * (basis.adjoint() * e);
      if (proj.norm() < 1e-6) continue;
      Vector cand = canonical_phase(proj);
      if (!have || lexicographically_less(cand, best)) {
        best = cand;
        have = true;
      }
    }
  }
  return {best, lo};
}

double efficiency_for(const EfficiencyOperator& op, const Vector& sigma) {
  if (sigma.size() != op.dim()) throw std::invalid_argument("state dimension does not match efficiency operator");
  return (sigma.adjoint() * op.gram() * sigma)(0, 0).real() / sigma.squaredNorm();
}

}  // namespace ltqkd
