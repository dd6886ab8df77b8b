#include "ltqkd/security.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ltqkd/errors.hpp"

namespace ltqkd {

const char* lambda_source_name(LambdaSource s) { return s == LambdaSource::sdp ? "sdp" : "analytical"; }

const char* report_status_name(ReportStatus s) {
  switch (s) {
    case ReportStatus::ok:
      return "ok";
    case ReportStatus::no_sifted_key:
      return "no_sifted_key";
    case ReportStatus::no_virtual_detections:
      return "no_virtual_detections";
    case ReportStatus::sdp_infeasible:
      return "sdp_infeasible";
  }
  return "?";
}

GramDecomposition gram_diagonalize(const EfficiencyOperator& f0, const EfficiencyOperator& f1) {
  if (f0.dim() != f1.dim()) throw std::invalid_argument("detector efficiency operators differ in dimension");
  EfficiencyOperator f0f = ensure_factorized(f0);
  if (min_eigenvalue(f1.gram()) < kInvertibilityFloor) {
    throw SingularGram("efficiency operator of detector 1 is not invertible");
  }
  const Matrix& F0 = f0f.factor();
  Matrix m = hermitian_part(F0 * checked_inverse(f1.gram()) * F0.adjoint());
  HermitianEigen es = hermitian_eigen(m);
  const Eigen::Index n = es.values.size();
  GramDecomposition g;
  g.d = es.values.reverse().cwiseMax(0.0);
  g.u = es.vectors.rowwise().reverse();
  g.d_max = g.d(0);
  g.d_min = g.d(n - 1);
  return g;
}

CMatrix build_c(const GramDecomposition& g, const EfficiencyOperator& f0) {
  EfficiencyOperator f0f = ensure_factorized(f0);
  RealVector c1(g.d.size());
  for (Eigen::Index i = 0; i < g.d.size(); ++i) {
    double eta = g.d(i) > 0.0 ? std::min(1.0 / g.d(i), 1.0) : 1.0;
    c1(i) = std::sqrt(eta);
  }
  Matrix c = c1.cast<cplx>().asDiagonal() * g.u.adjoint() * f0f.factor();
  return {c, c1};
}

LambdaBounds lambda_analytical(const GramDecomposition& g) {
  if (!(g.d_min > 0.0)) throw SingularGram("Gram decomposition has a zero eigenvalue");
  double eta_min = std::min(1.0 / g.d_max, 1.0);
  double eta_max = std::min(1.0 / g.d_min, 1.0);
  return {eta_min, eta_max, eta_min * g.d_min, eta_max * g.d_max};
}

Eigen::Matrix3d qtilde_system(const SignalStates& states, const ProtocolProbs& probs) {
  Eigen::Matrix3d m;
  for (Signal i : kSignals) {
    PauliVector w = pauli_decomposition(states[i]);
    double pc = probs.p_c(i);
    m.row(static_cast<int>(i)) << pc * w.w_id, pc * w.w_x, pc * w.w_z;
  }
  return m;
}

QTilde qtilde(const DetectionStats& stats, const SignalStates& states, const ProtocolProbs& probs) {
  Eigen::Matrix3d m = qtilde_system(states, probs);
  double cond = condition_number(m);
  if (!(cond < kCondMax)) {
    throw IllConditioned(cond, "q-tilde system is ill-conditioned (condition number " + std::to_string(cond) +
                                   "); the signal states are nearly collinear or X-basis rounds are absent");
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
  QTilde q;
  for (int s = 0; s < 2; ++s) {
    Eigen::Vector3d rhs;
    for (Signal i : kSignals) rhs(static_cast<int>(i)) = stats.at(s, Basis::X, i);
    Eigen::Vector3d sol = lu.solve(rhs);
    q.q[s] = {sol(0), sol(1), sol(2)};
  }
  return q;
}

double p_x_virt_lower(const LambdaBounds& lam, const QTilde& q, double c01, const ProtocolProbs& probs) {
  double k = probs.p_za() * probs.p_zb();
  double coupled = (lam.lp0 + lam.lm0) / 2.0 * q.x(0) + (lam.lp1 + lam.lm1) / 2.0 * q.x(1);
  double direct = (lam.lp0 - 3.0 * lam.lm0) / 2.0 * q.one(0) + (lam.lp1 - 3.0 * lam.lm1) / 2.0 * q.one(1);
  return k * (c01 * coupled - direct);
}

double p_err_upper(const LambdaBounds& lam, const QTilde& q, double c01, const ProtocolProbs& probs) {
  double k = probs.p_za() * probs.p_zb();
  double e0 = (3.0 * lam.lp0 - lam.lm0) / 2.0 * q.one(0) - (lam.lp0 + lam.lm0) / 2.0 * q.x(0);
  double e1 = (3.0 * lam.lp1 - lam.lm1) / 2.0 * q.one(1) + (lam.lp1 + lam.lm1) / 2.0 * q.x(1);
  return k * ((1.0 - c01) / 2.0 * e0 + (1.0 + c01) / 2.0 * e1);
}

PhaseErrorBound phase_error_upper(const LambdaBounds& lam, const QTilde& q, double c01, const ProtocolProbs& probs,
                                  double p_x_virt_l) {
  if (!(p_x_virt_l > 0.0)) throw NoVirtualDetections("lower bound on virtual X detections is not positive");
  PhaseErrorBound b;
  b.p_err_u = p_err_upper(lam, q, c01, probs);
  b.e_p_u_unclamped = b.p_err_u / p_x_virt_l;
  b.e_p_u = std::clamp(b.e_p_u_unclamped, 0.0, 0.5);
  return b;
}

SiftedStats sifted_stats(const DetectionStats& stats) {
  double sift = 0.0;
  for (int s = 0; s < 2; ++s) sift += stats.at(s, Basis::Z, Signal::Z0) + stats.at(s, Basis::Z, Signal::Z1);
  if (!(sift > 0.0)) throw NoSiftedKey("no sifted key rounds (p_z_sift = 0)");
  double err = stats.at(0, Basis::Z, Signal::Z1) + stats.at(1, Basis::Z, Signal::Z0);
  return {sift, std::clamp(err / sift, 0.0, 1.0)};
}

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -(x * std::log2(x) + (1.0 - x) * std::log1p(-x) / std::numbers::ln2);
}

double key_rate(double p_z_sift, double r_x_virt_l, double e_p_u, double e_b, double f_ec) {
  if (!(e_b >= 0.0 && e_b <= 1.0)) throw std::invalid_argument("e_b must lie in [0, 1]");
  if (!(e_p_u >= 0.0 && e_p_u <= 0.5)) throw std::invalid_argument("e_p_u must lie in [0, 0.5]");
  if (!(r_x_virt_l >= 0.0 && r_x_virt_l <= 1.0)) throw std::invalid_argument("r_x_virt_l must lie in [0, 1]");
  double r = p_z_sift * (r_x_virt_l * (1.0 - binary_entropy(e_p_u)) - f_ec * binary_entropy(e_b));
  return std::max(0.0, r);
}

SdpBox sdp_feasible_box(const EfficiencyOperator& f0, const EfficiencyOperator& f1, const CMatrix& c) {
  SdpBox box;
  const EfficiencyOperator* ops[2] = {&f0, &f1};
  for (int s = 0; s < 2; ++s) {
    EfficiencyOperator f = ensure_factorized(*ops[s]);
    Matrix k = c.c * checked_inverse(f.factor());
    RealVector ev = hermitian_eigen(k.adjoint() * k).values;
    box.lo[s] = std::max(0.0, ev(0));
    box.hi[s] = ev(ev.size() - 1);
  }
  return box;
}

namespace {

using Vec4 = Eigen::Vector4d;

LambdaBounds to_lambda(const Vec4& x) { return {x(0), x(1), x(2), x(3)}; }

}  // namespace

LambdaBounds lambda_sdp(const EfficiencyOperator& f0, const EfficiencyOperator& f1, const CMatrix& c,
                        const QTilde& q, double c01, const ProtocolProbs& probs, double p_z_sift) {
  if (!(p_z_sift > 0.0)) throw std::invalid_argument("lambda_sdp requires p_z_sift > 0");
  SdpBox box = sdp_feasible_box(f0, f1, c);

  // The objective and the error bound are linear in (lm0, lp0, lm1, lp1)
  // with no constant term, so unit vectors recover their coefficients.
  Vec4 obj;
  Vec4 err;
  for (int k = 0; k < 4; ++k) {
    Vec4 e = Vec4::Unit(k);
    obj(k) = p_x_virt_lower(to_lambda(e), q, c01, probs);
    err(k) = p_err_upper(to_lambda(e), q, c01, probs);
  }

  // Rows of A x <= b.
  Eigen::Matrix<double, 8, 4> a = Eigen::Matrix<double, 8, 4>::Zero();
  Eigen::Matrix<double, 8, 1> b;
  for (int s = 0; s < 2; ++s) {
    int lm = 2 * s;
    int lp = 2 * s + 1;
    a(3 * s, lm) = -1.0;
    b(3 * s) = 0.0;
    a(3 * s + 1, lm) = 1.0;
    b(3 * s + 1) = box.lo[s];
    a(3 * s + 2, lp) = -1.0;
    b(3 * s + 2) = -box.hi[s];
  }
  a.row(6) = obj.transpose();
  b(6) = p_z_sift;
  a.row(7) = (err - obj / 2.0).transpose();
  b(7) = 0.0;

  double best = -std::numeric_limits<double>::infinity();
  Vec4 best_x = Vec4::Zero();
  bool found = false;
  for (int i0 = 0; i0 < 8; ++i0) {
    for (int i1 = i0 + 1; i1 < 8; ++i1) {
      for (int i2 = i1 + 1; i2 < 8; ++i2) {
        for (int i3 = i2 + 1; i3 < 8; ++i3) {
          const int rows[4] = {i0, i1, i2, i3};
          Eigen::Matrix4d sub;
          Vec4 rhs;
          for (int r = 0; r < 4; ++r) {
            sub.row(r) = a.row(rows[r]);
            rhs(r) = b(rows[r]);
          }
          Eigen::FullPivLU<Eigen::Matrix4d> lu(sub);
          if (lu.rank() < 4) continue;
          Vec4 x = lu.solve(rhs);
          bool feasible = true;
          for (int r = 0; r < 8 && feasible; ++r) {
            double lhs = a.row(r).dot(x);
            double scale = std::abs(b(r)) + a.row(r).cwiseAbs().dot(x.cwiseAbs());
            feasible = lhs - b(r) <= 1e-12 * scale + 1e-300;
          }
          if (!feasible) continue;
          double value = obj.dot(x);
          if (!found || value > best) {
            best = value;
            best_x = x;
            found = true;
          }
        }
      }
    }
  }
  if (!found || !(best > 0.0)) {
    throw Infeasible("no Lambda satisfies the operator constraints with a positive virtual detection bound");
  }
  // Snap onto the box so rounding cannot break the operator sandwich.
  LambdaBounds lam = to_lambda(best_x);
  lam.lm0 = std::clamp(lam.lm0, 0.0, box.lo[0]);
  lam.lm1 = std::clamp(lam.lm1, 0.0, box.lo[1]);
  lam.lp0 = std::max(lam.lp0, box.hi[0]);
  lam.lp1 = std::max(lam.lp1, box.hi[1]);
  return lam;
}

PipelineInputs swap_detector_labels(const PipelineInputs& in) {
  return {in.d1, in.d0, in.states.detector_swapped(), in.probs, in.stats.detector_swapped(), in.f_ec};
}

SecurityReport evaluate_security(const PipelineInputs& in, LambdaSource source) {
  if (!in.states.is_symmetric()) {
    throw std::invalid_argument(
        "signal Z states are not symmetric about the X axis of Bob's frame; rotate them with "
        "SignalStates::symmetrized() and supply statistics measured in that frame");
  }
  SecurityReport rep;
  rep.lambda_source = source;
  SiftedStats ss;
  try {
    ss = sifted_stats(in.stats);
  } catch (const NoSiftedKey&) {
    rep.p_z_sift = 0.0;
    rep.status = ReportStatus::no_sifted_key;
    return rep;
  }
  rep.p_z_sift = ss.p_z_sift;
  rep.e_b = ss.e_b;

  EfficiencyOperator f0 = ensure_factorized(in.d0);
  EfficiencyOperator f1 = ensure_factorized(in.d1);
  GramDecomposition g = gram_diagonalize(f0, f1);
  CMatrix c = build_c(g, f0);
  QTilde q = qtilde(in.stats, in.states, in.probs);
  double c01 = in.states.c01();

  LambdaBounds lam = lambda_analytical(g);
  if (source == LambdaSource::sdp) {
    try {
      lam = lambda_sdp(f0, f1, c, q, c01, in.probs, ss.p_z_sift);
    } catch (const Infeasible&) {
      rep.lambdas = lam;
      rep.p_x_virt_l = p_x_virt_lower(lam, q, c01, in.probs);
      rep.status = ReportStatus::sdp_infeasible;
      return rep;
    }
  }
  rep.lambdas = lam;
  rep.p_x_virt_l = p_x_virt_lower(lam, q, c01, in.probs);
  if (!(rep.p_x_virt_l > 0.0)) {
    rep.status = ReportStatus::no_virtual_detections;
    return rep;
  }
  PhaseErrorBound pe = phase_error_upper(lam, q, c01, in.probs, rep.p_x_virt_l);
  rep.e_p_u = pe.e_p_u;
  rep.e_p_u_unclamped = pe.e_p_u_unclamped;
  rep.r_x_virt_l = std::clamp(rep.p_x_virt_l / ss.p_z_sift, 0.0, 1.0);
  rep.skr = key_rate(ss.p_z_sift, rep.r_x_virt_l, rep.e_p_u, rep.e_b, in.f_ec);
  return rep;
}

SecurityReport optimize_labeling(const PipelineInputs& in, LambdaSource source) {
  SecurityReport direct = evaluate_security(in, source);
  SecurityReport swapped = evaluate_security(swap_detector_labels(in), source);
  swapped.labels_swapped = true;
  return swapped.skr > direct.skr ? swapped : direct;
}

}  // namespace ltqkd
