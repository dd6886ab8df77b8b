#pragma once

#include <array>

#include "ltqkd/detection_stats.hpp"
#include "ltqkd/detector.hpp"
#include "ltqkd/linalg.hpp"
#include "ltqkd/qstate.hpp"

namespace ltqkd {

inline constexpr double kCondMax = 1e8;

// F0 (F1^dag F1)^{-1} F0^dag = U diag(d) U^dag with d descending.
struct GramDecomposition {
  Matrix u;
  RealVector d;
  double d_min = 0.0;
  double d_max = 0.0;
};

struct CMatrix {
  Matrix c;
  RealVector c1_diag;  // sqrt(min(1/d_i, 1))
};

struct LambdaBounds {
  double lm0 = 0.0;
  double lp0 = 0.0;
  double lm1 = 0.0;
  double lp1 = 0.0;

  double minus(int s) const { return s == 0 ? lm0 : lm1; }
  double plus(int s) const { return s == 0 ? lp0 : lp1; }
};

// Pauli transfer coefficients (q_{s_X,1}, q_{s_X,X}, q_{s_X,Z}) for s = 0, 1.
struct QTilde {
  std::array<std::array<double, 3>, 2> q{};

  double one(int s) const { return q[s][0]; }
  double x(int s) const { return q[s][1]; }
  double z(int s) const { return q[s][2]; }
};

struct PhaseErrorBound {
  double e_p_u = 0.0;            // clamped to [0, 0.5]
  double e_p_u_unclamped = 0.0;
  double p_err_u = 0.0;          // upper bound on the virtual error probability
};

struct SiftedStats {
  double p_z_sift = 0.0;
  double e_b = 0.0;
};

enum class LambdaSource { analytical, sdp };
const char* lambda_source_name(LambdaSource s);

enum class ReportStatus {
  ok,
  no_sifted_key,           // p_z_sift = 0
  no_virtual_detections,   // p_X^virt,L <= 0 with the chosen Lambda
  sdp_infeasible,          // LP has no feasible Lambda with positive objective
};
const char* report_status_name(ReportStatus s);

struct SecurityReport {
  double p_z_sift = 0.0;
  double e_b = 0.0;
  double p_x_virt_l = 0.0;
  double r_x_virt_l = 0.0;
  double e_p_u = 0.5;
  double e_p_u_unclamped = 0.5;
  double skr = 0.0;
  LambdaSource lambda_source = LambdaSource::analytical;
  LambdaBounds lambdas;
  ReportStatus status = ReportStatus::ok;
  bool labels_swapped = false;
};

GramDecomposition gram_diagonalize(const EfficiencyOperator& f0, const EfficiencyOperator& f1);
CMatrix build_c(const GramDecomposition& g, const EfficiencyOperator& f0);
LambdaBounds lambda_analytical(const GramDecomposition& g);

// Rows p_c (1, V^x_c, V^z_c) for c = 0_Z, 1_Z, 0_X.
Eigen::Matrix3d qtilde_system(const SignalStates& states, const ProtocolProbs& probs);
QTilde qtilde(const DetectionStats& stats, const SignalStates& states, const ProtocolProbs& probs);

double p_x_virt_lower(const LambdaBounds& lam, const QTilde& q, double c01, const ProtocolProbs& probs);
// Unclamped upper bound on the virtual error probability.
double p_err_upper(const LambdaBounds& lam, const QTilde& q, double c01, const ProtocolProbs& probs);
PhaseErrorBound phase_error_upper(const LambdaBounds& lam, const QTilde& q, double c01,
                                  const ProtocolProbs& probs, double p_x_virt_l);

SiftedStats sifted_stats(const DetectionStats& stats);

double binary_entropy(double x);
double key_rate(double p_z_sift, double r_x_virt_l, double e_p_u, double e_b, double f_ec);

// Feasible ranges of the operator constraints: lambda_s^- in [0, lo[s]] and
// lambda_s^+ in [hi[s], inf), from the spectrum of F_s^{-dag} C^dag C F_s^{-1}.
struct SdpBox {
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
};
SdpBox sdp_feasible_box(const EfficiencyOperator& f0, const EfficiencyOperator& f1, const CMatrix& c);

LambdaBounds lambda_sdp(const EfficiencyOperator& f0, const EfficiencyOperator& f1, const CMatrix& c,
                        const QTilde& q, double c01, const ProtocolProbs& probs, double p_z_sift);

struct PipelineInputs {
  EfficiencyOperator d0;
  EfficiencyOperator d1;
  SignalStates states;
  ProtocolProbs probs;
  DetectionStats stats;
  double f_ec = 1.16;
};

// Exchanges D0 and D1 together with states and statistics.
PipelineInputs swap_detector_labels(const PipelineInputs& in);

// Full pipeline for the labeling given. Detectors are factorized as needed.
SecurityReport evaluate_security(const PipelineInputs& in, LambdaSource source);

// Runs both labelings and keeps the larger rate.
SecurityReport optimize_labeling(const PipelineInputs& in, LambdaSource source);

}  // namespace ltqkd
