#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ltqkd/linalg.hpp"

namespace ltqkd {

inline constexpr double kInvertibilityFloor = 1e-6;

enum class Polarization { H, V, D, L };
inline constexpr Polarization kPolarizations[] = {Polarization::H, Polarization::V, Polarization::D,
                                                  Polarization::L};
const char* polarization_name(Polarization p);
std::optional<Polarization> parse_polarization(std::string_view s);
// Unit T-mode state: H=(1,0), V=(0,1), D=(1,1)/sqrt2, L=(1,i)/sqrt2.
Vector polarization_state(Polarization p);

// R'/(1 + R' tau_d) with R' = eta r_in + r_dark.
double detected_rate_model(double r_in, double eta, double tau_d, double r_dark);

struct CountRateSample {
  Polarization polarization;
  double r_in;   // Hz
  double r_det;  // Hz
};

struct PolarizationFit {
  double eta = 0.0;
  double tau_d = 0.0;          // s
  double residual_norm = 0.0;  // l2 norm of relative residuals
  int iterations = 0;
};

struct DetectorFit {
  std::map<Polarization, PolarizationFit> by_pol;
  double r_dark = 0.0;

  double eta(Polarization p) const { return by_pol.at(p).eta; }
  // Mean of the per-polarization dead times and their max - min spread.
  double tau_d() const;
  double tau_spread() const;
};

struct FitOptions {
  double eta0 = 0.25;
  double tau0 = 20e-6;
  int max_iterations = 500;
  int max_stalled_steps = 50;
};

// Fits eta and tau_d per polarization by damped Gauss-Newton on relative
// residuals. Polarizations absent from samples are absent from the result.
DetectorFit fit_detector(std::span<const CountRateSample> samples, double r_dark,
                         const FitOptions& options = {});

// F^dag F on the T mode, optionally with its factor F.
class EfficiencyOperator {
 public:
  // Validates Hermiticity (1e-12) and 0 <= eigenvalues <= 1 within psd_tol.
  explicit EfficiencyOperator(const Matrix& gram, double psd_tol = 1e-12);

  const Matrix& gram() const { return gram_; }
  int dim() const { return static_cast<int>(gram_.rows()); }
  bool has_factor() const { return factor_.has_value(); }
  // Throws std::logic_error when factorize() has not been applied.
  const Matrix& factor() const;

  static EfficiencyOperator isotropic(double eta, int dim = 2);

 private:
  friend EfficiencyOperator factorize(const EfficiencyOperator& op);

  Matrix gram_;
  std::optional<Matrix> factor_;
};

EfficiencyOperator tomography(double eta_h, double eta_v, double eta_d, double eta_l);

// Populates F = D^{1/2} U^dag from gram = U D U^dag. Throws SingularGram when
// the smallest eigenvalue is below kInvertibilityFloor.
EfficiencyOperator factorize(const EfficiencyOperator& op);
// op itself when already factorized, otherwise factorize(op).
EfficiencyOperator ensure_factorized(const EfficiencyOperator& op);

struct EigenState {
  Vector state;  // unit norm, first nonzero component real positive
  double eigenvalue;
};

EigenState min_eigen_state(const EfficiencyOperator& op);

// <sigma|F^dag F|sigma> for a unit T-mode state.
double efficiency_for(const EfficiencyOperator& op, const Vector& sigma);

}  // namespace ltqkd
