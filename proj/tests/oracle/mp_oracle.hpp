#pragma once

// 50-digit re-evaluation of the key-rate pipeline for two-dimensional T modes.
// Everything here is closed-form scalar algebra so it shares no code path with
// the library (no Eigen, no library calls).

#include <array>
#include <complex>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using real = boost::multiprecision::cpp_bin_float_50;

struct cnum {
  real re = 0;
  real im = 0;
};
inline cnum operator+(cnum a, cnum b) { return {a.re + b.re, a.im + b.im}; }
inline cnum operator-(cnum a, cnum b) { return {a.re - b.re, a.im - b.im}; }
inline cnum operator*(cnum a, cnum b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline cnum conj(cnum a) { return {a.re, -a.im}; }
inline real norm2(cnum a) { return a.re * a.re + a.im * a.im; }

// [[a, b], [conj(b), d]] with a, d real.
struct Herm2 {
  real a;
  cnum b;
  real d;

  static Herm2 from(const std::complex<double>& a, const std::complex<double>& b, const std::complex<double>& d) {
    return {real(a.real()), {real(b.real()), real(b.imag())}, real(d.real())};
  }
  real det() const { return a * d - norm2(b); }
  real quad(cnum v0, cnum v1) const {
    // v^dag M v
    cnum mv0 = cnum{a, 0} * v0 + b * v1;
    cnum mv1 = conj(b) * v0 + cnum{d, 0} * v1;
    return (conj(v0) * mv0 + conj(v1) * mv1).re;
  }
  real min_eig() const {
    real h = (a - d) / 2;
    return (a + d) / 2 - sqrt(h * h + norm2(b));
  }
};

inline Herm2 from_tomography(double h, double v, double dg, double l) {
  real rh(h), rv(v), rd(dg), rl(l);
  real mean = (rh + rv) / 2;
  return {rh, {rd - mean, mean - rl}, rv};
}

struct Inputs {
  Herm2 g0;
  Herm2 g1;
  real theta = 0;
  real xi = boost::math::constants::half_pi<real>();
  real p_za = real(2) / 3;
  real p_zb = real(2) / 3;
  real alpha = real(2) / 10;
  real length = 0;
  real p_dark = real(1) / 1000000;
  real f_ec = real(116) / 100;
  bool eve_min_eig = true;
  cnum eve0{1, 0};  // explicit state when !eve_min_eig
  cnum eve1{0, 0};
};

struct Result {
  real eta0 = 0, eta1 = 0;
  std::array<std::array<std::array<real, 3>, 2>, 2> p{};  // [s][beta: 0=X,1=Z][i]
  real p_sift = 0, e_b = 0;
  std::array<std::array<real, 3>, 2> q{};
  real d_hi = 0, d_lo = 0;
  real lm0 = 0, lp0 = 0, lm1 = 0, lp1 = 0;
  real c01 = 0;
  real p_virt = 0, p_err = 0, e_p = 0, r = 0, skr = 0;
};

inline real h2(const real& x) {
  if (x <= 0 || x >= 1) return 0;
  return -(x * log(x) + (1 - x) * log(1 - x)) / log(real(2));
}

inline real det3(const std::array<std::array<real, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Evaluates one detector labeling. States are (cos t/2, sin t/2) and
// (sin t/2, cos t/2) for the Z pair; swap applies the relabeling frame map.
inline Result evaluate(const Inputs& in, bool swap) {
  Result out;
  real c = cos(in.theta / 2), s = sin(in.theta / 2);
  std::array<std::array<real, 2>, 3> phi{{{c, s}, {s, c}, {cos(in.xi / 2), sin(in.xi / 2)}}};
  Herm2 g0 = in.g0, g1 = in.g1;

  // Eve's state is fixed by the physical detector 1 regardless of labels.
  cnum v0, v1;
  if (in.eve_min_eig) {
    real lo = in.g1.min_eig();
    if (norm2(in.g1.b) == 0) {
      bool first = in.g1.a <= in.g1.d;
      v0 = {first ? real(1) : real(0), 0};
      v1 = {first ? real(0) : real(1), 0};
    } else {
      v0 = in.g1.b;
      v1 = {lo - in.g1.a, 0};
    }
  } else {
    v0 = in.eve0;
    v1 = in.eve1;
  }
  real n = sqrt(norm2(v0) + norm2(v1));
  v0 = {v0.re / n, v0.im / n};
  v1 = {v1.re / n, v1.im / n};
  real eta[2] = {in.g0.quad(v0, v1), in.g1.quad(v0, v1)};

  if (swap) {
    std::swap(g0, g1);
    std::swap(eta[0], eta[1]);
    // (a0, a1) -> (a1, -a0); new 0Z from old 1Z, new 1Z from -old 0Z.
    auto zx = [](std::array<real, 2> v) { return std::array<real, 2>{v[1], -v[0]}; };
    std::array<real, 2> n0 = zx(phi[1]);
    std::array<real, 2> n1 = zx(phi[0]);
    n1 = {-n1[0], -n1[1]};
    phi = {n0, n1, zx(phi[2])};
  }
  out.eta0 = eta[0];
  out.eta1 = eta[1];

  real eta_ch = pow(real(10), -in.alpha * in.length / 10);
  real p_xa = 1 - in.p_za, p_xb = 1 - in.p_zb;
  real alice[3] = {in.p_za / 2, in.p_za / 2, p_xa};
  real rs2 = sqrt(real(2)) / 2;
  for (int i = 0; i < 3; ++i) {
    for (int beta = 0; beta < 2; ++beta) {
      real pb = beta == 1 ? in.p_zb : p_xb;
      for (int so = 0; so < 2; ++so) {
        real amp = beta == 1 ? phi[i][so] : (so == 0 ? (phi[i][0] + phi[i][1]) * rs2 : (phi[i][0] - phi[i][1]) * rs2);
        real click = eta_ch * amp * amp * eta[so];
        out.p[so][beta][i] =
            pb * alice[i] * (click * (1 - in.p_dark / 2) + in.p_dark * (1 - click) * (1 - in.p_dark / 2));
      }
    }
  }
  out.p_sift = out.p[0][1][0] + out.p[0][1][1] + out.p[1][1][0] + out.p[1][1][1];
  out.e_b = (out.p[0][1][1] + out.p[1][1][0]) / out.p_sift;

  // q-tilde by Cramer's rule.
  real pc[3] = {in.p_za * p_xb / 2, in.p_za * p_xb / 2, p_xa * p_xb};
  std::array<std::array<real, 3>, 3> m;
  for (int i = 0; i < 3; ++i) {
    m[i] = {pc[i], pc[i] * 2 * phi[i][0] * phi[i][1], pc[i] * (phi[i][0] * phi[i][0] - phi[i][1] * phi[i][1])};
  }
  real dm = det3(m);
  for (int so = 0; so < 2; ++so) {
    for (int col = 0; col < 3; ++col) {
      auto mc = m;
      for (int i = 0; i < 3; ++i) mc[i][col] = out.p[so][0][i];
      out.q[so][col] = det3(mc) / dm;
    }
  }

  // Spectrum of D equals that of G1^{-1} G0.
  real det1 = g1.det();
  // tr(G1^{-1} G0) = (d1 a0 + a1 d0 - 2 Re(conj(b1) b0)) / det(G1)
  real tr = (g1.d * g0.a + g1.a * g0.d - 2 * (conj(g1.b) * g0.b).re) / det1;
  real dt = g0.det() / det1;
  real disc = tr * tr / 4 - dt;
  if (disc < 0) disc = 0;
  out.d_hi = tr / 2 + sqrt(disc);
  out.d_lo = tr / 2 - sqrt(disc);
  real emin = out.d_hi > 1 ? 1 / out.d_hi : real(1);
  real emax = out.d_lo > 1 ? 1 / out.d_lo : real(1);
  out.lm0 = emin;
  out.lp0 = emax;
  out.lm1 = emin * out.d_lo;
  out.lp1 = emax * out.d_hi;

  out.c01 = phi[0][0] * phi[1][0] + phi[0][1] * phi[1][1];
  real k = in.p_za * in.p_zb;
  const auto& q = out.q;
  out.p_virt = k * (out.c01 * ((out.lp0 + out.lm0) / 2 * q[0][1] + (out.lp1 + out.lm1) / 2 * q[1][1]) -
                    ((out.lp0 - 3 * out.lm0) / 2 * q[0][0] + (out.lp1 - 3 * out.lm1) / 2 * q[1][0]));
  out.p_err = k * ((1 - out.c01) / 2 * ((3 * out.lp0 - out.lm0) / 2 * q[0][0] - (out.lp0 + out.lm0) / 2 * q[0][1]) +
                   (1 + out.c01) / 2 * ((3 * out.lp1 - out.lm1) / 2 * q[1][0] + (out.lp1 + out.lm1) / 2 * q[1][1]));
  if (out.p_virt <= 0) return out;
  out.e_p = out.p_err / out.p_virt;
  if (out.e_p < 0) out.e_p = 0;
  if (out.e_p > real(1) / 2) out.e_p = real(1) / 2;
  out.r = out.p_virt / out.p_sift;
  if (out.r > 1) out.r = 1;
  real rate = out.p_sift * (out.r * (1 - h2(out.e_p)) - in.f_ec * h2(out.e_b));
  out.skr = rate > 0 ? rate : real(0);
  return out;
}

// Larger of the two labelings.
inline Result evaluate_best(const Inputs& in) {
  Result a = evaluate(in, false);
  Result b = evaluate(in, true);
  return b.skr > a.skr ? b : a;
}

}  // namespace oracle
