#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ltqkd/channel.hpp"
#include "ltqkd/detector.hpp"
#include "ltqkd/errors.hpp"
#include "ltqkd/proofcheck.hpp"
#include "ltqkd/qstate.hpp"
#include "ltqkd/security.hpp"

namespace py = pybind11;
using namespace ltqkd;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Secret key rates for the loss-tolerant protocol with flawed states and mismatched detectors";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DegenerateStates>(m, "DegenerateStates", base.ptr());
  py::register_exception<FitDiverged>(m, "FitDiverged", base.ptr());
  py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
  py::register_exception<NotPSD>(m, "NotPSD", base.ptr());
  py::register_exception<SingularGram>(m, "SingularGram", base.ptr());
  py::register_exception<IllConditioned>(m, "IllConditioned", base.ptr());
  py::register_exception<NoVirtualDetections>(m, "NoVirtualDetections", base.ptr());
  py::register_exception<NoSiftedKey>(m, "NoSiftedKey", base.ptr());
  py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
  py::register_exception<InvalidFilter>(m, "InvalidFilter", base.ptr());
  py::register_exception<BoundViolated>(m, "BoundViolated", base.ptr());

  py::class_<BlochQubit>(m, "BlochQubit")
      .def(py::init<double, double>(), py::arg("amp0"), py::arg("amp1"))
      .def_property_readonly("amp0", &BlochQubit::amp0)
      .def_property_readonly("amp1", &BlochQubit::amp1)
      .def("bloch", [](const BlochQubit& q) {
        BlochVector v = q.bloch();
        return py::make_tuple(v.x, v.y, v.z);
      })
      .def("__repr__", [](const BlochQubit& q) {
        return "BlochQubit(" + std::to_string(q.amp0()) + ", " + std::to_string(q.amp1()) + ")";
      });

  m.def("flawed_z_state", &flawed_z_state, py::arg("bit"), py::arg("theta"));
  m.def("flawed_x_state", &flawed_x_state, py::arg("xi"));
  m.def("overlap", &overlap);
  m.def("virtual_x_states", [](const BlochQubit& a, const BlochQubit& b) {
    VirtualXStates v = virtual_x_states(a, b);
    return py::make_tuple(v.plus, v.minus, v.p0x_virt);
  });
  m.def("pauli_decomposition", [](const BlochQubit& q) {
    PauliVector w = pauli_decomposition(q);
    return py::make_tuple(w.w_id, w.w_x, w.w_y, w.w_z);
  });

  py::class_<SignalStates>(m, "SignalStates")
      .def_static("from_theta", &SignalStates::from_theta, py::arg("theta"), py::arg("xi") = 1.5707963267948966)
      .def_readonly("phi0z", &SignalStates::phi0z)
      .def_readonly("phi1z", &SignalStates::phi1z)
      .def_readonly("phi0x", &SignalStates::phi0x)
      .def("c01", &SignalStates::c01);

  py::class_<ProtocolProbs>(m, "ProtocolProbs")
      .def(py::init<double, double>(), py::arg("p_za") = 2.0 / 3.0, py::arg("p_zb") = 2.0 / 3.0)
      .def_property_readonly("p_za", &ProtocolProbs::p_za)
      .def_property_readonly("p_zb", &ProtocolProbs::p_zb);

  m.def("detected_rate_model", &detected_rate_model, py::arg("r_in"), py::arg("eta"), py::arg("tau_d"),
        py::arg("r_dark"));
  m.def(
      "fit_detector",
      [](const std::vector<std::tuple<std::string, double, double>>& rows, double r_dark) {
        std::vector<CountRateSample> samples;
        for (const auto& [pol, r_in, r_det] : rows) {
          auto p = parse_polarization(pol);
          if (!p) throw py::value_error("polarization must be one of H, V, D, L");
          samples.push_back({*p, r_in, r_det});
        }
        DetectorFit fit = fit_detector(samples, r_dark);
        py::dict eta;
        py::dict tau;
        for (const auto& [p, f] : fit.by_pol) {
          eta[polarization_name(p)] = f.eta;
          tau[polarization_name(p)] = f.tau_d;
        }
        py::dict out;
        out["eta"] = eta;
        out["tau_d_by_pol"] = tau;
        out["tau_d"] = fit.tau_d();
        out["r_dark"] = fit.r_dark;
        return out;
      },
      py::arg("samples"), py::arg("r_dark"), "samples: list of (polarization, r_in_hz, r_det_hz)");

  py::class_<EfficiencyOperator>(m, "EfficiencyOperator")
      .def(py::init<const Matrix&, double>(), py::arg("gram"), py::arg("psd_tol") = 1e-12)
      .def_property_readonly("gram", &EfficiencyOperator::gram)
      .def_property_readonly("factor", [](const EfficiencyOperator& op) -> py::object {
        if (!op.has_factor()) return py::none();
        return py::cast(op.factor());
      });
  m.def("tomography", &tomography, py::arg("eta_h"), py::arg("eta_v"), py::arg("eta_d"), py::arg("eta_l"));
  m.def("factorize", &factorize);
  m.def("min_eigen_state", [](const EfficiencyOperator& op) {
    EigenState s = min_eigen_state(op);
    return py::make_tuple(s.state, s.eigenvalue);
  });

  py::class_<LambdaBounds>(m, "LambdaBounds")
      .def(py::init<>())
      .def(py::init([](double lm0, double lp0, double lm1, double lp1) { return LambdaBounds{lm0, lp0, lm1, lp1}; }))
      .def_readwrite("lm0", &LambdaBounds::lm0)
      .def_readwrite("lp0", &LambdaBounds::lp0)
      .def_readwrite("lm1", &LambdaBounds::lm1)
      .def_readwrite("lp1", &LambdaBounds::lp1);

  py::class_<GramDecomposition>(m, "GramDecomposition")
      .def_readonly("u", &GramDecomposition::u)
      .def_readonly("d", &GramDecomposition::d)
      .def_readonly("d_min", &GramDecomposition::d_min)
      .def_readonly("d_max", &GramDecomposition::d_max);
  py::class_<CMatrix>(m, "CMatrix").def_readonly("c", &CMatrix::c).def_readonly("c1_diag", &CMatrix::c1_diag);

  m.def("gram_diagonalize", &gram_diagonalize);
  m.def("build_c", &build_c);
  m.def("lambda_analytical", &lambda_analytical);
  m.def("binary_entropy", &binary_entropy);
  m.def("key_rate", &key_rate, py::arg("p_z_sift"), py::arg("r_x_virt_l"), py::arg("e_p_u"), py::arg("e_b"),
        py::arg("f_ec"));
  m.def("channel_transmittance", &channel_transmittance, py::arg("alpha_db_per_km"), py::arg("length_km"));

  py::class_<SecurityReport>(m, "SecurityReport")
      .def_readonly("p_z_sift", &SecurityReport::p_z_sift)
      .def_readonly("e_b", &SecurityReport::e_b)
      .def_readonly("p_x_virt_l", &SecurityReport::p_x_virt_l)
      .def_readonly("r_x_virt_l", &SecurityReport::r_x_virt_l)
      .def_readonly("e_p_u", &SecurityReport::e_p_u)
      .def_readonly("skr", &SecurityReport::skr)
      .def_readonly("lambdas", &SecurityReport::lambdas)
      .def_readonly("labels_swapped", &SecurityReport::labels_swapped)
      .def_property_readonly("lambda_source",
                             [](const SecurityReport& r) { return lambda_source_name(r.lambda_source); })
      .def_property_readonly("status", [](const SecurityReport& r) { return report_status_name(r.status); });

  m.def(
      "eve_attack_efficiencies",
      [](const EfficiencyOperator& f0, const EfficiencyOperator& f1) {
        return eve_attack_efficiencies(f0, f1, ChannelConfig{});
      },
      py::arg("f0"), py::arg("f1"), "efficiencies under the minimum-eigenvector attack on detector 1");

  m.def(
      "sweep",
      [](const EfficiencyOperator& d0, const EfficiencyOperator& d1, double theta, double l_min, double l_max,
         double l_step, double p_za, double p_zb, double alpha, double p_dark, double f_ec) {
        ChannelConfig ch;
        ch.alpha = alpha;
        ch.p_dark = p_dark;
        SweepInputs in{d0, d1, SignalStates::from_theta(theta), ProtocolProbs(p_za, p_zb), ch, f_ec};
        py::list out;
        for (const SweepPoint& p : sweep({l_min, l_max, l_step}, in)) {
          py::dict row;
          row["l_km"] = p.l_km;
          row["eta_ch"] = p.eta_ch;
          row["analytical"] = p.analytical;
          row["sdp"] = p.sdp;
          out.append(row);
        }
        return out;
      },
      py::arg("d0"), py::arg("d1"), py::arg("theta"), py::arg("l_min"), py::arg("l_max"), py::arg("l_step"),
      py::arg("p_za") = 2.0 / 3.0, py::arg("p_zb") = 2.0 / 3.0, py::arg("alpha") = 0.2, py::arg("p_dark") = 1e-6,
      py::arg("f_ec") = 1.16);

  m.def(
      "verify_lambda_sandwich",
      [](const LambdaBounds& lam, const CMatrix& c, const EfficiencyOperator& f0, const EfficiencyOperator& f1,
         int trials, std::uint64_t seed) {
        SandwichReport r = verify_lambda_sandwich(lam, c, ensure_factorized(f0), ensure_factorized(f1), trials, seed);
        return r.max_violation();
      },
      py::arg("lam"), py::arg("c"), py::arg("f0"), py::arg("f1"), py::arg("trials") = 1000, py::arg("seed") = 1,
      "returns the largest violation; raises BoundViolated above 1e-9");
}
