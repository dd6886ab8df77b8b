#include "ltqkd/cli/commands.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ltqkd/channel.hpp"
#include "ltqkd/cli/config.hpp"
#include "ltqkd/cli/io.hpp"
#include "ltqkd/errors.hpp"
#include "ltqkd/proofcheck.hpp"
#include "ltqkd/security.hpp"

namespace ltqkd::cli {

namespace {

template <typename F>
int guarded(std::ostream& err, F body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InsufficientData& e) {
    err << "error: insufficient data: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const ltqkd::Error& e) {
    err << "error: computation failed: " << e.what() << "\n";
    return kExitCompute;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCompute;
  }
}

const std::filesystem::path& require_out(const CommandOptions& opt) {
  if (!opt.out) throw InputError("--out is required for this command");
  return *opt.out;
}

DetectorFit fit_from_counts(const DetectorSource& src) {
  std::string text = read_file(src.path);
  std::vector<CountRateSample> samples = parse_counts_csv(text, src.path.string());
  DetectorFit fit = fit_detector(samples, src.r_dark_hz);
  for (Polarization p : kPolarizations) {
    if (!fit.by_pol.count(p)) {
      throw InsufficientData(src.path.string() + ": no rows for polarization " + polarization_name(p));
    }
  }
  return fit;
}

EfficiencyOperator resolve_detector(const DetectorSource& src) {
  switch (src.kind) {
    case DetectorSource::Kind::eta_by_pol: {
      const auto& e = src.eta_by_pol;
      return tomography(e.at(Polarization::H), e.at(Polarization::V), e.at(Polarization::D), e.at(Polarization::L));
    }
    case DetectorSource::Kind::counts: {
      DetectorFit f = fit_from_counts(src);
      return tomography(f.eta(Polarization::H), f.eta(Polarization::V), f.eta(Polarization::D),
                        f.eta(Polarization::L));
    }
    case DetectorSource::Kind::fit_file: {
      auto e = parse_fit_json(read_file(src.path), src.path.string());
      return tomography(e.at(Polarization::H), e.at(Polarization::V), e.at(Polarization::D), e.at(Polarization::L));
    }
    case DetectorSource::Kind::gram:
      return EfficiencyOperator(src.gram);
  }
  throw InputError("unknown detector source");
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

int cmd_fit_detectors(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_config(opt.config);
    const std::filesystem::path& dir = require_out(opt);
    const std::pair<const char*, const DetectorSource*> dets[] = {{"d0", &cfg.d0}, {"d1", &cfg.d1}};
    for (const auto& [name, src] : dets) {
      if (src->kind != DetectorSource::Kind::counts) {
        throw InputError(std::string("fit-detectors needs count data: set detectors.") + name + ".counts");
      }
    }
    std::vector<std::pair<std::string, DetectorFit>> fits;
    for (const auto& [name, src] : dets) fits.emplace_back(name, fit_from_counts(*src));
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir.string());
    for (const auto& [name, fit] : fits) {
      std::filesystem::path path = dir / (name + "_fit.json");
      write_file_atomic(path, format_fit_json(name, fit));
      out << name << ":";
      for (const auto& [p, f] : fit.by_pol) out << " eta_" << polarization_name(p) << "=" << fixed(f.eta, 6);
      out << " tau_d=" << sci(fit.tau_d()) << " s (spread " << sci(fit.tau_spread()) << " s) -> " << path.string()
          << "\n";
    }
    return kExitOk;
  });
}

int cmd_tomography(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_config(opt.config);
    const std::filesystem::path& path = require_out(opt);
    EfficiencyOperator d0 = resolve_detector(cfg.d0);
    EfficiencyOperator d1 = resolve_detector(cfg.d1);
    std::string csv = format_grams_csv(d0, d1);
    write_file_atomic(path, csv);
    out << csv;
    return kExitOk;
  });
}

int cmd_keyrate(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_config(opt.config);
    const std::filesystem::path& path = require_out(opt);
    SweepInputs in{ensure_factorized(resolve_detector(cfg.d0)), ensure_factorized(resolve_detector(cfg.d1)),
                   cfg.signal_states(), cfg.protocol_probs(), cfg.channel_config(), cfg.f_ec};

    std::vector<SweepPoint> points;
    if (cfg.stats_override_path) {
      DetectionStats stats = parse_stats_csv(read_file(*cfg.stats_override_path), cfg.stats_override_path->string());
      PipelineInputs p{in.d0, in.d1, in.states, in.probs, stats, in.f_ec};
      SweepPoint pt;
      pt.l_km = cfg.l_min_km;
      pt.eta_ch = channel_transmittance(cfg.alpha_db_per_km, cfg.l_min_km);
      pt.analytical = optimize_labeling(p, LambdaSource::analytical);
      pt.sdp = optimize_labeling(p, LambdaSource::sdp);
      points.push_back(pt);
    } else {
      points = sweep(cfg.sweep_range(), in);
    }

    write_file_atomic(path, format_keyrate_csv(points));
    if (opt.svg) {
      char title[96];
      std::snprintf(title, sizeof title, "Secret key rate, c01 = %.4g", in.states.c01());
      write_file_atomic(*opt.svg, render_rate_svg(points, title));
    }
    int flagged = 0;
    for (const SweepPoint& p : points) {
      for (const SecurityReport* r : {&p.analytical, &p.sdp}) {
        if (r->status != ReportStatus::ok) {
          ++flagged;
          err << "note: l_km=" << p.l_km << " " << lambda_source_name(r->lambda_source) << ": "
              << report_status_name(r->status) << ", rate set to 0\n";
        }
      }
    }
    out << "wrote " << points.size() << " rows to " << path.string();
    if (flagged) out << " (" << flagged << " flagged evaluations)";
    out << "\n";
    return kExitOk;
  });
}

int cmd_proofcheck(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_config(opt.config);
    std::uint64_t seed = opt.seed ? *opt.seed : cfg.seed;
    EfficiencyOperator f0 = factorize(resolve_detector(cfg.d0));
    EfficiencyOperator f1 = factorize(resolve_detector(cfg.d1));
    GramDecomposition g = gram_diagonalize(f0, f1);
    CMatrix c = build_c(g, f0);

    struct Row {
      std::string name;
      double violation;
    };
    std::vector<Row> rows;
    const int dim = f0.dim();
    const Matrix id = Matrix::Identity(2 * dim, 2 * dim);
    for (Basis b : {Basis::Z, Basis::X}) {
      double completeness = (measurement_povm(f0, f1, 0, b).matrix + measurement_povm(f0, f1, 1, b).matrix +
                             fail_povm(f0, f1, b).matrix - id)
                                .cwiseAbs()
                                .maxCoeff();
      double fail_psd = -min_eigenvalue(fail_povm(f0, f1, b).matrix);
      std::string basis = b == Basis::Z ? "Z" : "X";
      rows.push_back({"POVM completeness (" + basis + ")", completeness});
      rows.push_back({"fail element PSD (" + basis + ")", fail_psd});
    }
    JointOperator qz = build_qz(f0, f1);
    rows.push_back({"Q_Z filter validity", max_eigenvalue(qz.matrix.adjoint() * qz.matrix) - 1.0});
    double qz_povm = 0.0;
    for (int s = 0; s < 2; ++s) {
      Matrix lhs = qz.matrix.adjoint() * kron(basis_projector(s, Basis::Z), Matrix::Identity(dim, dim)) * qz.matrix;
      qz_povm = std::max(qz_povm, (lhs - measurement_povm(f0, f1, s, Basis::Z).matrix).cwiseAbs().maxCoeff());
    }
    rows.push_back({"Q_Z reproduces Z POVM", qz_povm});
    JointOperator gf = build_g(c, f0, f1);
    rows.push_back({"G filter validity", max_eigenvalue(gf.matrix.adjoint() * gf.matrix) - 1.0});
    rows.push_back({"G Q_Z = I (x) C",
                    (gf.matrix * qz.matrix - kron(Matrix::Identity(2, 2), c.c)).cwiseAbs().maxCoeff()});
    double virt = 0.0;
    for (int s = 0; s < 2; ++s) {
      Matrix expect = kron(basis_projector(s, Basis::X), c.c.adjoint() * c.c);
      virt = std::max(virt, (virtual_povm(qz, gf, s).matrix - expect).cwiseAbs().maxCoeff());
    }
    rows.push_back({"virtual POVM = |sX><sX| (x) CdC", virt});

    SdpBox box = sdp_feasible_box(f0, f1, c);
    const std::pair<std::string, LambdaBounds> lambdas[] = {
        {"analytical", lambda_analytical(g)},
        {"tight", LambdaBounds{box.lo[0], box.hi[0], box.lo[1], box.hi[1]}},
    };
    for (auto [label, lam] : lambdas) {
      lam.lm0 *= opt.inject_lambda_scale;
      lam.lm1 *= opt.inject_lambda_scale;
      SandwichReport rep = measure_lambda_sandwich(lam, c, f0, f1, cfg.proofcheck_trials, seed);
      for (const SandwichCheck& chk : rep.checks) rows.push_back({"[" + label + "] " + chk.name, chk.max_violation});
    }

    const double tol = 1e-9;
    bool ok = true;
    std::ostringstream table;
    char line[160];
    std::snprintf(line, sizeof line, "%-52s %14s  %s\n", "check", "max_violation", "result");
    table << line;
    for (const Row& r : rows) {
      bool pass = r.violation <= tol;
      ok = ok && pass;
      std::snprintf(line, sizeof line, "%-52s %14.3e  %s\n", r.name.c_str(), r.violation, pass ? "PASS" : "FAIL");
      table << line;
    }
    table << (ok ? "all checks passed" : "some checks FAILED") << " (" << cfg.proofcheck_trials
          << " random trials, seed " << seed << ")\n";
    out << table.str();
    if (opt.out) write_file_atomic(*opt.out, table.str());
    return ok ? kExitOk : kExitCompute;
  });
}

}  // namespace ltqkd::cli
