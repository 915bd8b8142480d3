#include "invobs/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "invobs/errors.hpp"
#include "invobs/examples.hpp"
#include "invobs/scenario.hpp"
#include "invobs/trajectory.hpp"

namespace invobs {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return kExitParse;
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const GroupMismatch*>(&e)) {
    return kExitValidation;
  }
  if (dynamic_cast<const NotObservable*>(&e)) return kExitProperty;
  return kExitNumeric;
}

std::complex<double> parse_pole(const std::string& text) {
  const char* s = text.c_str();
  char* end = nullptr;
  const double re = std::strtod(s, &end);
  if (end == s) throw ParseError("not a pole: '" + text + "'");
  if (*end == '\0') return {re, 0.0};
  const char* rest = end;
  const double im = std::strtod(rest, &end);
  if (end == rest || (*rest != '+' && *rest != '-') || (*end != 'i' && *end != 'j') ||
      end[1] != '\0') {
    throw ParseError("not a pole: '" + text + "' (expected re or re+imi)");
  }
  return {re, im};
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  std::ostringstream tag;
  tag << ".tmp." << std::this_thread::get_id();
  fs::path tmp = target;
  tmp += tag.str();
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot write '" + tmp.string() + "'");
    os << content;
    os.flush();
    if (!os) throw ValidationError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ValidationError("cannot rename onto '" + path + "'");
  }
}

namespace {

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c) + 0.0);
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i) + 0.0);
  return out;
}

json complex_json(const std::vector<std::complex<double>>& zs) {
  json out = json::array();
  for (const auto& z : zs) out.push_back({z.real() + 0.0, z.imag() + 0.0});
  return out;
}

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s + ' ' : s + std::string(width - s.size(), ' ');
}

void print_matrix(std::ostream& os, const std::string& title, const Matrix& m) {
  os << title << " (" << m.rows() << "x" << m.cols() << ")\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << "  ";
    // + 0.0 folds -0 into 0
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << pad(format_double(m(r, c) + 0.0), 25);
    os << '\n';
  }
}

std::string complex_text(const std::complex<double>& z) {
  if (z.imag() == 0.0) return format_double(z.real());
  return format_double(z.real()) + (z.imag() < 0 ? " - " : " + ") +
         format_double(std::abs(z.imag())) + "i";
}

InvariantSystem named(const std::string& name) { return make_named_system(name); }

Vector resolve_ubar(const InvariantSystem& sys, const std::string& name,
                    const std::vector<double>& given) {
  if (given.empty()) return default_ubar(name);
  if (static_cast<int>(given.size()) != sys.input_dim) {
    throw ValidationError("--ubar needs " + std::to_string(sys.input_dim) + " values for " + name);
  }
  const Vector u = to_vector(given);
  if (!u.allFinite()) throw ValidationError("--ubar must be finite");
  return u;
}

struct GainChoice {
  std::optional<Matrix> gain;
  std::string source = "none";
  std::vector<std::complex<double>> poles;
};

GainChoice choose_gain(const InvariantSystem& sys, const LinearizeOptions& opt, const Vector& ubar,
                       const LinearizedPair& pair, bool default_adjoint) {
  if (!opt.poles.empty() && !opt.K.empty()) throw ValidationError("give --poles or --K, not both");
  GainChoice g;
  if (!opt.poles.empty()) {
    for (const auto& p : opt.poles) g.poles.push_back(parse_pole(p));
    if (static_cast<int>(g.poles.size()) != sys.dim()) {
      throw ValidationError("--poles needs " + std::to_string(sys.dim()) + " values");
    }
    g.gain = design_gain_pole(pair.A, pair.C, g.poles);
    g.source = "poles";
  } else if (!opt.K.empty() || default_adjoint) {
    const Vector k = opt.K.empty() ? Vector::Ones(1) : to_vector(opt.K);
    g.gain = design_gain_adjoint(sys, k, ubar).gain;
    g.source = "adjoint";
  }
  return g;
}

int linearize_impl(const LinearizeOptions& opt, std::ostream& out, bool gains_only) {
  const InvariantSystem sys = named(opt.system);
  const Vector ubar = resolve_ubar(sys, opt.system, opt.ubar);
  LinearizedPair pair = linearize(sys, ubar);
  const ObservabilityReport obs{observability_rank(pair.A, pair.C), sys.dim()};
  const GainChoice g = choose_gain(sys, opt, ubar, pair, gains_only);
  pair.L = g.gain;

  json j;
  j["system"] = opt.system;
  j["group"] = std::string(group_name(sys.group));
  j["side"] = std::string(side_name(sys.side));
  j["ubar"] = vector_json(ubar);
  if (!gains_only) {
    j["A"] = matrix_json(pair.A);
    j["C"] = matrix_json(pair.C);
    j["A_eigenvalues"] = complex_json(sorted_eigenvalues(pair.A));
  }
  j["observability_rank"] = obs.rank;
  j["dim"] = obs.dim;
  j["observable"] = obs.observable();
  j["gain_source"] = g.source;
  std::optional<StabilityReport> stab;
  if (g.gain) {
    j["L"] = matrix_json(*g.gain);
    j["closed_loop"] = matrix_json(pair.closed_loop());
    stab = stability_check(pair);
    j["closed_loop_eigenvalues"] = complex_json(stab->eigenvalues);
    j["max_real_part"] = stab->max_real_part;
    j["symmetric_part"] = std::string(definiteness_name(stab->symmetric_part));
  }
  out << j.dump() << "\n\n";

  out << "system " << opt.system << " on " << group_name(sys.group) << " ("
      << side_name(sys.side) << "), ubar = [";
  for (Eigen::Index i = 0; i < ubar.size(); ++i) out << (i ? ", " : "") << format_double(ubar(i));
  out << "]\n";
  if (!gains_only) {
    print_matrix(out, "A", pair.A);
    print_matrix(out, "C", pair.C);
  }
  out << "observability rank " << obs.rank << " of " << obs.dim
      << (obs.observable() ? " (observable)" : " (unobservable)") << '\n';
  if (g.gain) {
    print_matrix(out, "Lbar [" + g.source + "]", *g.gain);
    if (!gains_only) print_matrix(out, "A + Lbar C", pair.closed_loop());
    out << "closed-loop eigenvalues\n";
    for (const auto& z : stab->eigenvalues) out << "  " << complex_text(z) << '\n';
    out << "symmetric part " << definiteness_name(stab->symmetric_part) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimOutcome {
  int code = kExitOk;
  std::string report;
};

SimOutcome simulate_one(const std::string& file, const std::string& csv_path) {
  SimOutcome res;
  std::ostringstream rep;
  res.code = guarded(rep, [&] {
    const RunResult r = run_scenario_file(file);
    if (!csv_path.empty()) {
      std::ostringstream csv;
      write_csv(csv, r.record);
      write_file_atomic(csv_path, csv.str());
    }
    rep << "file: " << file << '\n';
    if (!csv_path.empty()) rep << "csv: " << csv_path << '\n';
    rep << r.summary.to_text();
    return kExitOk;
  });
  res.report = rep.str();
  return res;
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.batch.empty()) {
    if (opt.file.empty()) {
      err << "error: simulate needs a scenario file or --batch <dir>\n";
      return kExitValidation;
    }
    const SimOutcome r = simulate_one(opt.file, opt.out);
    (r.code == kExitOk ? out : err) << r.report;
    return r.code;
  }
  if (!opt.file.empty()) {
    err << "error: give a scenario file or --batch, not both\n";
    return kExitValidation;
  }
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(opt.batch, ec)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) {
      files.push_back(entry.path().string());
    }
  }
  if (ec) {
    err << "error: cannot read directory '" << opt.batch << "'\n";
    return kExitValidation;
  }
  std::sort(files.begin(), files.end());
  const fs::path out_dir = opt.out.empty() ? fs::path(opt.batch) : fs::path(opt.out);
  fs::create_directories(out_dir, ec);

  std::vector<SimOutcome> results(files.size());
  std::atomic<size_t> next{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const size_t workers =
      std::min(files.size(), static_cast<size_t>(opt.jobs > 0 ? static_cast<unsigned>(opt.jobs) : hw));
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < files.size(); i = next++) {
        const fs::path csv = out_dir / fs::path(files[i]).stem().concat(".csv");
        results[i] = simulate_one(files[i], csv.string());
      }
    });
  }
  for (auto& t : pool) t.join();

  int code = kExitOk;
  for (size_t i = 0; i < results.size(); ++i) {
    if (i) out << "---\n";
    if (results[i].code == kExitOk) {
      out << results[i].report;
    } else {
      out << "file: " << files[i] << "\nstatus: failed (exit " << results[i].code << ")\n";
      err << files[i] << ": " << results[i].report;
    }
    code = std::max(code, results[i].code);
  }
  return code;
}

int cmd_linearize(const LinearizeOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return linearize_impl(opt, out, false); });
}

int cmd_gains(const LinearizeOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return linearize_impl(opt, out, true); });
}

// ---------------------------------------------------------------------------
// check

namespace {

struct TraceCheck {
  std::string name;
  double max_deviation = 0.0;
};

// Twin simulations whose error traces must coincide. Left systems keep the
// invariant input fixed and change the initial pose; right systems change the
// input itself.
TraceCheck trajectory_check(const InvariantSystem& sys, const std::string& name,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Vector ubar = default_ubar(name);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const double duration = 2.0;
  const ObserverSpec spec = design_gain_adjoint(sys, Vector::Ones(1), ubar);

  Vector dir = random_vector(sys.dim(), rng);
  const GroupElement eta0 = exp(sys.group, 0.3 * dir.normalized());
  const Vector wobble = random_vector(sys.input_dim, rng);
  const InputSignal ua = InputSignal::function(sys.input_dim, [ubar, wobble](double t) -> Vector {
    return ubar + 0.2 * std::sin(1.3 * t) * wobble;
  });
  const GroupElement xa0 = GroupElement::identity(sys.group);
  const GroupElement xb0 = random_element(sys.group, rng);

  InputSignal ub = ua;
  TraceCheck tc;
  if (sys.side == ActionSide::kLeft) {
    tc.name = "trajectory independence";
    // x_b = g x_a, so psi_g(u_a) keeps I(x_b, u_b) = I(x_a, u_a)
    ub = InputSignal::function(sys.input_dim, [&sys, ua, xb0](double t) -> Vector {
      return sys.input_action(xb0, ua(t));
    });
  } else {
    tc.name = "error autonomy";
    const Vector other = random_vector(sys.input_dim, rng);
    ub = InputSignal::function(sys.input_dim, [other](double t) -> Vector {
      return other * std::cos(0.7 * t);
    });
  }
  auto start = [&](const GroupElement& x0) {
    return sys.side == ActionSide::kLeft ? compose(x0, eta0) : compose(eta0, x0);
  };
  const TimeSeries a = integrate(sys, spec, xa0, start(xa0), ua, duration, cfg);
  const TimeSeries b = integrate(sys, spec, xb0, start(xb0), ub, duration, cfg);
  for (size_t k = 0; k < a.eta.size(); ++k) {
    tc.max_deviation = std::max(tc.max_deviation, distance(a.eta[k], b.eta[k]));
  }
  return tc;
}

TraceCheck preobserver_check(const InvariantSystem& sys, const std::string& name) {
  IntegratorConfig cfg;
  const Vector ubar = default_ubar(name);
  const ObserverSpec spec = design_gain_adjoint(sys, Vector::Ones(1), ubar);
  const Vector wobble = Vector::Ones(sys.input_dim);
  const InputSignal u = InputSignal::function(sys.input_dim, [ubar, wobble](double t) -> Vector {
    return ubar + 0.3 * std::sin(t) * wobble;
  });
  const GroupElement x0 = exp(sys.group, Vector::Constant(sys.dim(), 0.2));
  const TimeSeries ts = integrate(sys, spec, x0, x0, u, 2.0, cfg);
  TraceCheck tc{"pre-observer", 0.0};
  for (const auto& e : ts.eta) tc.max_deviation = std::max(tc.max_deviation, log(e).norm());
  return tc;
}

}  // namespace

int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.samples < 1) throw ValidationError("--samples must be at least 1");
    const InvariantSystem sys = named(opt.system);
    const EquivarianceReport rep = check_equivariance(sys, opt.samples, opt.seed, opt.tol);
    std::vector<IdentityCheck> rows = rep.checks;
    for (const TraceCheck& tc : {trajectory_check(sys, opt.system, opt.seed),
                                 preobserver_check(sys, opt.system)}) {
      const double tol = tc.name == "pre-observer" ? 1e-9 : opt.trajectory_tol;
      rows.push_back({tc.name, tc.max_deviation, tc.max_deviation <= tol});
    }
    bool all = true;
    out << "system: " << opt.system << '\n';
    out << pad("identity", 34) << pad("max_deviation", 26) << "result\n";
    for (const auto& c : rows) {
      out << pad(c.name, 34) << pad(format_double(c.max_deviation), 26)
          << (c.passed ? "pass" : "FAIL") << '\n';
      all = all && c.passed;
    }
    out << "overall: " << (all ? "pass" : "FAIL") << '\n';
    return all ? kExitOk : kExitProperty;
  });
}

// ---------------------------------------------------------------------------
// permanent

int cmd_permanent(const PermanentOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const InvariantSystem sys = named(opt.system);
    const Vector ubar = resolve_ubar(sys, opt.system, opt.ubar);
    Vector x0c = Vector::Zero(sys.dim());
    if (!opt.x0.empty()) {
      if (static_cast<int>(opt.x0.size()) != sys.dim()) {
        throw ValidationError("--x0 needs " + std::to_string(sys.dim()) + " values");
      }
      x0c = to_vector(opt.x0);
    }
    if (!std::isfinite(opt.perturb)) throw ValidationError("--perturb must be finite");
    IntegratorConfig cfg;
    cfg.dt = opt.dt;
    cfg.validate();
    if (!(opt.duration > 0.0)) throw ValidationError("--duration must be positive");
    step_count(opt.duration, opt.dt);

    const PermanentTrajectory traj = make_permanent(sys, exp(sys.group, x0c), ubar, opt.duration);
    const double eps = opt.perturb;
    const InputSignal inputs =
        InputSignal::function(sys.input_dim, [&sys, traj, eps](double t) -> Vector {
          Vector u = required_input(sys, traj, t);
          u(0) += eps * std::sin(2.0 * t);
          return u;
        });
    const TimeSeries ts = integrate(sys, std::nullopt, traj.x0, std::nullopt, inputs,
                                    opt.duration, cfg);
    const PermanenceVerdict verdict = is_permanent(sys, ts.t, ts.x, inputs);
    double closed_form_gap = 0.0;
    for (size_t k = 0; k < ts.t.size(); ++k) {
      closed_form_gap = std::max(closed_form_gap, distance(ts.x[k], permanent_state(traj, ts.t[k])));
    }

    SimRecord rec;
    rec.header = {"t"};
    const Vector p0 = ts.x.front().params();
    for (Eigen::Index i = 0; i < p0.size(); ++i) rec.header.push_back("x_" + std::to_string(i + 1));
    for (int i = 1; i <= sys.input_dim; ++i) rec.header.push_back("u_" + std::to_string(i));
    for (int i = 1; i <= sys.input_dim; ++i) rec.header.push_back("I_" + std::to_string(i));
    for (size_t k = 0; k < ts.t.size(); ++k) {
      std::vector<double> row{ts.t[k]};
      const Vector p = ts.x[k].params();
      const Vector inv = invariants_I(sys, ts.x[k], ts.u[k]);
      row.insert(row.end(), p.data(), p.data() + p.size());
      row.insert(row.end(), ts.u[k].data(), ts.u[k].data() + ts.u[k].size());
      row.insert(row.end(), inv.data(), inv.data() + inv.size());
      rec.rows.push_back(std::move(row));
    }

    std::ostringstream summary;
    summary << "system: " << opt.system << '\n'
            << "permanent: " << (verdict.permanent ? "true" : "false") << '\n'
            << "invariant_input_deviation: " << format_double(verdict.max_deviation) << '\n'
            << "closed_form_gap: " << format_double(closed_form_gap) << '\n';
    // planar rotation: the orbit closes after one turn
    if (sys.group == GroupKind::kSE2 && std::abs(traj.wbar(0)) > 1e-12) {
      const double period = 2.0 * std::numbers::pi / std::abs(traj.wbar(0));
      summary << "period: " << format_double(period) << '\n'
              << "closure_gap: "
              << format_double(distance(traj.x0, permanent_state(traj, period))) << '\n';
    }

    if (opt.out.empty()) {
      write_csv(out, rec);
      std::istringstream lines(summary.str());
      for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
    } else {
      std::ostringstream csv;
      write_csv(csv, rec);
      write_file_atomic(opt.out, csv.str());
      out << "csv: " << opt.out << '\n' << summary.str();
    }
    return verdict.permanent ? kExitOk : kExitProperty;
  });
}

}  // namespace invobs
