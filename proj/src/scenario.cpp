#include "invobs/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "invobs/errors.hpp"
#include "invobs/trajectory.hpp"

namespace invobs {

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!map.IsMap()) throw ParseError(where + " must be a mapping", line_of(map));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ParseError("unknown key '" + key + "' in " + where, line_of(kv.first));
    }
  }
}

double as_number(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) throw ParseError(what + " must be a number", line_of(node));
  try {
    return node.as<double>();
  } catch (const YAML::BadConversion&) {
    throw ParseError(what + " must be a number, got '" + node.Scalar() + "'", line_of(node));
  }
}

std::string as_string(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) throw ParseError(what + " must be a string", line_of(node));
  return node.Scalar();
}

std::int64_t as_integer(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) throw ParseError(what + " must be an integer", line_of(node));
  try {
    return node.as<std::int64_t>();
  } catch (const YAML::BadConversion&) {
    throw ParseError(what + " must be an integer, got '" + node.Scalar() + "'", line_of(node));
  }
}

Vector as_vector(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) throw ParseError(what + " must be a list of numbers", line_of(node));
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (size_t i = 0; i < node.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_number(node[i], what);
  }
  return v;
}

Matrix as_matrix(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() == 0) {
    throw ParseError(what + " must be a non-empty list of rows", line_of(node));
  }
  const Vector first = as_vector(node[0], what);
  Matrix m(static_cast<Eigen::Index>(node.size()), first.size());
  for (size_t r = 0; r < node.size(); ++r) {
    const Vector row = as_vector(node[r], what);
    if (row.size() != first.size()) throw ParseError(what + " rows differ in length", line_of(node[r]));
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

std::vector<std::complex<double>> as_poles(const YAML::Node& node) {
  if (!node.IsSequence()) throw ParseError("poles must be a list", line_of(node));
  std::vector<std::complex<double>> out;
  for (const auto& p : node) {
    if (p.IsSequence()) {
      if (p.size() != 2) throw ParseError("complex pole must be [re, im]", line_of(p));
      out.emplace_back(as_number(p[0], "pole"), as_number(p[1], "pole"));
    } else {
      out.emplace_back(as_number(p, "pole"), 0.0);
    }
  }
  return out;
}

void require_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite()) throw ValidationError(what + " must be finite");
}

InputProfile parse_input(const YAML::Node& node) {
  check_keys(node,
             {"kind", "value", "offset", "amplitude", "frequency", "phase", "samples",
              "interpolation"},
             "input");
  InputProfile in;
  const std::string kind = node["kind"] ? as_string(node["kind"], "input.kind") : "constant";
  if (kind == "constant") {
    in.kind = InputProfile::Kind::kConstant;
    if (!node["value"]) throw ParseError("constant input needs 'value'", line_of(node));
    in.value = as_vector(node["value"], "input.value");
  } else if (kind == "sine") {
    in.kind = InputProfile::Kind::kSine;
    if (!node["amplitude"] || !node["frequency"]) {
      throw ParseError("sine input needs 'amplitude' and 'frequency'", line_of(node));
    }
    in.amplitude = as_vector(node["amplitude"], "input.amplitude");
    in.frequency = as_vector(node["frequency"], "input.frequency");
    const auto m = in.amplitude.size();
    in.offset = node["offset"] ? as_vector(node["offset"], "input.offset") : Vector::Zero(m);
    in.phase = node["phase"] ? as_vector(node["phase"], "input.phase") : Vector::Zero(m);
  } else if (kind == "samples") {
    in.kind = InputProfile::Kind::kSamples;
    const YAML::Node s = node["samples"];
    if (!s || !s.IsSequence() || s.size() == 0) {
      throw ParseError("sampled input needs a non-empty 'samples' table", line_of(node));
    }
    for (const auto& row : s) {
      const Vector r = as_vector(row, "input.samples row");
      if (r.size() < 2) throw ParseError("sample row needs [t, u...]", line_of(row));
      in.times.push_back(r(0));
      in.values.push_back(r.tail(r.size() - 1));
    }
    if (node["interpolation"]) {
      const auto interp = as_string(node["interpolation"], "input.interpolation");
      if (interp == "zoh") {
        in.interpolation = Interpolation::kZeroOrderHold;
      } else if (interp == "linear") {
        in.interpolation = Interpolation::kLinear;
      } else {
        throw ParseError("interpolation must be zoh or linear", line_of(node["interpolation"]));
      }
    }
  } else {
    throw ParseError("input.kind must be constant, sine or samples", line_of(node["kind"]));
  }
  return in;
}

GainSource parse_observer(const YAML::Node& node) {
  check_keys(node, {"K", "matrix", "poles", "ubar"}, "observer");
  GainSource g;
  int sources = 0;
  if (node["K"]) {
    ++sources;
    g.kind = GainSource::Kind::kAdjoint;
    g.weights = node["K"].IsSequence() ? as_vector(node["K"], "observer.K")
                                       : Vector::Constant(1, as_number(node["K"], "observer.K"));
  }
  if (node["matrix"]) {
    ++sources;
    g.kind = GainSource::Kind::kMatrix;
    g.matrix = as_matrix(node["matrix"], "observer.matrix");
  }
  if (node["poles"]) {
    ++sources;
    g.kind = GainSource::Kind::kPoles;
    g.poles = as_poles(node["poles"]);
  }
  if (sources > 1) throw ParseError("observer takes only one of K, matrix, poles", line_of(node));
  if (node["ubar"]) g.ubar = as_vector(node["ubar"], "observer.ubar");
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------

int InputProfile::dim() const {
  switch (kind) {
    case Kind::kConstant:
      return static_cast<int>(value.size());
    case Kind::kSine:
      return static_cast<int>(amplitude.size());
    case Kind::kSamples:
      return values.empty() ? 0 : static_cast<int>(values.front().size());
  }
  return 0;
}

InputSignal InputProfile::signal() const {
  switch (kind) {
    case Kind::kConstant:
      return InputSignal::constant(value);
    case Kind::kSine: {
      const Vector off = offset, amp = amplitude, freq = frequency, ph = phase;
      return InputSignal::function(dim(), [=](double t) -> Vector {
        Vector u(amp.size());
        for (Eigen::Index i = 0; i < amp.size(); ++i) {
          u(i) = off(i) + amp(i) * std::sin(2.0 * std::numbers::pi * freq(i) * t + ph(i));
        }
        return u;
      });
    }
    case Kind::kSamples:
      return InputSignal::sampled(times, values, interpolation);
  }
  throw Error("unknown input kind");
}

void Scenario::validate() const {
  const InvariantSystem sys = build_system();
  const int n = sys.dim();
  integrator.validate();
  step_count(duration, integrator.dt);
  if (stride < 1) throw ValidationError("stride must be at least 1");
  if (x0.size() != n) throw ValidationError("x0 needs " + std::to_string(n) + " coordinates");
  require_finite(x0, "x0");
  if (xhat0 && initial_error) throw ValidationError("give either xhat0 or initial_error");
  if (xhat0) {
    if (xhat0->size() != n) throw ValidationError("xhat0 needs " + std::to_string(n) + " coordinates");
    require_finite(*xhat0, "xhat0");
  }
  if (initial_error) {
    if (!(initial_error->norm >= 0.0) || !std::isfinite(initial_error->norm)) {
      throw ValidationError("initial_error norm must be finite and non-negative");
    }
    if (initial_error->direction) {
      const Vector& d = *initial_error->direction;
      if (d.size() != n) throw ValidationError("initial_error direction needs " + std::to_string(n) + " entries");
      require_finite(d, "initial_error direction");
      if (d.norm() == 0.0) throw ValidationError("initial_error direction must be non-zero");
    }
  }
  if (input.dim() != sys.input_dim) {
    throw ValidationError("input has " + std::to_string(input.dim()) + " channels, system '" +
                          system + "' takes " + std::to_string(sys.input_dim));
  }
  if (input.kind == InputProfile::Kind::kSine) {
    const auto m = input.amplitude.size();
    if (input.frequency.size() != m || input.offset.size() != m || input.phase.size() != m) {
      throw ValidationError("sine input vectors differ in length");
    }
    require_finite(input.amplitude, "input.amplitude");
    require_finite(input.frequency, "input.frequency");
    require_finite(input.offset, "input.offset");
    require_finite(input.phase, "input.phase");
  }
  if (input.kind == InputProfile::Kind::kConstant) require_finite(input.value, "input.value");
  (void)input.signal();  // sampled-table checks

  switch (observer.kind) {
    case GainSource::Kind::kNone:
      break;
    case GainSource::Kind::kAdjoint:
      if (observer.weights.size() != 1 && observer.weights.size() != sys.output_dim) {
        throw ValidationError("observer.K needs 1 or " + std::to_string(sys.output_dim) + " entries");
      }
      if (!observer.weights.allFinite() || (observer.weights.array() <= 0.0).any()) {
        throw ValidationError("observer.K entries must be positive");
      }
      break;
    case GainSource::Kind::kMatrix:
      if (observer.matrix.rows() != n || observer.matrix.cols() != sys.output_dim) {
        throw ValidationError("observer.matrix must be " + std::to_string(n) + "x" +
                              std::to_string(sys.output_dim));
      }
      if (!observer.matrix.allFinite()) throw ValidationError("observer.matrix must be finite");
      break;
    case GainSource::Kind::kPoles:
      if (static_cast<int>(observer.poles.size()) != n) {
        throw ValidationError("observer.poles needs " + std::to_string(n) + " entries");
      }
      break;
  }
  if (observer.ubar && observer.ubar->size() != sys.input_dim) {
    throw ValidationError("observer.ubar needs " + std::to_string(sys.input_dim) + " entries");
  }
  if (noise_std) {
    if (noise_std->size() != 1 && noise_std->size() != sys.output_dim) {
      throw ValidationError("noise.std needs 1 or " + std::to_string(sys.output_dim) + " entries");
    }
    if (!noise_std->allFinite() || (noise_std->array() < 0.0).any()) {
      throw ValidationError("noise.std entries must be non-negative");
    }
  }
}

InvariantSystem Scenario::build_system() const {
  if (system == "broken-car") throw ValidationError("broken-car is a check-only system");
  return make_named_system(system, attitude);
}

ObserverSpec Scenario::build_observer(const InvariantSystem& sys) const {
  const Vector ubar = observer.ubar.value_or(input.signal()(0.0));
  switch (observer.kind) {
    case GainSource::Kind::kNone:
      return open_loop_observer(sys);
    case GainSource::Kind::kAdjoint:
      return design_gain_adjoint(sys, observer.weights, ubar);
    case GainSource::Kind::kMatrix:
      return make_observer(sys, observer.matrix);
    case GainSource::Kind::kPoles: {
      const LinearizedPair pair = linearize(sys, ubar);
      return make_observer(sys, design_gain_pole(pair.A, pair.C, observer.poles));
    }
  }
  throw Error("unknown gain source");
}

GroupElement Scenario::initial_state() const {
  const InvariantSystem sys = build_system();
  return exp(sys.group, x0);
}

GroupElement Scenario::initial_estimate(const InvariantSystem& sys) const {
  const GroupElement x = exp(sys.group, x0);
  if (xhat0) return exp(sys.group, *xhat0);
  if (!initial_error) return x;
  Vector dir;
  if (initial_error->direction) {
    dir = initial_error->direction->normalized();
  } else {
    std::mt19937_64 rng(seed);
    dir = random_vector(sys.dim(), rng);
    dir.normalize();
  }
  const GroupElement eta = exp(sys.group, initial_error->norm * dir);
  // eta = x^-1 xhat (left) or xhat x^-1 (right)
  return sys.side == ActionSide::kLeft ? compose(x, eta) : compose(eta, x);
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(source + ": " + e.msg, e.mark.line + 1);
  }
  if (!root || root.IsNull()) throw ParseError(source + ": empty scenario");
  Scenario sc;
  try {
    check_keys(root,
               {"name", "system", "duration", "dt", "method", "stride", "seed", "x0", "xhat0",
                "initial_error", "input", "observer", "attitude", "noise"},
               "scenario");
    for (const char* key : {"system", "duration", "dt", "input"}) {
      if (!root[key]) throw ParseError(std::string("missing required key '") + key + "'", 1);
    }
    sc.name = root["name"] ? as_string(root["name"], "name") : "";
    sc.system = as_string(root["system"], "system");
    bool known = false;
    for (const auto& n : system_names()) known = known || n == sc.system;
    if (!known) throw ParseError("unknown system '" + sc.system + "'", line_of(root["system"]));
    sc.duration = as_number(root["duration"], "duration");
    sc.integrator.dt = as_number(root["dt"], "dt");
    if (root["method"]) {
      try {
        sc.integrator.method = parse_method(as_string(root["method"], "method"));
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_of(root["method"]));
      }
    }
    if (root["stride"]) sc.stride = static_cast<int>(as_integer(root["stride"], "stride"));
    if (root["seed"]) {
      const auto s = as_integer(root["seed"], "seed");
      if (s < 0) throw ParseError("seed must be non-negative", line_of(root["seed"]));
      sc.seed = static_cast<std::uint64_t>(s);
    }
    if (root["attitude"]) {
      const YAML::Node a = root["attitude"];
      check_keys(a, {"gravity", "dip_deg", "magnetic"}, "attitude");
      if (a["dip_deg"] && a["magnetic"]) {
        throw ParseError("attitude takes dip_deg or magnetic, not both", line_of(a));
      }
      if (a["gravity"]) sc.attitude.gravity = as_vector(a["gravity"], "attitude.gravity");
      if (a["dip_deg"]) {
        sc.attitude.magnetic = AttitudeConfig::field_from_dip(as_number(a["dip_deg"], "dip_deg"));
      }
      if (a["magnetic"]) sc.attitude.magnetic = as_vector(a["magnetic"], "attitude.magnetic");
      if (sc.attitude.gravity.size() != 3 || sc.attitude.magnetic.size() != 3) {
        throw ParseError("attitude vectors need 3 entries", line_of(a));
      }
    }
    const int n = group_dim(make_named_system(sc.system).group);
    sc.x0 = root["x0"] ? as_vector(root["x0"], "x0") : Vector::Zero(n);
    if (root["xhat0"]) sc.xhat0 = as_vector(root["xhat0"], "xhat0");
    if (root["initial_error"]) {
      const YAML::Node ie = root["initial_error"];
      check_keys(ie, {"norm", "norm_deg", "direction"}, "initial_error");
      InitialError err;
      if (ie["norm"] && ie["norm_deg"]) {
        throw ParseError("initial_error takes norm or norm_deg, not both", line_of(ie));
      }
      if (ie["norm"]) err.norm = as_number(ie["norm"], "initial_error.norm");
      if (ie["norm_deg"]) {
        err.norm = as_number(ie["norm_deg"], "initial_error.norm_deg") * std::numbers::pi / 180.0;
      }
      if (ie["direction"]) {
        const YAML::Node d = ie["direction"];
        if (!(d.IsScalar() && d.Scalar() == "random")) err.direction = as_vector(d, "direction");
      }
      sc.initial_error = err;
    }
    sc.input = parse_input(root["input"]);
    if (root["observer"]) sc.observer = parse_observer(root["observer"]);
    if (root["noise"]) {
      const YAML::Node nz = root["noise"];
      check_keys(nz, {"std"}, "noise");
      if (!nz["std"]) throw ParseError("noise needs 'std'", line_of(nz));
      sc.noise_std = nz["std"].IsSequence() ? as_vector(nz["std"], "noise.std")
                                            : Vector::Constant(1, as_number(nz["std"], "noise.std"));
    }
  } catch (const YAML::Exception& e) {
    throw ParseError(source + ": " + e.msg, e.mark.line + 1);
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario sc = parse_scenario(ss.str(), path);
  return sc;
}

// ---------------------------------------------------------------------------
// Runner

std::vector<std::string> record_header(const InvariantSystem& sys) {
  std::vector<std::string> param_names;
  switch (sys.group) {
    case GroupKind::kSO3:
      param_names = {"qw", "qx", "qy", "qz"};
      break;
    case GroupKind::kSE2:
      param_names = {"theta", "px", "py"};
      break;
    case GroupKind::kR2:
      param_names = {"px", "py"};
      break;
  }
  std::vector<std::string> h{"t"};
  for (const auto& p : param_names) h.push_back("x_" + p);
  for (const auto& p : param_names) h.push_back("xhat_" + p);
  for (int i = 1; i <= sys.dim(); ++i) h.push_back("xi_" + std::to_string(i));
  h.push_back("xi_norm");
  for (int i = 1; i <= sys.output_dim; ++i) h.push_back("y_" + std::to_string(i));
  for (int i = 1; i <= sys.output_dim; ++i) h.push_back("yhat_" + std::to_string(i));
  return h;
}

double log_slope(const std::vector<double>& times, const std::vector<double>& values,
                 double floor) {
  double st = 0, sl = 0, stt = 0, stl = 0;
  int count = 0;
  for (size_t i = 0; i < times.size() && i < values.size(); ++i) {
    if (!(values[i] > floor)) continue;
    const double l = std::log(values[i]);
    st += times[i];
    sl += l;
    stt += times[i] * times[i];
    stl += times[i] * l;
    ++count;
  }
  const double denom = count * stt - st * st;
  if (count < 2 || denom == 0.0) return std::nan("");
  return (count * stl - st * sl) / denom;
}

std::string RunSummary::to_text() const {
  std::ostringstream os;
  os << "name: " << name << '\n'
     << "system: " << system << '\n'
     << "samples: " << samples << '\n'
     << "final_xi_norm: " << format_double(final_xi_norm) << '\n'
     << "max_xi_norm: " << format_double(max_xi_norm) << '\n'
     << "decay_rate: " << format_double(decay_rate) << '\n'
     << "permanent: " << (permanent ? "true" : "false") << '\n'
     << "permanence_deviation: " << format_double(permanence_deviation) << '\n';
  return os.str();
}

RunResult run_scenario(const Scenario& scenario) {
  scenario.validate();
  const InvariantSystem sys = scenario.build_system();
  const ObserverSpec spec = scenario.build_observer(sys);
  const InputSignal inputs = scenario.input.signal();
  std::optional<NoiseModel> noise;
  if (scenario.noise_std) {
    const Vector std = scenario.noise_std->size() == 1
                           ? Vector::Constant(sys.output_dim, (*scenario.noise_std)(0))
                           : *scenario.noise_std;
    noise = NoiseModel{std, scenario.seed + 1};
  }
  const TimeSeries ts =
      integrate(sys, spec, scenario.initial_state(), scenario.initial_estimate(sys), inputs,
                scenario.duration, scenario.integrator, noise);

  RunResult res;
  res.record.header = record_header(sys);
  std::vector<double> norms;
  norms.reserve(ts.t.size());
  for (size_t k = 0; k < ts.t.size(); ++k) {
    const AlgebraVector xi = log(ts.eta[k]);
    norms.push_back(xi.norm());
    if (k % static_cast<size_t>(scenario.stride) != 0) continue;
    std::vector<double> row{ts.t[k]};
    auto append = [&row](const Vector& v) { row.insert(row.end(), v.data(), v.data() + v.size()); };
    append(ts.x[k].params());
    append(ts.xhat[k].params());
    append(xi);
    row.push_back(xi.norm());
    append(ts.y[k]);
    append(ts.yhat[k]);
    res.record.rows.push_back(std::move(row));
  }

  RunSummary& s = res.summary;
  s.name = scenario.name;
  s.system = scenario.system;
  s.samples = res.record.rows.size();
  s.final_xi_norm = norms.back();
  s.max_xi_norm = *std::max_element(norms.begin(), norms.end());
  const size_t half = ts.t.size() / 2;
  s.decay_rate = -log_slope(std::vector<double>(ts.t.begin() + static_cast<long>(half), ts.t.end()),
                            std::vector<double>(norms.begin() + static_cast<long>(half), norms.end()));
  const PermanenceVerdict pv = is_permanent(sys, ts.t, ts.x, inputs);
  s.permanent = pv.permanent;
  s.permanence_deviation = pv.max_deviation;
  return res;
}

RunResult run_scenario_file(const std::string& path) { return run_scenario(load_scenario(path)); }

}  // namespace invobs
