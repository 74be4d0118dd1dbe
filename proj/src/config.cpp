#include "gmmpp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gmmpp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: cannot parse number '" + s + "'");
  }
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : tokens(s)) out.push_back(parse_double(t));
  return out;
}

long parse_long(const std::string& s) {
  return static_cast<long>(std::llround(parse_double(s)));
}

std::string format_double(double v);

}  // namespace

ConfigFile ConfigFile::parse_text(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  std::string current;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::runtime_error("config: malformed section " + line);
      current = trim(line.substr(1, line.size() - 2));
      cfg.sections.emplace_back(current,
                                std::vector<std::pair<std::string, std::string>>{});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key = value, got '" + line + "'");
    if (cfg.sections.empty())
      throw std::runtime_error("config: key/value before any [section]");
    cfg.sections.back().second.emplace_back(trim(line.substr(0, eq)),
                                            trim(line.substr(eq + 1)));
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

const std::vector<std::pair<std::string, std::string>>* ConfigFile::section(
    const std::string& name) const {
  for (const auto& [n, kv] : sections)
    if (n == name) return &kv;
  return nullptr;
}

std::optional<std::string> ConfigFile::get(const std::string& section_name,
                                           const std::string& key) const {
  const auto* s = section(section_name);
  if (!s) return std::nullopt;
  for (const auto& [k, v] : *s)
    if (k == key) return v;
  return std::nullopt;
}

namespace {

FormKind kind_from(const std::string& s) {
  if (s == "constant") return FormKind::kConstant;
  if (s == "linear") return FormKind::kLinear;
  if (s == "exponential") return FormKind::kExponential;
  if (s == "epidemic_growth") return FormKind::kEpidemicGrowth;
  if (s == "epidemic_decay") return FormKind::kEpidemicDecay;
  throw std::runtime_error("config: unknown form kind '" + s + "'");
}

StartPolicy start_from(const std::string& s) {
  const auto t = tokens(s);
  if (t.empty()) throw std::runtime_error("config: empty start policy");
  if (t[0] == "fixed") return StartPolicy::fixed();
  if (t[0] == "discrete") {
    std::vector<double> sup;
    for (std::size_t i = 1; i < t.size(); ++i) sup.push_back(parse_double(t[i]));
    return StartPolicy::discrete(std::move(sup));
  }
  if (t[0] == "gamma") {
    if (t.size() != 3) throw std::runtime_error("config: start gamma needs shape rate");
    return StartPolicy::gamma_prior(parse_double(t[1]), parse_double(t[2]));
  }
  throw std::runtime_error("config: unknown start policy '" + t[0] + "'");
}

PsiPrior psi_prior_from(const std::string& s) {
  const auto t = tokens(s);
  if (t.empty()) throw std::runtime_error("config: empty prior");
  PsiPrior p;
  if (t[0] == "uniform" || t[0] == "tuniform") {
    p.kind = t[0] == "uniform" ? PsiPrior::Kind::kImproperUniform
                               : PsiPrior::Kind::kTruncatedUniform;
    if (t.size() >= 2 && std::isfinite(parse_double(t[1]))) p.lo = parse_double(t[1]);
    if (t.size() >= 3 && std::isfinite(parse_double(t[2]))) p.hi = parse_double(t[2]);
    return p;
  }
  if (t[0] == "normal") {
    p.kind = PsiPrior::Kind::kNormal;
    p.a = parse_double(t.at(1));
    p.b = parse_double(t.at(2));
    return p;
  }
  if (t[0] == "gamma") {
    p.kind = PsiPrior::Kind::kGamma;
    p.a = parse_double(t.at(1));
    p.b = parse_double(t.at(2));
    return p;
  }
  if (t[0] == "fixed") {
    p.kind = PsiPrior::Kind::kFixed;
    return p;
  }
  throw std::runtime_error("config: unknown prior kind '" + t[0] + "'");
}

}  // namespace

RunSetup setup_from_config(const ConfigFile& cfg) {
  RunSetup run;
  ModelSpec& spec = run.spec;

  const auto forms_count = cfg.get("model", "forms");
  if (!forms_count) throw std::runtime_error("config: [model] forms is required");
  const int K = static_cast<int>(parse_long(*forms_count));
  const auto horizon = cfg.get("model", "horizon");
  if (!horizon) throw std::runtime_error("config: [model] horizon is required");
  spec.horizon = parse_double(*horizon);

  spec.forms.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const std::string pre = std::to_string(k + 1) + ".";
    auto& f = spec.forms[static_cast<std::size_t>(k)];
    const auto kind = cfg.get("forms", pre + "kind");
    if (!kind) throw std::runtime_error("config: missing [forms] " + pre + "kind");
    f.kind = kind_from(*kind);
    if (const auto s = cfg.get("forms", pre + "start")) f.start = start_from(*s);
    if (const auto s = cfg.get("forms", pre + "self_jump"))
      f.self_jump = (*s == "true" || *s == "1");
    if (const auto s = cfg.get("forms", pre + "psi")) f.psi = parse_doubles(*s);
    if (f.psi.empty()) f.psi.resize(f.psi_dim(), 1.0);
  }
  std::vector<bool> flags(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) flags[static_cast<std::size_t>(k)] = spec.forms[static_cast<std::size_t>(k)].self_jump;
  spec.state_map = build_state_map(K, flags);

  if (const auto s = cfg.get("model", "pi0")) {
    spec.pi0 = parse_doubles(*s);
    if (spec.pi0.size() == static_cast<std::size_t>(K) && spec.state_map.doubled())
      spec.pi0.resize(static_cast<std::size_t>(spec.num_states()), 0.0);
    spec.pi0_on_copies = true;
  }
  if (const auto s = cfg.get("model", "pi0_on_copies"))
    spec.pi0_on_copies = (*s == "true" || *s == "1");

  // Q-matrix parameters.
  const bool q_fixed = cfg.get("qmatrix", "fixed").value_or("false") == "true";
  if (const auto s = cfg.get("qmatrix", "rates")) spec.theta.rates = parse_doubles(*s);
  spec.theta.trans.resize(static_cast<std::size_t>(K));
  const std::size_t row_len = spec.state_map.doubled()
                                  ? static_cast<std::size_t>(K)
                                  : static_cast<std::size_t>(K - 1);
  for (int k = 0; k < K; ++k) {
    if (const auto s = cfg.get("qmatrix", "trans." + std::to_string(k + 1)))
      spec.theta.trans[static_cast<std::size_t>(k)] = parse_doubles(*s);
    else if (row_len > 0) {
      // Uniform over the admissible targets.
      auto& row = spec.theta.trans[static_cast<std::size_t>(k)];
      row.assign(row_len, 0.0);
      std::size_t free_slots = row_len;
      if (spec.state_map.doubled() && !spec.forms[static_cast<std::size_t>(k)].self_jump)
        --free_slots;
      for (std::size_t j = 0; j < row_len; ++j) {
        if (spec.state_map.doubled() && j == static_cast<std::size_t>(k) &&
            !spec.forms[static_cast<std::size_t>(k)].self_jump)
          continue;
        row[j] = 1.0 / static_cast<double>(free_slots);
      }
    }
  }

  // Priors.
  finalize_defaults(spec);
  for (int k = 0; k < K; ++k) {
    auto& pr = spec.priors.theta_rate[static_cast<std::size_t>(k)];
    const auto s = cfg.get("priors", "theta." + std::to_string(k + 1));
    if (q_fixed || (s && *s == "fixed")) {
      pr.fixed = true;
    } else if (s) {
      const auto t = tokens(*s);
      if (t.size() != 3 || t[0] != "gamma")
        throw std::runtime_error("config: theta prior must be 'gamma a b' or 'fixed'");
      pr.gamma = {parse_double(t[1]), parse_double(t[2])};
    } else {
      pr.fixed = true;  // no prior given: treat as fixed
    }
    auto& pt = spec.priors.theta_trans[static_cast<std::size_t>(k)];
    const auto st = cfg.get("priors", "trans." + std::to_string(k + 1));
    if (q_fixed || (st && *st == "fixed")) {
      pt.fixed = true;
    } else if (st) {
      const auto t = tokens(*st);
      if (t.size() < 2 || t[0] != "dirichlet")
        throw std::runtime_error("config: trans prior must be 'dirichlet g...' or 'fixed'");
      pt.concentration.clear();
      for (std::size_t i = 1; i < t.size(); ++i)
        pt.concentration.push_back(parse_double(t[i]));
    } else if (row_len > 0) {
      pt.concentration.assign(row_len, 1.0);
    } else {
      pt.fixed = true;
    }
    for (std::size_t p = 0; p < spec.forms[static_cast<std::size_t>(k)].psi_dim(); ++p) {
      const auto sp = cfg.get("priors", "psi." + std::to_string(k + 1) + "." +
                                            std::to_string(p + 1));
      if (sp)
        spec.priors.psi[static_cast<std::size_t>(k)][p] = psi_prior_from(*sp);
    }
  }

  // Initial values override.
  for (int k = 0; k < K; ++k)
    if (const auto s = cfg.get("init", "psi." + std::to_string(k + 1))) {
      const auto v = parse_doubles(*s);
      if (v.size() != spec.forms[static_cast<std::size_t>(k)].psi.size())
        throw std::runtime_error("config: [init] psi length mismatch");
      spec.forms[static_cast<std::size_t>(k)].psi = v;
    }

  // Pinned trajectory for simulation.
  if (const auto states = cfg.get("path", "states")) {
    PathSkeleton skel;
    const auto sv = parse_doubles(*states);
    std::vector<double> times;
    if (const auto t = cfg.get("path", "times")) times = parse_doubles(*t);
    if (sv.size() != times.size() + 1)
      throw std::runtime_error("config: [path] needs one more state than times");
    skel.v0 = static_cast<int>(sv[0]) - 1;
    for (std::size_t i = 0; i < times.size(); ++i)
      skel.jumps.push_back({times[i], static_cast<int>(sv[i + 1]) - 1});
    if (const auto r = cfg.get("path", "starts")) skel.start_values = parse_doubles(*r);
    run.fixed_path = std::move(skel);
  }

  // Sampler settings.
  SamplerConfig& mc = run.mcmc;
  if (const auto s = cfg.get("mcmc", "iterations")) mc.n_iter = parse_long(*s);
  if (const auto s = cfg.get("mcmc", "burnin")) mc.burn_in = parse_long(*s);
  if (const auto s = cfg.get("mcmc", "thin")) mc.thin = parse_long(*s);
  if (const auto s = cfg.get("mcmc", "omega_multiplier"))
    mc.omega_multiplier = parse_double(*s);
  if (const auto s = cfg.get("mcmc", "ctmc_updates"))
    mc.ctmc_updates_per_sweep = static_cast<int>(parse_long(*s));
  if (const auto s = cfg.get("mcmc", "adapt_window")) mc.adapt_window = parse_long(*s);
  if (const auto s = cfg.get("mcmc", "adapt_threshold"))
    mc.adapt_threshold = parse_double(*s);
  if (const auto s = cfg.get("mcmc", "adapt_until")) mc.adapt_until = parse_long(*s);
  if (const auto s = cfg.get("mcmc", "rw_target")) mc.rw_target_accept = parse_double(*s);
  if (const auto s = cfg.get("mcmc", "seed"))
    mc.seed = static_cast<std::uint64_t>(parse_long(*s));

  run.epidemic = spec.epidemic_kinds() ||
                 cfg.get("model", "kind").value_or("gmmpp") == "epidemic";
  if (run.epidemic) {
    if (const auto s = cfg.get("epidemic", "omega_multiplier"))
      run.epi_options.omega_multiplier = parse_double(*s);
    else
      run.epi_options.omega_multiplier = 5.0;
    if (const auto s = cfg.get("epidemic", "window")) {
      if (*s != "auto") {
        const auto w = parse_doubles(*s);
        if (w.size() != 2) throw std::runtime_error("config: epidemic window needs lo hi");
        run.epi_options.window_lo = w[0];
        run.epi_options.window_hi = w[1];
      }
    }
  }
  if (const auto s = cfg.get("data", "kind")) run.data_kind = *s;
  return run;
}

RunSetup load_setup(const std::string& path) {
  return setup_from_config(ConfigFile::load(path));
}

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

std::string psi_prior_text(const PsiPrior& p) {
  const auto bound = [](const std::optional<double>& b, bool low) {
    return b ? format_double(*b) : (low ? std::string("-inf") : std::string("inf"));
  };
  switch (p.kind) {
    case PsiPrior::Kind::kImproperUniform:
      return "uniform " + bound(p.lo, true) + " " + bound(p.hi, false);
    case PsiPrior::Kind::kTruncatedUniform:
      return "tuniform " + bound(p.lo, true) + " " + bound(p.hi, false);
    case PsiPrior::Kind::kNormal:
      return "normal " + format_double(p.a) + " " + format_double(p.b);
    case PsiPrior::Kind::kGamma:
      return "gamma " + format_double(p.a) + " " + format_double(p.b);
    case PsiPrior::Kind::kFixed:
      return "fixed";
  }
  return "uniform";
}

}  // namespace

std::string serialize_model(const ModelSpec& spec) {
  std::ostringstream out;
  const int K = spec.num_forms();
  out << "[model]\n";
  out << "horizon = " << format_double(spec.horizon) << "\n";
  out << "forms = " << K << "\n";
  out << "pi0 = " << join(spec.pi0) << "\n";
  out << "pi0_on_copies = " << (spec.pi0_on_copies ? "true" : "false") << "\n";
  out << "\n[forms]\n";
  for (int k = 0; k < K; ++k) {
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    const std::string pre = std::to_string(k + 1) + ".";
    out << pre << "kind = " << form_kind_name(f.kind) << "\n";
    out << pre << "self_jump = " << (f.self_jump ? "true" : "false") << "\n";
    switch (f.start.kind) {
      case StartPolicy::Kind::kFixed:
        out << pre << "start = fixed\n";
        break;
      case StartPolicy::Kind::kVaryingDiscrete:
        out << pre << "start = discrete " << join(f.start.support) << "\n";
        break;
      case StartPolicy::Kind::kVaryingGamma:
        out << pre << "start = gamma " << format_double(f.start.gamma.shape) << " "
            << format_double(f.start.gamma.rate) << "\n";
        break;
    }
    if (!f.psi.empty()) out << pre << "psi = " << join(f.psi) << "\n";
  }
  out << "\n[qmatrix]\n";
  out << "rates = " << join(spec.theta.rates) << "\n";
  for (int k = 0; k < K; ++k)
    if (!spec.theta.trans[static_cast<std::size_t>(k)].empty())
      out << "trans." << (k + 1) << " = "
          << join(spec.theta.trans[static_cast<std::size_t>(k)]) << "\n";
  out << "\n[priors]\n";
  for (int k = 0; k < K; ++k) {
    const auto& pr = spec.priors.theta_rate[static_cast<std::size_t>(k)];
    out << "theta." << (k + 1) << " = ";
    if (pr.fixed)
      out << "fixed\n";
    else
      out << "gamma " << format_double(pr.gamma.shape) << " "
          << format_double(pr.gamma.rate) << "\n";
    const auto& pt = spec.priors.theta_trans[static_cast<std::size_t>(k)];
    out << "trans." << (k + 1) << " = ";
    if (pt.fixed)
      out << "fixed\n";
    else
      out << "dirichlet " << join(pt.concentration) << "\n";
    for (std::size_t p = 0; p < spec.priors.psi[static_cast<std::size_t>(k)].size(); ++p)
      out << "psi." << (k + 1) << "." << (p + 1) << " = "
          << psi_prior_text(spec.priors.psi[static_cast<std::size_t>(k)][p]) << "\n";
  }
  return out.str();
}

}  // namespace gmmpp
