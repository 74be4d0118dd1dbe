#include "gmmpp/model.hpp"

#include <cmath>
#include <stdexcept>

#include "gmmpp/util.hpp"

namespace gmmpp {

std::string form_kind_name(FormKind k) {
  switch (k) {
    case FormKind::kConstant: return "constant";
    case FormKind::kLinear: return "linear";
    case FormKind::kExponential: return "exponential";
    case FormKind::kEpidemicGrowth: return "epidemic_growth";
    case FormKind::kEpidemicDecay: return "epidemic_decay";
  }
  return "?";
}

std::size_t FunctionalForm::psi_dim() const {
  const bool fixed = start.kind == StartPolicy::Kind::kFixed;
  switch (kind) {
    case FormKind::kConstant: return fixed ? 1 : 0;
    case FormKind::kLinear: return fixed ? 2 : 1;
    case FormKind::kExponential: return fixed ? 2 : 1;
    case FormKind::kEpidemicGrowth: return 4;
    case FormKind::kEpidemicDecay: return 3;
  }
  return 0;
}

bool FunctionalForm::start_from_psi() const {
  return start.kind == StartPolicy::Kind::kFixed &&
         (kind == FormKind::kConstant || kind == FormKind::kLinear ||
          kind == FormKind::kExponential);
}

StateMap build_state_map(int num_forms, const std::vector<bool>& self_jump_flags) {
  if (num_forms < 1) throw std::invalid_argument("build_state_map: K must be >= 1");
  if (self_jump_flags.size() != static_cast<std::size_t>(num_forms))
    throw std::invalid_argument("build_state_map: flag count != K");
  StateMap m;
  m.num_forms = num_forms;
  m.self_jump = self_jump_flags;
  bool any = false;
  for (bool f : self_jump_flags) any = any || f;
  m.num_states = any ? 2 * num_forms : num_forms;
  m.h.resize(static_cast<std::size_t>(m.num_states));
  for (int j = 0; j < m.num_states; ++j) m.h[static_cast<std::size_t>(j)] = j % num_forms;
  return m;
}

double QParams::trans_prob(int k, int to, const StateMap& m) const {
  const auto& row = trans[static_cast<std::size_t>(k)];
  if (m.doubled()) return row[static_cast<std::size_t>(to)];
  if (to == k) return 0.0;
  const int slot = to < k ? to : to - 1;
  return row[static_cast<std::size_t>(slot)];
}

SquareMatrix expand_q_matrix(const QParams& q, const StateMap& m) {
  const int K = m.num_forms, E = m.num_states;
  if (q.rates.size() != static_cast<std::size_t>(K) ||
      q.trans.size() != static_cast<std::size_t>(K))
    throw std::invalid_argument("expand_q_matrix: theta size does not match state map");
  const std::size_t row_len = m.doubled() ? static_cast<std::size_t>(K)
                                          : static_cast<std::size_t>(K - 1);
  for (const auto& row : q.trans)
    if (row.size() != row_len)
      throw std::invalid_argument("expand_q_matrix: transition row length mismatch");

  SquareMatrix Q(E);
  for (int j = 0; j < E; ++j) {
    const int k = m.form_of(j);
    const double rate = q.rates[static_cast<std::size_t>(k)];
    Q.at(j, j) = -rate;
    for (int to = 0; to < K; ++to) {
      const double p = q.trans_prob(k, to, m);
      if (p == 0.0) continue;
      // A change of form always enters the first copy; self-jump mass flips
      // to the companion copy.
      const int col = (to == k) ? m.self_target(j) : m.entry_state(to);
      Q.at(j, col) += rate * p;
    }
  }
  return Q;
}

double PsiPrior::log_pdf(double x) const {
  switch (kind) {
    case Kind::kImproperUniform:
      return in_support(x) ? 0.0 : kLogZero;
    case Kind::kNormal:
      return log_normal_pdf(x, a, b);
    case Kind::kGamma:
      return log_gamma_pdf(x, a, b);
    case Kind::kTruncatedUniform:
      return in_support(x) ? -std::log(*hi - *lo) : kLogZero;
    case Kind::kFixed:
      return 0.0;
  }
  return kLogZero;
}

bool PsiPrior::in_support(double x) const {
  if (kind == Kind::kGamma) return x > 0.0;
  if (lo && x < *lo) return false;
  if (hi && x > *hi) return false;
  return true;
}

bool ModelSpec::epidemic_kinds() const {
  for (const auto& f : forms)
    if (f.kind == FormKind::kEpidemicGrowth || f.kind == FormKind::kEpidemicDecay)
      return true;
  return false;
}

void finalize_defaults(ModelSpec& spec) {
  const int K = static_cast<int>(spec.forms.size());
  std::vector<bool> flags(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) flags[static_cast<std::size_t>(k)] = spec.forms[static_cast<std::size_t>(k)].self_jump;
  if (spec.state_map.num_forms == 0) spec.state_map = build_state_map(K, flags);
  if (spec.pi0.empty()) {
    spec.pi0.assign(static_cast<std::size_t>(spec.state_map.num_states), 0.0);
    for (int k = 0; k < K; ++k) spec.pi0[static_cast<std::size_t>(k)] = 1.0 / K;
  }
  if (spec.priors.psi.empty()) spec.priors.psi.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    auto& pp = spec.priors.psi[static_cast<std::size_t>(k)];
    pp.resize(spec.forms[static_cast<std::size_t>(k)].psi_dim());
  }
  if (spec.priors.theta_rate.empty())
    spec.priors.theta_rate.resize(static_cast<std::size_t>(K));
  if (spec.priors.theta_trans.empty())
    spec.priors.theta_trans.resize(static_cast<std::size_t>(K));
}

namespace {

void check_positive(double x, const std::string& what, std::vector<std::string>& out) {
  if (!(x > 0.0)) out.push_back(what + " must be strictly positive");
}

}  // namespace

std::vector<std::string> validate_model(const ModelSpec& spec) {
  std::vector<std::string> v;
  const int K = spec.num_forms();
  if (K < 1) {
    v.push_back("model must have at least one functional form");
    return v;
  }
  if (!(spec.horizon > 0.0)) v.push_back("observation horizon S must be > 0");

  for (int k = 0; k < K; ++k) {
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    const std::string tag = "form " + std::to_string(k + 1);
    if (f.psi.size() != f.psi_dim())
      v.push_back(tag + ": expected " + std::to_string(f.psi_dim()) +
                  " psi parameter(s), got " + std::to_string(f.psi.size()));
    if (f.start.kind == StartPolicy::Kind::kVaryingGamma &&
        f.kind != FormKind::kConstant)
      v.push_back(tag + ": continuous starting-value prior on non-constant form");
    if (f.start.kind == StartPolicy::Kind::kVaryingDiscrete) {
      const auto& s = f.start.support;
      if (s.empty()) v.push_back(tag + ": empty starting-value support");
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] <= 0.0) {
          v.push_back(tag + ": starting-value support must be positive");
          break;
        }
        if (i > 0 && s[i] <= s[i - 1]) {
          v.push_back(tag + ": starting-value support must be strictly increasing");
          break;
        }
      }
    }
    if (f.start.kind == StartPolicy::Kind::kVaryingGamma) {
      if (!(f.start.gamma.shape > 0.0) || !(f.start.gamma.rate > 0.0))
        v.push_back(tag + ": starting-value Gamma hyperparameters must be positive");
    }
    if ((f.kind == FormKind::kEpidemicGrowth || f.kind == FormKind::kEpidemicDecay) &&
        f.start.kind != StartPolicy::Kind::kFixed)
      v.push_back(tag + ": epidemic forms do not take varying starting values");
  }

  // State map coherence.
  const auto& m = spec.state_map;
  if (m.num_forms != K) v.push_back("state map form count does not match forms");
  std::vector<bool> hit(static_cast<std::size_t>(K), false);
  for (int j = 0; j < m.num_states; ++j) {
    const int k = m.form_of(j);
    if (k < 0 || k >= K) {
      v.push_back("state map h leaves the form range");
      break;
    }
    hit[static_cast<std::size_t>(k)] = true;
  }
  for (int k = 0; k < K; ++k)
    if (!hit[static_cast<std::size_t>(k)]) v.push_back("state map h is not surjective");

  // Q parameters.
  if (spec.theta.rates.size() == static_cast<std::size_t>(K)) {
    for (int k = 0; k < K; ++k)
      check_positive(spec.theta.rates[static_cast<std::size_t>(k)],
                     "theta rate " + std::to_string(k + 1), v);
  } else {
    v.push_back("theta rates must have one entry per form");
  }
  const std::size_t row_len =
      m.doubled() ? static_cast<std::size_t>(K) : static_cast<std::size_t>(K - 1);
  if (spec.theta.trans.size() == static_cast<std::size_t>(K)) {
    for (int k = 0; k < K; ++k) {
      const auto& row = spec.theta.trans[static_cast<std::size_t>(k)];
      if (row.size() != row_len) {
        v.push_back("transition row " + std::to_string(k + 1) + " has wrong length");
        continue;
      }
      double sum = 0.0;
      bool neg = false;
      for (double p : row) {
        sum += p;
        neg = neg || p < 0.0;
      }
      if (neg) v.push_back("transition row " + std::to_string(k + 1) + " has negative entries");
      if (K > 1 && std::abs(sum - 1.0) > 1e-9)
        v.push_back("transition row " + std::to_string(k + 1) + " does not sum to 1");
      if (m.doubled() && !spec.forms[static_cast<std::size_t>(k)].self_jump &&
          row[static_cast<std::size_t>(k)] != 0.0)
        v.push_back("form " + std::to_string(k + 1) +
                    " does not allow self-jumps but has self-jump probability");
    }
  } else {
    v.push_back("theta transition vectors must have one row per form");
  }

  // Priors.
  for (std::size_t k = 0; k < spec.priors.theta_rate.size(); ++k) {
    const auto& p = spec.priors.theta_rate[k];
    if (!p.fixed && (!(p.gamma.shape > 0.0) || !(p.gamma.rate > 0.0)))
      v.push_back("theta rate prior " + std::to_string(k + 1) +
                  " needs positive Gamma hyperparameters");
  }
  for (std::size_t k = 0; k < spec.priors.theta_trans.size(); ++k) {
    const auto& p = spec.priors.theta_trans[k];
    if (p.fixed) continue;
    if (p.concentration.size() != row_len)
      v.push_back("Dirichlet concentration " + std::to_string(k + 1) + " has wrong length");
    for (double c : p.concentration)
      if (!(c > 0.0)) {
        v.push_back("Dirichlet concentration " + std::to_string(k + 1) +
                    " must be strictly positive");
        break;
      }
  }
  for (std::size_t k = 0; k < spec.priors.psi.size(); ++k) {
    for (const auto& p : spec.priors.psi[k]) {
      if (p.kind == PsiPrior::Kind::kGamma && (!(p.a > 0.0) || !(p.b > 0.0)))
        v.push_back("psi Gamma prior for form " + std::to_string(k + 1) +
                    " needs positive hyperparameters");
      if (p.kind == PsiPrior::Kind::kTruncatedUniform &&
          (!p.lo || !p.hi || !(*p.hi > *p.lo)))
        v.push_back("truncated uniform prior for form " + std::to_string(k + 1) +
                    " needs finite lo < hi");
    }
  }

  // Initial distribution.
  if (spec.pi0.size() != static_cast<std::size_t>(m.num_states)) {
    v.push_back("pi0 must have one entry per CTMC state");
  } else {
    double sum = 0.0;
    for (double p : spec.pi0) sum += p;
    if (std::abs(sum - 1.0) > 1e-9) v.push_back("pi0 does not sum to 1");
    if (!spec.pi0_on_copies && m.doubled()) {
      for (int j = K; j < m.num_states; ++j)
        if (spec.pi0[static_cast<std::size_t>(j)] != 0.0) {
          v.push_back("pi0 places mass on self-jump copy states");
          break;
        }
    }
  }
  return v;
}

}  // namespace gmmpp
