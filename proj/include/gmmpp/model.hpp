#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gmmpp {

enum class FormKind { kConstant, kLinear, kExponential, kEpidemicGrowth, kEpidemicDecay };

std::string form_kind_name(FormKind k);

struct GammaHyper {
  double shape = 1.0;
  double rate = 1.0;
};

// How the intensity restarts when the chain (re)enters a form.
//   kFixed: the segment start is a model parameter (the form's first psi slot
//           for constant/linear/exponential; implied by the curve for the
//           epidemic forms).
//   kVaryingDiscrete: a fresh start is drawn per visit, uniformly over a
//           finite support.
//   kVaryingGamma: continuous Gamma prior per visit; constant form only.
struct StartPolicy {
  enum class Kind { kFixed, kVaryingDiscrete, kVaryingGamma } kind = Kind::kFixed;
  std::vector<double> support;  // kVaryingDiscrete: sorted, positive
  GammaHyper gamma;             // kVaryingGamma

  static StartPolicy fixed() { return {}; }
  static StartPolicy discrete(std::vector<double> s) {
    StartPolicy p;
    p.kind = Kind::kVaryingDiscrete;
    p.support = std::move(s);
    return p;
  }
  static StartPolicy gamma_prior(double shape, double rate) {
    StartPolicy p;
    p.kind = Kind::kVaryingGamma;
    p.gamma = {shape, rate};
    return p;
  }
};

// One functional form g_k. `psi` holds the form's free parameters; its layout
// depends on kind and the start policy:
//   constant     fixed: [value]            varying: []
//   linear       fixed: [start, slope]     varying: [slope]
//   exponential  fixed: [start, rate]      varying: [rate]
//   epidemic_growth:   [b1, a, d1, c1dot]  (absolute-time curve)
//   epidemic_decay:    [b2, d2, c2dot]     (start anchored by continuity)
struct FunctionalForm {
  FormKind kind = FormKind::kConstant;
  StartPolicy start;
  std::vector<double> psi;
  bool self_jump = false;

  std::size_t psi_dim() const;
  bool start_from_psi() const;
  // Slot of the trend parameter (slope / rate) inside psi, for linear and
  // exponential kinds.
  std::size_t trend_slot() const { return start_from_psi() ? 1 : 0; }
};

// Surjective map h from CTMC states onto functional forms. States are
// 0-based internally; with self-jumps enabled the space doubles and state
// K+k is the second copy of form k.
struct StateMap {
  int num_forms = 0;   // K
  int num_states = 0;  // E: K or 2K
  std::vector<int> h;  // size E, values in [0, K)
  std::vector<bool> self_jump;

  bool doubled() const { return num_states == 2 * num_forms; }
  int form_of(int state) const { return h[static_cast<std::size_t>(state)]; }
  // The state a non-self transition into form k must enter.
  int entry_state(int form) const { return form; }
  // The companion copy used by a self-jump of form k out of `state`.
  int self_target(int state) const {
    return state < num_forms ? state + num_forms : state - num_forms;
  }
};

StateMap build_state_map(int num_forms, const std::vector<bool>& self_jump_flags);

// Waiting-time rates theta_k and transition probability vectors theta_{k.}.
// Without self-jumps row k has K-1 entries (targets in ascending form order,
// skipping k); with self-jumps it has K entries (slot k = self-jump mass).
struct QParams {
  std::vector<double> rates;
  std::vector<std::vector<double>> trans;

  // Probability of moving from form k to form `to` (self included if allowed).
  double trans_prob(int k, int to, const StateMap& m) const;
};

// Row-major square matrix, sized for tiny CTMC state spaces.
struct SquareMatrix {
  int n = 0;
  std::vector<double> a;

  SquareMatrix() = default;
  explicit SquareMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

SquareMatrix expand_q_matrix(const QParams& q, const StateMap& m);

struct PsiPrior {
  enum class Kind {
    kImproperUniform,  // contributes 0 inside optional bounds
    kNormal,
    kGamma,
    kTruncatedUniform,  // proper: -log(hi-lo) inside
    kFixed,             // parameter frozen at its configured value
  } kind = Kind::kImproperUniform;
  std::optional<double> lo, hi;  // bounds for the uniform kinds
  double a = 0.0, b = 1.0;       // mean/sd or shape/rate

  double log_pdf(double x) const;
  bool in_support(double x) const;
};

struct ThetaRatePrior {
  bool fixed = false;
  GammaHyper gamma;  // when not fixed
};

struct ThetaTransPrior {
  bool fixed = false;
  std::vector<double> concentration;  // Dirichlet, when not fixed
};

struct PriorSpec {
  std::vector<ThetaRatePrior> theta_rate;            // per form
  std::vector<ThetaTransPrior> theta_trans;          // per form
  std::vector<std::vector<PsiPrior>> psi;            // per form, per parameter
};

struct ModelSpec {
  std::vector<FunctionalForm> forms;
  StateMap state_map;
  QParams theta;        // initial / true values
  PriorSpec priors;
  std::vector<double> pi0;  // over states; defaults to uniform on first K
  double horizon = 0.0;     // S
  bool pi0_on_copies = false;

  int num_forms() const { return state_map.num_forms; }
  int num_states() const { return state_map.num_states; }
  bool epidemic_kinds() const;
};

// Fills pi0 (uniform over entry states) and psi priors (improper uniform) when
// absent, so hand-built specs stay terse.
void finalize_defaults(ModelSpec& spec);

// Returns every violated invariant as a human-readable message; empty = ok.
std::vector<std::string> validate_model(const ModelSpec& spec);

}  // namespace gmmpp
