#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gmmpp/analysis.hpp"
#include "gmmpp/config.hpp"
#include "gmmpp/epidemic.hpp"
#include "gmmpp/runner.hpp"
#include "gmmpp/util.hpp"

namespace py = pybind11;
using namespace gmmpp;

namespace {

py::dict trace_dict(const std::vector<PosteriorSample>& samples,
                    const ModelSpec& spec) {
  py::dict out;
  std::vector<double> lp, ll, nj, t1;
  for (const auto& s : samples) {
    lp.push_back(s.log_post);
    ll.push_back(s.log_lik);
    nj.push_back(static_cast<double>(s.skel.jumps.size()));
    t1.push_back(s.skel.jumps.empty() ? std::numeric_limits<double>::quiet_NaN()
                                      : s.skel.jumps[0].time);
  }
  out["log_post"] = lp;
  out["log_lik"] = ll;
  out["n_jumps"] = nj;
  out["t1"] = t1;
  const auto names = param_names(spec);
  std::vector<std::vector<double>> cols(names.size());
  for (const auto& s : samples) {
    const auto vals = param_values(s, spec);
    for (std::size_t i = 0; i < vals.size(); ++i) cols[i].push_back(vals[i]);
  }
  for (std::size_t i = 0; i < names.size(); ++i) out[names[i].c_str()] = cols[i];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Markov modulated Poisson processes with switching functional forms: "
            "simulation and exact MCMC inference";

  m.def("build_state_map", [](int k, const std::vector<bool>& flags) {
    const StateMap sm = build_state_map(k, flags);
    py::dict d;
    d["num_forms"] = sm.num_forms;
    d["num_states"] = sm.num_states;
    std::vector<int> h;
    for (int s : sm.h) h.push_back(s + 1);
    d["h"] = h;
    return d;
  });

  m.def("expand_q_matrix",
        [](const std::vector<double>& rates,
           const std::vector<std::vector<double>>& trans,
           const std::vector<bool>& flags) {
          const StateMap sm = build_state_map(static_cast<int>(rates.size()), flags);
          const SquareMatrix Q = expand_q_matrix(QParams{rates, trans}, sm);
          std::vector<std::vector<double>> rows(static_cast<std::size_t>(Q.n));
          for (int i = 0; i < Q.n; ++i)
            for (int j = 0; j < Q.n; ++j) rows[static_cast<std::size_t>(i)].push_back(Q.at(i, j));
          return rows;
        });

  m.def("matrix_exponential",
        [](const std::vector<std::vector<double>>& q, double t) {
          const int n = static_cast<int>(q.size());
          SquareMatrix Q(n);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Q.at(i, j) = q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          const SquareMatrix E = matrix_exponential(Q, t);
          std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) rows[static_cast<std::size_t>(i)].push_back(E.at(i, j));
          return rows;
        });

  m.def("ess", [](const std::vector<double>& chain) -> py::object {
    const auto r = ess(std::span<const double>(chain));
    if (!r) return py::none();
    return py::float_(*r);
  });

  m.def("norm_cdf", [](double x) { return norm_cdf(x); });
  m.def("norm_quantile", [](double p) { return norm_quantile(p); });

  m.def("kernel_estimate",
        [](const std::vector<double>& events, double horizon, double bandwidth,
           const std::vector<double>& grid) {
          return kernel_estimate(events, horizon, bandwidth, grid);
        });

  m.def(
      "simulate",
      [](const std::string& config_path, std::uint64_t seed) {
        const RunSetup setup = load_setup(config_path);
        const SimulateOutcome sim = simulate_model(setup, seed);
        py::dict d;
        d["events"] = sim.events;
        d["integrated_intensity"] = sim.integrated_intensity;
        std::vector<double> starts{0.0};
        std::vector<int> states{sim.path.v0 + 1};
        for (const auto& j : sim.path.jumps) {
          starts.push_back(j.time);
          states.push_back(j.state + 1);
        }
        d["segment_starts"] = starts;
        d["segment_states"] = states;
        d["start_values"] = sim.path.start_values;
        return d;
      },
      py::arg("config"), py::arg("seed") = 1);

  m.def(
      "log_likelihood",
      [](const std::string& config_path, const std::vector<double>& events) {
        const RunSetup setup = load_setup(config_path);
        if (!setup.fixed_path)
          throw std::invalid_argument("config must pin a [path] for this helper");
        PathSkeleton skel = *setup.fixed_path;
        const PsiSet psi = psi_of(setup.spec);
        if (skel.start_values.empty()) {
          skel.start_values.resize(skel.num_segments());
          refresh_fixed_starts(skel, setup.spec, psi);
        }
        PointPattern y;
        y.times = events;
        y.horizon = setup.spec.horizon;
        return log_likelihood(y, skel, setup.spec, psi);
      },
      py::arg("config"), py::arg("events"));

  m.def(
      "fit",
      [](const std::string& config_path, const std::vector<double>& events,
         std::uint64_t seed, long iters, long burnin, long thin) {
        RunSetup setup = load_setup(config_path);
        if (iters > 0) setup.mcmc.n_iter = iters;
        if (burnin >= 0) setup.mcmc.burn_in = burnin;
        if (thin > 0) setup.mcmc.thin = thin;
        PointPattern y;
        y.times = events;
        std::sort(y.times.begin(), y.times.end());
        y.horizon = setup.spec.horizon;
        const FitOutcome fit = fit_model(setup, y, 1, seed);
        py::dict d = trace_dict(fit.chains[0].result.samples, setup.spec);
        py::dict acc;
        for (const auto& a : fit.chains[0].result.acceptance)
          acc[a.name.c_str()] = a.rate();
        d["acceptance"] = acc;
        d["wall_seconds"] = fit.chains[0].wall_seconds;
        d["ess_log_post"] = fit.chains[0].ess_log_post;
        return d;
      },
      py::arg("config"), py::arg("events"), py::arg("seed") = 1,
      py::arg("iters") = -1, py::arg("burnin") = -1, py::arg("thin") = -1);
}
