#include "gmmpp/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include "gmmpp/analysis.hpp"
#include "gmmpp/epidemic.hpp"
#include "gmmpp/util.hpp"

namespace gmmpp {

namespace fs = std::filesystem;

std::string default_out_dir() {
  if (const char* env = std::getenv("GMMPP_OUT")) return env;
  return "out";
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir);
}

// Starting values for a freshly drawn trajectory, segment by segment.
void draw_start_values(PathSkeleton& skel, const ModelSpec& spec, const PsiSet& psi,
                       Rng& rng) {
  skel.start_values.resize(skel.num_segments());
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int k = spec.state_map.form_of(skel.state_of_segment(i));
    const auto& f = spec.forms[static_cast<std::size_t>(k)];
    switch (f.start.kind) {
      case StartPolicy::Kind::kFixed:
        if (f.kind == FormKind::kEpidemicDecay) {
          // Continuity with the preceding segment.
          if (i == 0)
            throw std::runtime_error("simulate: decay form cannot open the path");
          const std::size_t j = i - 1;
          const int kp = spec.state_map.form_of(skel.state_of_segment(j));
          skel.start_values[i] = eval_form(
              spec.forms[static_cast<std::size_t>(kp)],
              psi[static_cast<std::size_t>(kp)], skel.segment_begin(j),
              skel.start_values[j], skel.segment_begin(i));
        } else {
          skel.start_values[i] = resolved_fixed_start(
              f, psi[static_cast<std::size_t>(k)], skel.segment_begin(i));
        }
        break;
      case StartPolicy::Kind::kVaryingDiscrete:
        skel.start_values[i] = f.start.support[static_cast<std::size_t>(
            rng.uniform() * static_cast<double>(f.start.support.size()))];
        break;
      case StartPolicy::Kind::kVaryingGamma:
        skel.start_values[i] = rng.gamma(f.start.gamma.shape, f.start.gamma.rate);
        break;
    }
  }
}

}  // namespace

SimulateOutcome simulate_model(const RunSetup& setup, std::uint64_t seed) {
  const ModelSpec& spec = setup.spec;
  {
    const auto v = validate_model(spec);
    if (!v.empty()) throw std::invalid_argument("simulate: invalid model: " + v[0]);
  }
  Rng rng(split_seed(seed, 0));
  const PsiSet psi = psi_of(spec);
  SimulateOutcome out;
  const SquareMatrix Q = expand_q_matrix(spec.theta, spec.state_map);
  for (int attempt = 0;; ++attempt) {
    if (attempt > 100000)
      throw std::runtime_error("simulate: could not draw a non-negative trajectory");
    PathSkeleton skel;
    if (setup.fixed_path) {
      skel = *setup.fixed_path;
      if (skel.start_values.empty()) draw_start_values(skel, spec, psi, rng);
    } else {
      skel = simulate_ctmc(Q, spec.pi0, spec.horizon, rng);
      draw_start_values(skel, spec, psi, rng);
    }
    if (min_on_path(skel, spec, psi) < 0.0) {
      if (setup.fixed_path &&
          setup.fixed_path->start_values.size() == skel.num_segments())
        throw std::runtime_error("simulate: pinned path has negative intensity");
      continue;  // zero-density trajectory under the model
    }
    out.path = std::move(skel);
    break;
  }
  out.events = simulate_nhpp(out.path, spec, psi, rng);
  out.integrated_intensity = integrate_path(out.path, spec, psi);
  return out;
}

void run_simulate(const std::string& config_path, std::uint64_t seed,
                  const std::string& out_dir) {
  const RunSetup setup = load_setup(config_path);
  ensure_dir(out_dir);
  const SimulateOutcome sim = simulate_model(setup, seed);
  write_events(out_dir + "/events.txt", sim.events);
  write_true_path(out_dir + "/true_path.csv", sim.path, setup.spec,
                  sim.integrated_intensity);
  RunManifest m;
  m.command = "simulate";
  m.config_path = config_path;
  m.config_hash = file_hash(config_path);
  m.seed = seed;
  m.out_dir = out_dir;
  write_manifest(out_dir + "/manifest.json", m);
}

FitOutcome fit_model(const RunSetup& setup, const PointPattern& y, int chains,
                     std::uint64_t seed) {
  FitOutcome out;
  out.chains.resize(static_cast<std::size_t>(chains));
  std::vector<std::thread> workers;
  for (int c = 0; c < chains; ++c) {
    workers.emplace_back([&, c] {
      SamplerConfig cfg = setup.mcmc;
      cfg.seed = split_seed(seed, static_cast<std::uint64_t>(c));
      Rng rng(cfg.seed);
      const auto t0 = std::chrono::steady_clock::now();
      GibbsResult res = setup.epidemic
                            ? fit_epidemic(y, setup.spec, cfg, setup.epi_options, rng)
                            : run_gibbs(y, setup.spec, cfg, rng);
      const auto t1 = std::chrono::steady_clock::now();
      auto& slot = out.chains[static_cast<std::size_t>(c)];
      slot.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
      std::vector<double> lp;
      lp.reserve(res.samples.size());
      for (const auto& s : res.samples) lp.push_back(s.log_post);
      if (lp.size() >= 10)
        slot.ess_log_post = ess(lp).value_or(0.0);
      slot.sec_per_100_ess = slot.ess_log_post > 0.0
                                 ? slot.wall_seconds / (slot.ess_log_post / 100.0)
                                 : 0.0;
      slot.result = std::move(res);
    });
  }
  for (auto& w : workers) w.join();

  std::vector<PosteriorSample> pooled;
  for (const auto& c : out.chains)
    pooled.insert(pooled.end(), c.result.samples.begin(), c.result.samples.end());
  const int n_grid = 101;
  std::vector<double> grid(n_grid);
  for (int i = 0; i < n_grid; ++i)
    grid[static_cast<std::size_t>(i)] = setup.spec.horizon * i / (n_grid - 1);
  out.summary = summarize(pooled, setup.spec, grid);
  return out;
}

void run_fit(const std::string& config_path, const std::string& data_path,
             std::uint64_t seed, int chains, const std::string& out_dir,
             const FitOverrides& overrides) {
  RunSetup setup = load_setup(config_path);
  if (overrides.iters) setup.mcmc.n_iter = *overrides.iters;
  if (overrides.burnin) setup.mcmc.burn_in = *overrides.burnin;
  if (overrides.thin) setup.mcmc.thin = *overrides.thin;
  const std::uint64_t run_seed = overrides.seed.value_or(seed);
  const PointPattern y = ingest(data_path, setup.data_kind, setup.spec.horizon,
                                split_seed(run_seed, 0xDA7A));
  ensure_dir(out_dir);
  const FitOutcome fit = fit_model(setup, y, chains, run_seed);

  for (int c = 0; c < chains; ++c) {
    const auto& chain = fit.chains[static_cast<std::size_t>(c)];
    const std::string tag = "_c" + std::to_string(c);
    write_trace_csv(out_dir + "/trace" + tag + ".csv", chain.result.samples,
                    setup.spec);
    write_paths_csv(out_dir + "/paths" + tag + ".csv", chain.result.samples);
    write_acceptance_csv(out_dir + "/acceptance" + tag + ".csv",
                         chain.result.acceptance, c);
  }
  write_summary_csv(out_dir + "/summary.csv", fit.summary);
  write_if_grid_csv(out_dir + "/if_grid.csv", fit.summary);
  {
    std::vector<std::string> lines;
    lines.push_back("chain,wall_seconds,ess_log_post,sec_per_100_ess");
    for (int c = 0; c < chains; ++c) {
      const auto& chain = fit.chains[static_cast<std::size_t>(c)];
      lines.push_back(std::to_string(c) + "," + num_text(chain.wall_seconds) + "," +
                      num_text(chain.ess_log_post) + "," +
                      num_text(chain.sec_per_100_ess));
    }
    write_lines(out_dir + "/timing.csv", lines);
  }
  RunManifest m;
  m.command = "fit";
  m.config_path = config_path;
  m.config_hash = file_hash(config_path);
  m.data_path = data_path;
  m.data_hash = file_hash(data_path);
  m.seed = run_seed;
  m.chains = chains;
  m.out_dir = out_dir;
  write_manifest(out_dir + "/manifest.json", m);
}

void run_predict(const std::string& config_path, const std::string& fit_dir,
                 std::optional<double> horizon, std::optional<double> threshold,
                 std::uint64_t seed, const std::string& out_dir) {
  const RunSetup setup = load_setup(config_path);
  ensure_dir(out_dir);
  std::vector<PosteriorSample> trace;
  for (int c = 0;; ++c) {
    const std::string tag = "_c" + std::to_string(c);
    const std::string tr = fit_dir + "/trace" + tag + ".csv";
    if (!fs::exists(tr)) {
      if (c == 0) throw std::runtime_error("predict: no trace files under " + fit_dir);
      break;
    }
    auto part = read_fit_outputs(tr, fit_dir + "/paths" + tag + ".csv", setup.spec);
    trace.insert(trace.end(), part.begin(), part.end());
  }

  std::vector<std::string> lines;
  if (setup.epidemic) {
    if (!threshold)
      throw std::runtime_error(
          "predict: the epidemic model needs an explicit --threshold");
    const auto draws = predict_stabilization(trace, *threshold, setup.spec.horizon);
    lines.push_back("draw,time,iif,finite");
    long non_finite = 0;
    std::vector<double> times, iifs;
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const auto& d = draws[i];
      lines.push_back(std::to_string(i) + "," + num_text(d.time) + "," +
                      num_text(d.iif) + "," + (d.finite ? "1" : "0"));
      if (d.finite) {
        times.push_back(d.time);
        iifs.push_back(d.iif);
      } else {
        ++non_finite;
      }
    }
    write_lines(out_dir + "/predictive_draws.csv", lines);
    std::vector<std::string> sum;
    sum.push_back("quantity,mean,sd,ci_lo,ci_hi");
    if (!times.empty()) {
      sum.push_back("stabilization_time," + num_text(sample_mean(times)) + "," +
                    num_text(times.size() > 1 ? sample_sd(times) : 0.0) + "," +
                    num_text(sample_quantile(times, 0.025)) + "," +
                    num_text(sample_quantile(times, 0.975)));
      sum.push_back("iif_to_stabilization," + num_text(sample_mean(iifs)) + "," +
                    num_text(iifs.size() > 1 ? sample_sd(iifs) : 0.0) + "," +
                    num_text(sample_quantile(iifs, 0.025)) + "," +
                    num_text(sample_quantile(iifs, 0.975)));
    }
    sum.push_back("non_finite_fraction," +
                  num_text(static_cast<double>(non_finite) /
                           static_cast<double>(std::max<std::size_t>(1, draws.size()))) +
                  ",0,0,0");
    write_lines(out_dir + "/predictive_summary.csv", sum);
  } else {
    if (!horizon || !(*horizon > 0.0))
      throw std::runtime_error("predict: need a positive --horizon");
    Rng rng(split_seed(seed, 0xBEEF));
    const auto iif =
        predict(trace, setup.spec, *horizon, PredictTarget::kIntegratedIf, {}, rng);
    Rng rng2(split_seed(seed, 0xBEEF));
    const auto counts =
        predict(trace, setup.spec, *horizon, PredictTarget::kEventCount, {}, rng2);
    lines.push_back("draw,integrated_if,event_count");
    std::vector<double> iifs, ns;
    for (std::size_t i = 0; i < iif.size(); ++i) {
      lines.push_back(std::to_string(i) + "," + num_text(iif[i].integrated_if) + "," +
                      std::to_string(counts[i].event_count));
      iifs.push_back(iif[i].integrated_if);
      ns.push_back(static_cast<double>(counts[i].event_count));
    }
    write_lines(out_dir + "/predictive_draws.csv", lines);
    std::vector<std::string> sum;
    sum.push_back("quantity,mean,sd,ci_lo,ci_hi");
    sum.push_back("integrated_if," + num_text(sample_mean(iifs)) + "," +
                  num_text(iifs.size() > 1 ? sample_sd(iifs) : 0.0) + "," +
                  num_text(sample_quantile(iifs, 0.025)) + "," +
                  num_text(sample_quantile(iifs, 0.975)));
    sum.push_back("event_count," + num_text(sample_mean(ns)) + "," +
                  num_text(ns.size() > 1 ? sample_sd(ns) : 0.0) + "," +
                  num_text(sample_quantile(ns, 0.025)) + "," +
                  num_text(sample_quantile(ns, 0.975)));
    write_lines(out_dir + "/predictive_summary.csv", sum);
  }
  RunManifest m;
  m.command = "predict";
  m.config_path = config_path;
  m.config_hash = file_hash(config_path);
  m.data_path = fit_dir;
  m.seed = seed;
  m.out_dir = out_dir;
  write_manifest(out_dir + "/manifest.json", m);
}

}  // namespace gmmpp
