#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gmmpp/epidemic.hpp"
#include "gmmpp/mcmc.hpp"
#include "gmmpp/model.hpp"

namespace gmmpp {

// Sectioned key/value text: [section] headers, `key = value` lines, `#`
// comments. Keys keep file order within a section.
struct ConfigFile {
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>
      sections;

  static ConfigFile parse_text(const std::string& text);
  static ConfigFile load(const std::string& path);

  const std::vector<std::pair<std::string, std::string>>* section(
      const std::string& name) const;
  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const;
};

// Everything one run needs, decoded from a config file.
struct RunSetup {
  ModelSpec spec;
  SamplerConfig mcmc;
  bool epidemic = false;
  EpidemicOptions epi_options;
  std::optional<PathSkeleton> fixed_path;  // [path]: pinned trajectory for simulation
  std::string data_kind = "event_times";   // or weekly_counts
};

RunSetup setup_from_config(const ConfigFile& cfg);
RunSetup load_setup(const std::string& path);

// Model sections only ([model], [forms], [qmatrix], [priors]); parsing the
// result reproduces the spec field by field.
std::string serialize_model(const ModelSpec& spec);

}  // namespace gmmpp
