#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmmpp/analysis.hpp"
#include "gmmpp/config.hpp"
#include "gmmpp/likelihood.hpp"

namespace gmmpp {

// Shortest round-trip decimal text for a double; all files use this so that
// identical runs produce identical bytes.
std::string num_text(double v);

// Event-times file: one time per line (optional "time" header tolerated).
// Weekly-count files: CSV week_start,count with ISO dates or day offsets.
// Unsorted input is sorted; negative times or events beyond the horizon are
// rejected with the offending line.
PointPattern ingest(const std::string& path, const std::string& kind, double horizon,
                    std::uint64_t seed);

std::vector<double> read_event_times(const std::string& path);

void write_lines(const std::string& path, const std::vector<std::string>& lines);
void write_events(const std::string& path, std::span<const double> events);
void write_true_path(const std::string& path, const PathSkeleton& skel,
                     const ModelSpec& spec, double integral);

void write_trace_csv(const std::string& path, const std::vector<PosteriorSample>& trace,
                     const ModelSpec& spec);
void write_paths_csv(const std::string& path, const std::vector<PosteriorSample>& trace);
void write_summary_csv(const std::string& path, const PosteriorSummary& summary);
void write_if_grid_csv(const std::string& path, const PosteriorSummary& summary);
void write_acceptance_csv(const std::string& path,
                          const std::vector<AcceptanceEntry>& acceptance,
                          int chain);

// Reload what write_trace_csv / write_paths_csv produced, for `predict` runs.
std::vector<PosteriorSample> read_fit_outputs(const std::string& trace_path,
                                              const std::string& paths_path,
                                              const ModelSpec& spec);

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t config_hash = 0;
  std::string data_path;
  std::uint64_t data_hash = 0;
  std::uint64_t seed = 0;
  int chains = 1;
  std::string out_dir;
};

void write_manifest(const std::string& path, const RunManifest& m);

std::uint64_t file_hash(const std::string& path);

}  // namespace gmmpp
