#include "gmmpp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gmmpp/epidemic.hpp"
#include "gmmpp/util.hpp"
#include "json.hpp"

namespace gmmpp {

std::string num_text(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Days since 1970-01-01 for YYYY-MM-DD (civil-from-days inversion).
long iso_to_day(const std::string& iso) {
  int y, m, d;
  if (std::sscanf(iso.c_str(), "%d-%d-%d", &y, &m, &d) != 3)
    throw std::runtime_error("cannot parse ISO date '" + iso + "'");
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (static_cast<unsigned>(m) + (m > 2 ? -3 : 9)) + 2) / 5 +
                       static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

}  // namespace

std::vector<double> read_event_times(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file " + path);
  std::vector<double> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line == "time") continue;
    try {
      out.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": cannot parse event time '" + line + "'");
    }
  }
  return out;
}

PointPattern ingest(const std::string& path, const std::string& kind, double horizon,
                    std::uint64_t seed) {
  PointPattern y;
  y.horizon = horizon;
  if (kind == "event_times") {
    y.times = read_event_times(path);
  } else if (kind == "weekly_counts") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file " + path);
    std::vector<std::pair<double, long>> weeks;
    std::string line;
    long line_no = 0;
    std::optional<long> first_day;
    while (std::getline(in, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty() || line.rfind("week_start", 0) == 0) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected week_start,count");
      const std::string start = trim(line.substr(0, comma));
      const long count = std::stol(trim(line.substr(comma + 1)));
      double day;
      if (start.find('-') != std::string::npos && start.size() >= 8) {
        const long abs_day = iso_to_day(start);
        if (!first_day) first_day = abs_day;
        day = static_cast<double>(abs_day - *first_day);
      } else {
        day = std::stod(start);
      }
      weeks.emplace_back(day, count);
    }
    y.times = disaggregate_weekly(weeks, seed);
  } else {
    throw std::runtime_error("unknown data kind '" + kind + "'");
  }
  std::sort(y.times.begin(), y.times.end());
  for (std::size_t i = 0; i < y.times.size(); ++i) {
    if (y.times[i] < 0.0)
      throw std::runtime_error(path + ": negative event time " + num_text(y.times[i]));
    if (y.times[i] > horizon)
      throw std::runtime_error(path + ": event " + std::to_string(i + 1) + " at " +
                               num_text(y.times[i]) + " lies beyond the horizon " +
                               num_text(horizon));
  }
  return y;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& l : lines) out << l << "\n";
}

void write_events(const std::string& path, std::span<const double> events) {
  std::vector<std::string> lines;
  lines.reserve(events.size());
  for (double t : events) lines.push_back(num_text(t));
  write_lines(path, lines);
}

void write_true_path(const std::string& path, const PathSkeleton& skel,
                     const ModelSpec& spec, double integral) {
  std::vector<std::string> lines;
  lines.push_back("segment,start,state,form,start_value");
  for (std::size_t i = 0; i < skel.num_segments(); ++i) {
    const int st = skel.state_of_segment(i);
    lines.push_back(std::to_string(i) + "," + num_text(skel.segment_begin(i)) + "," +
                    std::to_string(st + 1) + "," +
                    std::to_string(spec.state_map.form_of(st) + 1) + "," +
                    num_text(skel.start_values.empty() ? 0.0 : skel.start_values[i]));
  }
  lines.push_back("# integrated_intensity," + num_text(integral));
  write_lines(path, lines);
}

void write_trace_csv(const std::string& path, const std::vector<PosteriorSample>& trace,
                     const ModelSpec& spec) {
  std::vector<std::string> lines;
  std::string header = "iteration,log_post,log_lik,n_jumps,t1";
  for (const auto& n : param_names(spec)) header += "," + n;
  lines.push_back(header);
  for (const auto& s : trace) {
    std::string row = std::to_string(s.iteration) + "," + num_text(s.log_post) + "," +
                      num_text(s.log_lik) + "," + std::to_string(s.skel.jumps.size()) +
                      "," +
                      (s.skel.jumps.empty() ? "nan" : num_text(s.skel.jumps[0].time));
    for (double v : param_values(s, spec)) row += "," + num_text(v);
    lines.push_back(row);
  }
  write_lines(path, lines);
}

void write_paths_csv(const std::string& path,
                     const std::vector<PosteriorSample>& trace) {
  std::vector<std::string> lines;
  lines.push_back("draw,segment,start,state,start_value");
  for (std::size_t d = 0; d < trace.size(); ++d) {
    const auto& skel = trace[d].skel;
    for (std::size_t i = 0; i < skel.num_segments(); ++i)
      lines.push_back(std::to_string(d) + "," + std::to_string(i) + "," +
                      num_text(skel.segment_begin(i)) + "," +
                      std::to_string(skel.state_of_segment(i) + 1) + "," +
                      num_text(skel.start_values[i]));
  }
  write_lines(path, lines);
}

void write_summary_csv(const std::string& path, const PosteriorSummary& summary) {
  std::vector<std::string> lines;
  lines.push_back("param,mean,sd,ci_lo,ci_hi");
  for (const auto& r : summary.params)
    lines.push_back(r.name + "," + num_text(r.mean) + "," + num_text(r.sd) + "," +
                    num_text(r.lo) + "," + num_text(r.hi));
  write_lines(path, lines);
}

void write_if_grid_csv(const std::string& path, const PosteriorSummary& summary) {
  std::vector<std::string> lines;
  lines.push_back("time,mean,lo,hi");
  for (const auto& r : summary.if_grid)
    lines.push_back(num_text(r.time) + "," + num_text(r.mean) + "," + num_text(r.lo) +
                    "," + num_text(r.hi));
  write_lines(path, lines);
}

void write_acceptance_csv(const std::string& path,
                          const std::vector<AcceptanceEntry>& acceptance, int chain) {
  std::vector<std::string> lines;
  lines.push_back("chain,update,proposed,accepted,rate");
  for (const auto& a : acceptance)
    lines.push_back(std::to_string(chain) + "," + a.name + "," +
                    std::to_string(a.proposed) + "," + std::to_string(a.accepted) +
                    "," + num_text(a.rate()));
  write_lines(path, lines);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::vector<PosteriorSample> read_fit_outputs(const std::string& trace_path,
                                              const std::string& paths_path,
                                              const ModelSpec& spec) {
  std::ifstream tr(trace_path);
  if (!tr) throw std::runtime_error("missing trace file " + trace_path);
  std::string line;
  if (!std::getline(tr, line)) throw std::runtime_error("empty trace " + trace_path);
  const auto header = split_csv(line);
  const auto names = param_names(spec);
  // Map parameter columns.
  std::vector<std::size_t> col(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto it = std::find(header.begin(), header.end(), names[i]);
    if (it == header.end())
      throw std::runtime_error("trace is missing column " + names[i]);
    col[i] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<PosteriorSample> trace;
  while (std::getline(tr, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    PosteriorSample s;
    s.iteration = std::stol(cells[0]);
    s.log_post = std::stod(cells[1]);
    s.log_lik = std::stod(cells[2]);
    const int K = spec.num_forms();
    std::size_t i = 0;
    s.theta.rates.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) s.theta.rates[static_cast<std::size_t>(k)] = std::stod(cells[col[i++]]);
    s.theta.trans.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      auto& row = s.theta.trans[static_cast<std::size_t>(k)];
      row.resize(spec.theta.trans[static_cast<std::size_t>(k)].size());
      for (auto& v : row) v = std::stod(cells[col[i++]]);
    }
    s.psi.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      auto& row = s.psi[static_cast<std::size_t>(k)];
      row.resize(spec.forms[static_cast<std::size_t>(k)].psi.size());
      for (auto& v : row) v = std::stod(cells[col[i++]]);
    }
    trace.push_back(std::move(s));
  }

  std::ifstream pf(paths_path);
  if (!pf) throw std::runtime_error("missing paths file " + paths_path);
  std::getline(pf, line);  // header
  while (std::getline(pf, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    const auto draw = static_cast<std::size_t>(std::stol(cells[0]));
    const std::size_t seg = static_cast<std::size_t>(std::stol(cells[1]));
    const double start = std::stod(cells[2]);
    const int state = std::stoi(cells[3]) - 1;
    const double r = std::stod(cells[4]);
    if (draw >= trace.size()) throw std::runtime_error("paths file references a missing draw");
    auto& skel = trace[draw].skel;
    if (seg == 0)
      skel.v0 = state;
    else
      skel.jumps.push_back({start, state});
    skel.start_values.push_back(r);
  }
  return trace;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config"] = m.config_path;
  j["config_hash"] = m.config_hash;
  j["data"] = m.data_path;
  j["data_hash"] = m.data_hash;
  j["seed"] = m.seed;
  j["chains"] = m.chains;
  j["out_dir"] = m.out_dir;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path);
  out << j.dump(2) << "\n";
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string s = buf.str();
  return fnv1a64(std::span<const char>(s.data(), s.size()));
}

}  // namespace gmmpp
