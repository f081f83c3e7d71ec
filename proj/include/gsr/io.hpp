#pragma once

// Run configuration (JSON, unknown keys rejected), result records (one JSON
// object per line) and CSV export of record payloads.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsr/error.hpp"
#include "gsr/kronecker.hpp"
#include "gsr/scanner.hpp"
#include "gsr/target.hpp"
#include "gsr/torus.hpp"
#include "gsr/zeta.hpp"

namespace gsr::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct TargetSpec {
  std::string kind = "rational";  // rational | irrational | real
  std::int64_t j = 1;
  std::int64_t k = 2;
  double d = 1.0;
  std::vector<std::uint64_t> exceptional;

  RecurrenceTarget build() const {
    if (kind == "rational") return RecurrenceTarget::rational(j, k);
    if (kind == "irrational") return RecurrenceTarget::irrational(d, exceptional);
    if (kind == "real") return RecurrenceTarget::real(d);
    fail(ErrorKind::usage, "target.kind: expected rational, irrational or real, got '" + kind + "'");
  }
  bool operator==(const TargetSpec&) const = default;
};

struct RectSpec {
  double sigma_lo = 2.0, sigma_hi = 2.2;
  double t_lo = 0.0, t_hi = 0.1;
  int grid_sigma = 2, grid_t = 2;
  std::string region = "auto";  // auto | absolute | critical-strip | unrestricted

  /// "auto" tags the rectangle by where it lies.
  CompactRect build() const {
    CompactRect K{sigma_lo, sigma_hi, t_lo, t_hi, grid_sigma, grid_t, Region::unrestricted};
    if (region == "absolute") K.region = Region::absolute;
    else if (region == "critical-strip") K.region = Region::critical_strip;
    else if (region == "unrestricted") K.region = Region::unrestricted;
    else if (region == "auto") {
      if (sigma_lo > 1) K.region = Region::absolute;
      else if (sigma_lo > 0.5 && sigma_hi < 1) K.region = Region::critical_strip;
    } else {
      fail(ErrorKind::usage, "rect.region: expected auto, absolute, critical-strip or unrestricted");
    }
    return K;
  }
  bool operator==(const RectSpec&) const = default;
};

/// Union of the parameters of every subcommand; each subcommand reads the
/// fields it needs. Zero means "choose automatically" for step, N and R.
struct RunConfig {
  std::string subcommand = "scan";
  std::string output;  // empty: $GSR_OUTPUT_DIR/<subcommand>.jsonl, else stdout
  std::string input;   // export: records file
  double confidence = 0.95;
  std::string precision = "binary64";  // binary64 | extended
  std::uint64_t seed = 0;
  TargetSpec target;
  RectSpec rect;
  double eps = 0.1;
  double T = 1000;
  std::size_t samples = 1000;
  std::vector<double> schedule;
  std::vector<std::uint64_t> primes{2, 3, 5};
  double delta = 0.5;
  double scale = 1.0;
  std::string method = "scan";  // scan | lattice
  double step = 0;
  double search_bound = 1e12;
  std::size_t N = 0;
  std::size_t R = 0;
  std::size_t trials = 0;
  double s0_re = 2.0, s0_im = 0.0;
  std::size_t haar_trials = 1000;
  double margin = 0.05;

  EvalConfig eval() const {
    EvalConfig c;
    if (precision == "extended") c.precision = Precision::extended;
    else if (precision != "binary64")
      fail(ErrorKind::usage, "precision: expected binary64 or extended, got '" + precision + "'");
    return c;
  }
  bool operator==(const RunConfig&) const = default;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"scan",    "curve",  "kronecker", "witness",
                                              "compare", "demo41", "export"};
  return names;
}

// ---------------------------------------------------------------------------
// JSON <-> RunConfig

inline json to_json(const TargetSpec& t) {
  return {{"kind", t.kind}, {"j", t.j}, {"k", t.k}, {"d", t.d}, {"exceptional", t.exceptional}};
}

inline json to_json(const RectSpec& r) {
  return {{"sigma", {r.sigma_lo, r.sigma_hi}},
          {"t", {r.t_lo, r.t_hi}},
          {"grid", {r.grid_sigma, r.grid_t}},
          {"region", r.region}};
}

inline json to_json(const RunConfig& c) {
  return {{"subcommand", c.subcommand},
          {"output", c.output},
          {"input", c.input},
          {"confidence", c.confidence},
          {"precision", c.precision},
          {"seed", c.seed},
          {"target", to_json(c.target)},
          {"rect", to_json(c.rect)},
          {"eps", c.eps},
          {"T", c.T},
          {"samples", c.samples},
          {"schedule", c.schedule},
          {"primes", c.primes},
          {"delta", c.delta},
          {"scale", c.scale},
          {"method", c.method},
          {"step", c.step},
          {"search_bound", c.search_bound},
          {"N", c.N},
          {"R", c.R},
          {"trials", c.trials},
          {"s0", {c.s0_re, c.s0_im}},
          {"haar_trials", c.haar_trials},
          {"margin", c.margin}};
}

namespace detail {

// Reads the keys of one JSON object, reporting errors with the field path.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_, "expected an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    convert(j_.at(key), at(key), out);
  }

  template <class Fn>
  void nested(const std::string& key, Fn&& fn) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    ObjectReader sub(j_.at(key), at(key));
    fn(sub);
    sub.finish();
  }

  template <class T>
  void pair(const std::string& key, T& a, T& b) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    std::vector<T> v;
    convert(j_.at(key), at(key), v);
    if (v.size() != 2) bad(at(key), "expected two values");
    a = v[0];
    b = v[1];
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) bad(at(key), "unknown field");
  }

 private:
  [[noreturn]] static void bad(const std::string& path, const std::string& what) {
    fail(ErrorKind::usage, (path.empty() ? std::string("config") : path) + ": " + what);
  }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  static void convert(const json& v, const std::string& path, std::string& out) {
    if (!v.is_string()) bad(path, "expected a string");
    out = v.get<std::string>();
  }
  static void convert(const json& v, const std::string& path, double& out) {
    if (!v.is_number()) bad(path, "expected a number");
    out = v.get<double>();
  }
  static void convert(const json& v, const std::string& path, int& out) {
    if (!v.is_number_integer()) bad(path, "expected an integer");
    out = v.get<int>();
  }
  static void convert(const json& v, const std::string& path, std::int64_t& out) {
    if (!v.is_number_integer()) bad(path, "expected an integer");
    out = v.get<std::int64_t>();
  }
  static void convert(const json& v, const std::string& path, std::uint64_t& out) {
    if (!v.is_number_unsigned()) bad(path, "expected a nonnegative integer");
    out = v.get<std::uint64_t>();
  }
  template <class T>
  static void convert(const json& v, const std::string& path, std::vector<T>& out) {
    if (!v.is_array()) bad(path, "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T x{};
      convert(v[i], path + "[" + std::to_string(i) + "]", x);
      out.push_back(x);
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  detail::ObjectReader r(j, "");
  r.get("subcommand", c.subcommand);
  r.get("output", c.output);
  r.get("input", c.input);
  r.get("confidence", c.confidence);
  r.get("precision", c.precision);
  r.get("seed", c.seed);
  r.nested("target", [&](detail::ObjectReader& t) {
    t.get("kind", c.target.kind);
    t.get("j", c.target.j);
    t.get("k", c.target.k);
    t.get("d", c.target.d);
    t.get("exceptional", c.target.exceptional);
  });
  r.nested("rect", [&](detail::ObjectReader& t) {
    t.pair("sigma", c.rect.sigma_lo, c.rect.sigma_hi);
    t.pair("t", c.rect.t_lo, c.rect.t_hi);
    t.pair("grid", c.rect.grid_sigma, c.rect.grid_t);
    t.get("region", c.rect.region);
  });
  r.get("eps", c.eps);
  r.get("T", c.T);
  r.get("samples", c.samples);
  r.get("schedule", c.schedule);
  r.get("primes", c.primes);
  r.get("delta", c.delta);
  r.get("scale", c.scale);
  r.get("method", c.method);
  r.get("step", c.step);
  r.get("search_bound", c.search_bound);
  r.get("N", c.N);
  r.get("R", c.R);
  r.get("trials", c.trials);
  r.pair("s0", c.s0_re, c.s0_im);
  r.get("haar_trials", c.haar_trials);
  r.get("margin", c.margin);
  r.finish();
  if (std::find(subcommands().begin(), subcommands().end(), c.subcommand) == subcommands().end())
    fail(ErrorKind::usage, "subcommand: unknown subcommand '" + c.subcommand + "'");
  return c;
}

inline json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::usage, where + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunConfig load_config(const std::string& path) {
  return config_from_json(parse_json_text(read_file(path), path));
}

inline void save_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  out << to_json(c).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Payloads

inline json to_json(const BinomialInterval& ci) { return {ci.lo, ci.hi}; }

inline json to_json(const DensityEstimate& e) {
  json j{{"T", e.T},
         {"samples", e.samples},
         {"hits", e.hits},
         {"failures", e.failures},
         {"value", e.value},
         {"ci", to_json(e.ci)},
         {"eps", e.eps},
         {"target", e.target},
         {"exploratory", e.exploratory}};
  if (e.first_failure) j["first_failure"] = *e.first_failure;
  return j;
}

inline json to_json(const TauWindow& w) {
  return {{"tau_lo", w.tau_lo}, {"tau_hi", w.tau_hi}, {"certified", w.certified}};
}

inline json to_json(const LiminfProxy& p) {
  return {{"running_min_value", p.running_min_value},
          {"running_min_lower", p.running_min_lower},
          {"used", p.used},
          {"positive", p.positive()}};
}

inline json to_json(const WitnessFunction& w) {
  json nodes = json::array();
  for (std::size_t i = 0; i < w.nodes.size(); ++i)
    nodes.push_back({{"sigma", w.nodes[i].real()},
                     {"t", w.nodes[i].imag()},
                     {"re", w.samples[i].real()},
                     {"im", w.samples[i].imag()},
                     {"abs", std::abs(w.samples[i])}});
  json j{{"eps", w.eps},    {"j", w.j},
         {"k", w.k},        {"N", w.N},
         {"R", w.R},        {"seed", w.seed},
         {"sup_norm", w.sup_norm}, {"certified", w.certified},
         {"nodes", nodes}};
  j["analytic_bound"] = w.analytic_bound ? json(*w.analytic_bound) : json(nullptr);
  return j;
}

inline json to_json(const MassEstimate& m) {
  return {{"hits", m.hits}, {"trials", m.trials}, {"value", m.value}, {"ci", to_json(m.ci)}};
}

inline json to_json(const DistributionComparison& r) {
  return {{"statistic", r.statistic},
          {"ks_real", r.ks_real},
          {"ks_imag", r.ks_imag},
          {"tau_samples", r.tau_samples},
          {"haar_trials", r.haar_trials},
          {"haar_mean", {r.haar_mean.real(), r.haar_mean.imag()}},
          {"haar_std", {r.haar_std_real, r.haar_std_imag}}};
}

inline json to_json(const Theorem41Report& r) {
  json stages = json::array();
  for (const auto& s : r.stages) stages.push_back({{"name", s.name}, {"detail", s.detail}});
  return {{"target", r.target},
          {"eps", r.eps},
          {"N", r.N},
          {"tail_bound", r.tail_bound},
          {"sensitivity", r.sensitivity},
          {"phi_max", r.phi_max},
          {"delta", r.delta},
          {"conditions", r.conditions},
          {"query_delta", r.query.delta},
          {"frequency_scale", r.query.frequency_scale},
          {"window", to_json(r.window)},
          {"tau", r.tau},
          {"shifts", {r.shift_a, r.shift_b}},
          {"exceptional_deviation", r.exceptional_deviation},
          {"staged_log_bound", r.staged_log_bound},
          {"log_sup", r.log_sup},
          {"zeta_sup", r.zeta_sup},
          {"zeta_level_bound", r.zeta_level_bound},
          {"margin", r.margin},
          {"passed", r.passed},
          {"stages", stages}};
}

// ---------------------------------------------------------------------------
// Records

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// kind names the payload: density | curve | windows | witness | compare | demo41.
inline json make_record(const RunConfig& cfg, const std::string& kind, json payload,
                        std::size_t failures = 0) {
  return {{"schema_version", kSchemaVersion},
          {"timestamp", utc_timestamp()},
          {"config", to_json(cfg)},
          {"kind", kind},
          {"payload", std::move(payload)},
          {"failures", failures}};
}

inline json parse_record(const std::string& line) {
  json r = parse_json_text(line, "record");
  if (!r.is_object() || !r.contains("schema_version"))
    fail(ErrorKind::io, "record without schema_version");
  if (r["schema_version"] != kSchemaVersion)
    fail(ErrorKind::io, "record schema_version " + r["schema_version"].dump() +
                            " is not the supported version " + std::to_string(kSchemaVersion));
  for (const char* key : {"timestamp", "config", "kind", "payload", "failures"})
    if (!r.contains(key)) fail(ErrorKind::io, std::string("record without ") + key);
  return r;
}

inline void append_record(const json& record, const std::string& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) fail(ErrorKind::io, "cannot append to " + path);
  out << record.dump() << "\n";
  if (!out) fail(ErrorKind::io, "write failed on " + path);
}

inline std::vector<json> read_records(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(parse_record(line));
  return out;
}

// ---------------------------------------------------------------------------
// CSV export

inline std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

/// Header row and data rows for one record.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable csv_table(const json& record) {
  const std::string kind = record.at("kind");
  const json& p = record.at("payload");
  CsvTable t;
  auto density_row = [](const json& e) {
    return std::vector<std::string>{
        csv_number(e.at("T")), csv_number(e.at("value")), csv_number(e.at("ci")[0]),
        csv_number(e.at("ci")[1]), std::to_string(e.at("hits").get<std::size_t>()),
        std::to_string(e.at("samples").get<std::size_t>()),
        std::to_string(e.at("failures").get<std::size_t>())};
  };
  if (kind == "density" || kind == "curve") {
    t.header = {"T", "nu_T", "ci_lo", "ci_hi", "hits", "samples", "failures"};
    if (kind == "density") t.rows.push_back(density_row(p));
    else
      for (const auto& e : p.at("estimates")) t.rows.push_back(density_row(e));
  } else if (kind == "windows") {
    t.header = {"tau_lo", "tau_hi", "certified"};
    for (const auto& w : p.at("windows"))
      t.rows.push_back({csv_number(w.at("tau_lo")), csv_number(w.at("tau_hi")),
                        w.at("certified").get<bool>() ? "1" : "0"});
  } else if (kind == "witness") {
    t.header = {"sigma", "t", "re", "im", "abs"};
    for (const auto& n : p.at("witness").at("nodes"))
      t.rows.push_back({csv_number(n.at("sigma")), csv_number(n.at("t")), csv_number(n.at("re")),
                        csv_number(n.at("im")), csv_number(n.at("abs"))});
  } else if (kind == "compare") {
    t.header = {"statistic", "ks_real", "ks_imag", "tau_samples", "haar_trials"};
    t.rows.push_back({csv_number(p.at("statistic")), csv_number(p.at("ks_real")),
                      csv_number(p.at("ks_imag")),
                      std::to_string(p.at("tau_samples").get<std::size_t>()),
                      std::to_string(p.at("haar_trials").get<std::size_t>())});
  } else if (kind == "demo41") {
    t.header = {"stage", "detail"};
    for (const auto& s : p.at("stages"))
      t.rows.push_back({s.at("name"), "\"" + s.at("detail").get<std::string>() + "\""});
  } else {
    fail(ErrorKind::io, "no columnar form for record kind '" + kind + "'");
  }
  return t;
}

/// Writes the rows of every record (all of one kind) under a single header.
inline void export_plot_data(const std::vector<json>& records, const std::string& path) {
  require(!records.empty(), "export_plot_data needs at least one record");
  CsvTable all = csv_table(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    CsvTable t = csv_table(records[i]);
    if (t.header != all.header)
      fail(ErrorKind::invalid_argument, "export_plot_data: records of different kinds");
    all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
  }
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  line(all.header);
  for (const auto& r : all.rows) line(r);
  if (!out) fail(ErrorKind::io, "write failed on " + path);
}

}  // namespace gsr::io
