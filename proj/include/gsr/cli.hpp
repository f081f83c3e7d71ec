#pragma once

// The gsr command-line front end. run() is the whole program; main() only
// forwards to it, so tests can drive it in-process.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsr/io.hpp"

namespace gsr::cli {

enum ExitCode : int { ok = 0, usage_error = 1, verification_failure = 2 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::invalid_argument:
    case ErrorKind::precondition_failed: return usage_error;
    default: return verification_failure;
  }
}

namespace detail {

inline std::pair<double, double> parse_range(const std::string& s, const std::string& flag) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      const double v = std::stod(s);
      return {v, v};
    }
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    fail(ErrorKind::usage, flag + ": expected a or a:b, got '" + s + "'");
  }
}

// Flag values; unset flags leave the config (file or defaults) alone.
struct Overrides {
  std::optional<std::string> config, save_config, output, input, precision, kind, region, method;
  std::optional<std::int64_t> j, k;
  std::optional<double> d, eps, T, delta, scale, step, search_bound, margin, confidence;
  std::optional<std::string> sigma, t, grid, s0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples, N, R, trials, haar_trials;
  std::vector<double> schedule;
  std::vector<std::uint64_t> primes, exceptional;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "JSON run configuration; flags override it");
    app.add_option("--save-config", save_config, "write the effective configuration as JSON");
    app.add_option("--output", output, "results file (JSON lines, appended)");
    app.add_option("--precision", precision, "binary64 | extended");
    app.add_option("--confidence", confidence, "confidence level of reported intervals");
    app.add_option("--seed", seed);
    app.add_option("--j", j, "shift multiplier j (rational target)");
    app.add_option("--k", k, "shift multiplier k (rational target)");
    app.add_option("--d", d, "real shift parameter d");
    app.add_option("--kind", kind, "target kind: rational | irrational | real");
    app.add_option("--exceptional", exceptional, "declared exceptional primes of d")->delimiter(',');
    app.add_option("--sigma", sigma, "sigma range a:b");
    app.add_option("--t", t, "t range a:b");
    app.add_option("--grid", grid, "grid counts a:b");
    app.add_option("--region", region, "auto | absolute | critical-strip | unrestricted");
    app.add_option("--eps", eps);
    app.add_option("--T", T);
    app.add_option("--samples", samples, "tau samples");
    app.add_option("--schedule", schedule, "T schedule for curve")->delimiter(',');
    app.add_option("--primes", primes, "primes of a Kronecker query")->delimiter(',');
    app.add_option("--delta", delta);
    app.add_option("--scale", scale, "frequency scale of a Kronecker query");
    app.add_option("--method", method, "kronecker method: scan | lattice");
    app.add_option("--step", step, "scan step (0: largest admissible)");
    app.add_option("--search-bound", search_bound);
    app.add_option("--N", N, "truncation (0: automatic)");
    app.add_option("--R", R, "torus support (0: automatic)");
    app.add_option("--trials", trials, "Haar trials for the support mass");
    app.add_option("--s0", s0, "base point re:im");
    app.add_option("--haar-trials", haar_trials);
    app.add_option("--margin", margin);
    app.add_option("--input", input, "records file to export");
  }

  void apply(io::RunConfig& c) const {
    if (output) c.output = *output;
    if (input) c.input = *input;
    if (precision) c.precision = *precision;
    if (confidence) c.confidence = *confidence;
    if (seed) c.seed = *seed;
    if (j || k) c.target.kind = "rational";
    if (j) c.target.j = *j;
    if (k) c.target.k = *k;
    if (d) {
      c.target.d = *d;
      if (!kind) c.target.kind = "real";
    }
    if (kind) c.target.kind = *kind;
    if (!exceptional.empty()) c.target.exceptional = exceptional;
    if (sigma) std::tie(c.rect.sigma_lo, c.rect.sigma_hi) = parse_range(*sigma, "--sigma");
    if (t) std::tie(c.rect.t_lo, c.rect.t_hi) = parse_range(*t, "--t");
    if (grid) {
      const auto [a, b] = parse_range(*grid, "--grid");
      if (a != std::floor(a) || b != std::floor(b) || a < 1 || b < 1)
        fail(ErrorKind::usage, "--grid: expected positive integers a:b");
      c.rect.grid_sigma = static_cast<int>(a);
      c.rect.grid_t = static_cast<int>(b);
    }
    if (region) c.rect.region = *region;
    if (eps) c.eps = *eps;
    if (T) c.T = *T;
    if (samples) c.samples = *samples;
    if (!schedule.empty()) c.schedule = schedule;
    if (!primes.empty()) c.primes = primes;
    if (delta) c.delta = *delta;
    if (scale) c.scale = *scale;
    if (method) c.method = *method;
    if (step) c.step = *step;
    if (search_bound) c.search_bound = *search_bound;
    if (N) c.N = *N;
    if (R) c.R = *R;
    if (trials) c.trials = *trials;
    if (s0) std::tie(c.s0_re, c.s0_im) = parse_range(*s0, "--s0");
    if (haar_trials) c.haar_trials = *haar_trials;
    if (margin) c.margin = *margin;
  }
};

inline ScanConfig scan_config(const io::RunConfig& c) {
  ScanConfig s;
  s.target = c.target.build();
  s.K = c.rect.build();
  s.eps = c.eps;
  s.T = c.T;
  s.tau_samples = c.samples;
  s.seed = c.seed;
  s.eval = c.eval();
  s.confidence = c.confidence;
  return s;
}

struct Outcome {
  std::string kind;
  io::json payload;
  std::size_t failures = 0;
  std::string summary;
};

inline Outcome execute(const io::RunConfig& c) {
  std::ostringstream sum;
  if (c.subcommand == "scan") {
    const DensityEstimate e = nu_T(scan_config(c));
    sum << "nu_T = " << e.value << " [" << e.ci.lo << ", " << e.ci.hi << "] (" << e.hits << "/"
        << e.samples << ", " << e.failures << " failures)" << (e.exploratory ? " exploratory" : "");
    return {"density", io::to_json(e), e.failures, sum.str()};
  }
  if (c.subcommand == "curve") {
    const auto curve = density_curve(scan_config(c), c.schedule);
    io::json estimates = io::json::array();
    std::size_t failures = 0;
    for (const auto& e : curve) estimates.push_back(io::to_json(e)), failures += e.failures;
    const LiminfProxy p = liminf_proxy(curve);
    sum << curve.size() << " estimates; running minimum " << p.running_min_value
        << ", lower confidence limit " << p.running_min_lower;
    return {"curve",
            {{"estimates", estimates},
             {"liminf_proxy", io::to_json(p)},
             {"scope", "finite-T proxy; no statement about T -> infinity"}},
            failures,
            sum.str()};
  }
  if (c.subcommand == "kronecker") {
    const KroneckerQuery q{c.primes, c.delta, c.scale, {}};
    q.validate();
    io::json windows = io::json::array();
    if (c.method == "scan") {
      const double step = c.step > 0 ? c.step : max_scan_step(q);
      const auto ws = find_tau_scan(q, c.T, step);
      for (const auto& w : ws) windows.push_back(io::to_json(w));
      const double m = total_measure(ws);
      sum << ws.size() << " windows in [0, " << c.T << "], measure/T = " << m / c.T
          << " (product of arc fractions " << theoretical_density(q) << ")";
      return {"windows",
              {{"method", "scan"},
               {"T", c.T},
               {"step", step},
               {"windows", windows},
               {"total_measure", m},
               {"measure_over_T", m / c.T},
               {"theoretical_density", theoretical_density(q)}},
              0,
              sum.str()};
    }
    if (c.method == "lattice") {
      const TauWindow w = find_tau_lattice(q, c.search_bound);
      windows.push_back(io::to_json(w));
      sum.precision(17);
      sum << "first window [" << w.tau_lo << ", " << w.tau_hi << "]";
      return {"windows",
              {{"method", "lattice"}, {"search_bound", c.search_bound}, {"windows", windows}},
              0,
              sum.str()};
    }
    fail(ErrorKind::usage, "method: expected scan or lattice, got '" + c.method + "'");
  }
  if (c.subcommand == "witness") {
    require(c.target.kind == "rational", "witness needs a rational target (--j, --k)");
    const CompactRect K = c.rect.build();
    WitnessOptions opts;
    if (c.N) opts.N = c.N;
    if (c.R) opts.R = c.R;
    const EvalConfig ev = c.eval();
    const WitnessFunction w = support_witness(K, c.eps, static_cast<long>(c.target.j),
                                              static_cast<long>(c.target.k), c.seed, ev, opts);
    io::json payload{{"witness", io::to_json(w)}};
    sum << "witness N = " << w.N << ", R = " << w.R << ", sup " << w.sup_norm << " < eps = " << c.eps
        << (w.certified ? " (certified)" : " (uncertified)");
    if (c.trials > 0) {
      const MassEstimate m = support_mass(K, c.eps, w, static_cast<long>(c.target.j),
                                          static_cast<long>(c.target.k), c.trials,
                                          derive_seed(c.seed, 1), ev, c.confidence);
      payload["support_mass"] = io::to_json(m);
      sum << "; support mass " << m.value << " [" << m.ci.lo << ", " << m.ci.hi << "]";
    }
    return {"witness", payload, 0, sum.str()};
  }
  if (c.subcommand == "compare") {
    require(c.target.kind == "rational", "compare needs a rational target (--j, --k)");
    const auto r = compare_distributions({c.s0_re, c.s0_im}, static_cast<long>(c.target.j),
                                         static_cast<long>(c.target.k), c.T, c.samples,
                                         c.haar_trials, c.N > 0 ? c.N : 200, c.seed, c.eval());
    sum << "KS statistic " << r.statistic << " (real " << r.ks_real << ", imaginary " << r.ks_imag << ")";
    return {"compare", io::to_json(r), 0, sum.str()};
  }
  if (c.subcommand == "demo41") {
    Theorem41Options opts;
    opts.search_bound = c.search_bound;
    opts.margin = c.margin;
    const Theorem41Report r = theorem41_demo(c.rect.build(), c.eps, c.target.build(), opts, c.eval());
    sum.precision(17);
    sum << "tau = " << r.tau << ", grid sup " << r.zeta_sup << " < 2 eps (1 + margin)";
    return {"demo41", io::to_json(r), 0, sum.str()};
  }
  fail(ErrorKind::usage, "unknown subcommand '" + c.subcommand + "'");
}

inline std::string default_output(const io::RunConfig& c) {
  if (!c.output.empty()) return c.output;
  if (const char* dir = std::getenv("GSR_OUTPUT_DIR"); dir && *dir)
    return std::string(dir) + "/" + c.subcommand + ".jsonl";
  return "";
}

}  // namespace detail

/// Parses argv, runs one subcommand and writes its record. Exit codes: 0 on
/// success, 1 on usage or configuration errors, 2 when a computation or a
/// verification fails.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Self-approximation of the Riemann zeta function: scans, Kronecker windows, "
               "support witnesses"};
  app.require_subcommand(1);
  std::vector<detail::Overrides> overrides(io::subcommands().size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < io::subcommands().size(); ++i) {
    CLI::App* sub = app.add_subcommand(io::subcommands()[i]);
    overrides[i].attach(*sub);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << "\n";
    return usage_error;
  }

  try {
    std::size_t which = 0;
    while (!subs[which]->parsed()) ++which;
    const detail::Overrides& o = overrides[which];
    io::RunConfig cfg = o.config ? io::load_config(*o.config) : io::RunConfig{};
    cfg.subcommand = io::subcommands()[which];
    o.apply(cfg);
    if (o.save_config) io::save_config(cfg, *o.save_config);

    if (cfg.subcommand == "export") {
      if (cfg.input.empty() || cfg.output.empty())
        fail(ErrorKind::usage, "export needs --input and --output");
      const auto records = io::read_records(cfg.input);
      io::export_plot_data(records, cfg.output);
      err << "exported " << records.size() << " record(s) to " << cfg.output << "\n";
      return ok;
    }

    const detail::Outcome res = detail::execute(cfg);
    const io::json record = io::make_record(cfg, res.kind, res.payload, res.failures);
    const std::string path = detail::default_output(cfg);
    if (path.empty()) out << record.dump() << "\n";
    else io::append_record(record, path);
    err << cfg.subcommand << ": " << res.summary << "\n";
    return ok;
  } catch (const Error& e) {
    err << "error: " << e.what();
    if (e.value()) err << " [value " << *e.value() << "]";
    err << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return verification_failure;
  }
}

}  // namespace gsr::cli
