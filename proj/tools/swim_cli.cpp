// Command-line front end: simulate, analyze, forward, compare.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swim/errors.hpp"
#include "swim/forwarding.hpp"
#include "swim/metrics.hpp"
#include "swim/scenario.hpp"
#include "swim/simulator.hpp"
#include "swim/trace_io.hpp"

namespace fs = std::filesystem;
using namespace swim;

namespace {

constexpr const char* kCsvFormatHint =
    "expected a contact CSV: optional '# key=value' header lines, then one "
    "'id1,id2,start,end' row per contact (times in seconds)";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError("invalid " + what + ": '" + text + "'");
  return value;
}

/// "a..b" inclusive, or a single seed.
std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {parse_number<std::uint64_t>(text, "seed")};
  const auto lo = parse_number<std::uint64_t>(text.substr(0, dots), "seed range start");
  const auto hi = parse_number<std::uint64_t>(text.substr(dots + 2), "seed range end");
  if (hi < lo) throw UsageError("empty seed range '" + text + "'");
  if (hi - lo >= 100000) throw UsageError("seed range '" + text + "' is too large");
  std::vector<std::uint64_t> seeds;
  for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  return seeds;
}

/// "lo:hi" with "inf" allowed as the upper end.
FitWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("window must look like lo:hi, got '" + text + "'");
  FitWindow w;
  w.lo = parse_number<double>(text.substr(0, colon), "window start");
  const auto hi = text.substr(colon + 1);
  w.hi = (hi == "inf" || hi == "max") ? std::numeric_limits<double>::infinity()
                                      : parse_number<double>(hi, "window end");
  if (!(w.lo >= 0.0) || !(w.hi > w.lo)) throw UsageError("window '" + text + "' is empty or negative");
  return w;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  return out;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw UsageError("cannot create output directory '" + dir.string() + "'");
}

std::string trace_label(const std::string& path, const ContactTrace& trace) {
  if (trace.meta && !trace.meta->name.empty()) return trace.meta->name;
  return fs::path(path).stem().string();
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ' ');
  return s;
}

std::vector<std::uint64_t> seeds_from(const std::string& range, std::uint64_t single, bool range_given) {
  return range_given ? parse_seed_range(range) : std::vector<std::uint64_t>{single};
}

// --------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string preset;
  std::string config;
  std::uint64_t seed = 1;
  std::string seeds;
  std::string out = "-";
  std::size_t nodes = 0;
  bool show_preset = false;
};

void print_run_summary(std::ostream& out, std::uint64_t seed, const EventLog& log) {
  std::map<EventKind, std::size_t> by_kind;
  for (const auto& e : log.events) ++by_kind[e.kind];
  out << "seed " << seed << ": " << log.events.size() << " events (Meet " << by_kind[EventKind::Meet]
      << ", Depart " << by_kind[EventKind::Depart] << ", Start " << by_kind[EventKind::Start]
      << ", Finish " << by_kind[EventKind::Finish] << ") over "
      << format_time(log.header ? log.header->duration : 0.0) << " s\n";
}

int cmd_simulate(const SimulateArgs& args, bool seeds_given) {
  if (args.preset.empty() == args.config.empty())
    throw UsageError("give exactly one of --preset or --config");

  if (args.show_preset) {
    if (args.preset.empty()) throw UsageError("--show-preset needs --preset");
    print_preset(find_preset(args.preset), std::cout);
    return 0;
  }

  ModelParams params = args.preset.empty() ? load_config(args.config) : find_preset(args.preset).params;
  if (args.nodes > 0) params.node_count = args.nodes;
  params.validate();
  const std::string stem = args.preset.empty() ? fs::path(args.config).stem().string() : args.preset;
  const auto seeds = seeds_from(args.seeds, args.seed, seeds_given);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<EventLog> logs;
  if (seeds.size() == 1) {
    params.rng_seed = seeds.front();
    logs.push_back(run_simulation(params));
  } else {
    logs = run_seed_sweep(params, seeds);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // With the log on stdout the summary moves to stderr.
  const bool to_stdout = args.out == "-";
  std::ostream& report = to_stdout ? std::cerr : std::cout;
  if (seeds.size() == 1) {
    if (to_stdout) {
      write_event_log(logs.front(), std::cout);
    } else {
      auto out = open_output(args.out);
      write_event_log(logs.front(), out);
    }
  } else {
    if (to_stdout) throw UsageError("--seeds needs --out naming a directory");
    ensure_directory(args.out);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      auto out = open_output(fs::path(args.out) / (stem + "_seed" + std::to_string(seeds[i]) + ".log"));
      write_event_log(logs[i], out);
    }
  }
  report << stem << ": " << params.node_count << " nodes\n";
  for (std::size_t i = 0; i < seeds.size(); ++i) print_run_summary(report, seeds[i], logs[i]);
  std::cerr << "wall time " << wall << " s\n";
  return 0;
}

// --------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string trace;
  std::string out;
  std::string head_window;
  std::string tail_window;
};

struct TraceAnalysis {
  std::optional<DistributionSummary> ict;
  std::optional<DistributionSummary> duration;
  PairCountSummary pairs;
  std::optional<DichotomyReport> ict_fits;
  std::optional<DichotomyReport> duration_fits;
};

TraceAnalysis analyze_contacts(const std::vector<ContactRecord>& contacts, std::span<const NodeId> nodes,
                               double span, FitWindow head, FitWindow tail) {
  TraceAnalysis a;
  a.pairs = contacts_per_pair(contacts, nodes, span);
  if (contacts.empty()) return a;
  a.duration = contact_duration_distribution(contacts);
  a.duration_fits = analyze_dichotomy(*a.duration, head, tail);
  const auto gaps = all_gaps(inter_contact_from_contacts(contacts));
  if (!gaps.empty()) {
    a.ict = ccdf(gaps);
    a.ict_fits = analyze_dichotomy(*a.ict, head, tail);
  }
  return a;
}

void write_distribution(const fs::path& path, const std::optional<DistributionSummary>& summary) {
  auto out = open_output(path);
  if (summary) {
    write_ccdf_csv(log_binned(summary->ccdf), out);
  } else {
    write_ccdf_csv({}, out);
  }
}

void write_analysis(const fs::path& dir, const std::string& prefix, const TraceAnalysis& a,
                    std::size_t node_count, std::ostream& fits) {
  write_distribution(dir / (prefix + "ict.csv"), a.ict);
  write_distribution(dir / (prefix + "contact_duration.csv"), a.duration);
  write_distribution(dir / (prefix + "contacts_per_pair.csv"), a.pairs.distribution);

  fits << prefix << "nodes=" << node_count << '\n'
       << prefix << "contacts=" << a.pairs.total_contacts << '\n'
       << prefix << "pairs=" << a.pairs.pairs << '\n'
       << prefix << "contacts_per_pair_day=" << a.pairs.mean_per_pair_day << '\n';
  if (a.pairs.total_contacts == 0) {
    fits << prefix << "status=no contacts\n";
    return;
  }
  if (a.ict_fits) write_fit_report(*a.ict_fits, fits, prefix + "ict.");
  else fits << prefix << "ict.status=no repeated contacts\n";
  if (a.duration_fits) write_fit_report(*a.duration_fits, fits, prefix + "contact_duration.");
}

ContactTrace load_or_explain(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("trace '" + path + "' not found; " + kCsvFormatHint);
  return load_trace(path);
}

int cmd_analyze(const AnalyzeArgs& args) {
  const FitWindow head = args.head_window.empty() ? kDefaultHeadWindow : parse_window(args.head_window);
  const FitWindow tail = args.tail_window.empty() ? kDefaultTailWindow : parse_window(args.tail_window);
  const auto trace = load_or_explain(args.trace);
  ensure_directory(args.out);
  if (trace.nodes.size() < 2) throw ValidationError("trace '" + args.trace + "' has fewer than two nodes");
  const double span = trace.span() > 0.0 ? trace.span() : 1.0;
  const auto analysis = analyze_contacts(trace.contacts, trace.nodes, span, head, tail);

  auto fits = open_output(fs::path(args.out) / "fits.txt");
  write_analysis(args.out, "", analysis, trace.nodes.size(), fits);

  std::cout << trace_label(args.trace, trace) << ": " << trace.nodes.size() << " nodes, "
            << trace.contacts.size() << " contacts";
  if (trace.contacts.empty()) {
    std::cout << "; no contacts\n";
    return 0;
  }
  std::cout << ", " << analysis.pairs.mean_per_pair_day << " contacts/pair/day\n";
  if (analysis.ict_fits) {
    const auto& f = *analysis.ict_fits;
    std::cout << "inter-contact head: power law "
              << (f.head_power ? std::to_string(f.head_power->r2) : "n/a") << " vs exponential "
              << (f.head_exponential ? std::to_string(f.head_exponential->r2) : "n/a") << " (r^2)\n"
              << "inter-contact tail: exponential "
              << (f.tail_exponential ? std::to_string(f.tail_exponential->r2) : "n/a") << " vs power law "
              << (f.tail_power ? std::to_string(f.tail_power->r2) : "n/a") << " (r^2)\n"
              << "dichotomy: " << (f.dichotomy() ? "yes" : "no") << '\n';
  }
  return 0;
}

// --------------------------------------------------------------------------
// forward

struct ForwardArgs {
  std::string trace;
  std::string protocol = "both";
  std::uint64_t seed = 1;
  std::string seeds;
  double window_start = 0.0;
  std::string out = "-";
};

std::vector<Protocol> protocols_from(const std::string& name) {
  if (name == "both") return {Protocol::Epidemic, Protocol::Delegation};
  return {parse_protocol(name)};
}

struct ForwardRow {
  std::string trace;
  Protocol protocol;
  std::string seed;
  ForwardingMetrics metrics;
};

/// Runs every (seed, protocol) pair, seeds in parallel, rows in seed order.
std::vector<ForwardRow> forward_rows(const ContactTrace& trace, const std::string& label,
                                     const std::vector<Protocol>& protocols,
                                     const std::vector<std::uint64_t>& seeds, const ForwardingOptions& opts) {
  std::vector<std::future<std::vector<ForwardRow>>> jobs;
  for (auto seed : seeds) {
    jobs.push_back(std::async(std::launch::async, [&, seed] {
      std::vector<ForwardRow> rows;
      for (auto p : protocols)
        rows.push_back({label, p, std::to_string(seed), evaluate(trace, p, seed, opts).metrics});
      return rows;
    }));
  }
  std::vector<ForwardRow> rows;
  for (auto& j : jobs) {
    auto part = j.get();
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

/// Averages each (trace, protocol) group over seeds; absent values are
/// skipped, and a value absent in every seed stays absent.
std::vector<ForwardRow> mean_rows(const std::vector<ForwardRow>& rows) {
  std::vector<ForwardRow> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const ForwardRow& m) { return m.trace == r.trace && m.protocol == r.protocol; });
    if (it != out.end()) continue;
    ForwardRow mean{r.trace, r.protocol, "mean", {}};
    double cost = 0.0, success = 0.0, delay = 0.0;
    std::size_t n = 0, n_success = 0, n_delay = 0;
    for (const auto& s : rows) {
      if (s.trace != r.trace || s.protocol != r.protocol) continue;
      ++n;
      cost += s.metrics.cost;
      if (s.metrics.success_rate) success += *s.metrics.success_rate, ++n_success;
      if (s.metrics.avg_delay) delay += *s.metrics.avg_delay, ++n_delay;
    }
    mean.metrics.cost = cost / static_cast<double>(n);
    if (n_success) mean.metrics.success_rate = success / static_cast<double>(n_success);
    if (n_delay) mean.metrics.avg_delay = delay / static_cast<double>(n_delay);
    out.push_back(mean);
  }
  return out;
}

void write_rows(std::ostream& out, const std::vector<ForwardRow>& rows) {
  for (const auto& r : rows)
    write_metrics_row(out, csv_safe(r.trace), protocol_name(r.protocol), r.seed, r.metrics);
}

int cmd_forward(const ForwardArgs& args, bool seeds_given, bool window_given) {
  const auto protocols = protocols_from(args.protocol);
  const auto seeds = seeds_from(args.seeds, args.seed, seeds_given);
  const auto trace = load_or_explain(args.trace);
  ForwardingOptions opts;
  if (window_given) opts.window_start = args.window_start;
  // Fail early, before any worker starts.
  select_window(trace, opts.window_length, opts.window_start);

  const auto rows = forward_rows(trace, trace_label(args.trace, trace), protocols, seeds, opts);
  std::ostringstream buf;
  write_metrics_header(buf);
  write_rows(buf, rows);
  if (seeds.size() > 1) write_rows(buf, mean_rows(rows));
  if (args.out == "-") {
    std::cout << buf.str();
  } else {
    auto out = open_output(args.out);
    out << buf.str();
  }
  return 0;
}

// --------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string real;
  std::string preset;
  std::uint64_t seed = 1;
  std::string seeds;
  std::size_t nodes = 0;
  std::string out;
};

int cmd_compare(const CompareArgs& args, bool seeds_given) {
  if (!fs::exists(args.real))
    throw UsageError("real trace '" + args.real + "' not found; " + kCsvFormatHint);
  std::ifstream in(args.real);
  if (!in) throw UsageError("cannot read real trace '" + args.real + "'; " + kCsvFormatHint);
  ContactTrace real;
  try {
    real = import_contact_trace(in);
  } catch (const ParseError& e) {
    throw UsageError("real trace '" + args.real + "', " + e.what() + "; " + kCsvFormatHint);
  }
  const auto& preset = find_preset(args.preset);
  ModelParams params = preset.params;
  if (args.nodes > 0) params.node_count = args.nodes;
  params.validate();
  const auto seeds = seeds_from(args.seeds, args.seed, seeds_given);
  ensure_directory(args.out);
  const fs::path dir(args.out);

  ForwardingOptions opts;
  select_window(real, opts.window_length);

  const auto logs = run_seed_sweep(params, seeds);
  std::vector<ContactTrace> synthetic;
  for (const auto& log : logs) synthetic.push_back(trace_from_event_log(log));

  // Synthetic distributions pool every seed's contacts.
  std::vector<double> ict, durations, pair_counts;
  std::size_t total_contacts = 0;
  for (const auto& t : synthetic) {
    const auto gaps = all_gaps(inter_contact_from_contacts(t.contacts));
    ict.insert(ict.end(), gaps.begin(), gaps.end());
    for (const auto& c : t.contacts) durations.push_back(c.duration());
    const auto pc = contacts_per_pair(t.contacts, t.nodes, t.span());
    pair_counts.insert(pair_counts.end(), pc.distribution.samples.begin(), pc.distribution.samples.end());
    total_contacts += pc.total_contacts;
  }

  auto fits = open_output(dir / "fits.txt");
  const double real_span = real.span() > 0.0 ? real.span() : 1.0;
  const auto real_analysis =
      analyze_contacts(real.contacts, real.nodes, real_span, kDefaultHeadWindow, kDefaultTailWindow);
  write_analysis(dir, "real_", real_analysis, real.nodes.size(), fits);

  TraceAnalysis swim;
  if (!ict.empty()) {
    swim.ict = ccdf(ict);
    swim.ict_fits = analyze_dichotomy(*swim.ict);
  }
  if (!durations.empty()) {
    swim.duration = ccdf(durations);
    swim.duration_fits = analyze_dichotomy(*swim.duration);
  }
  swim.pairs.distribution = ccdf(pair_counts);
  swim.pairs.total_contacts = total_contacts;
  swim.pairs.pairs = pair_counts.size();
  const double n = static_cast<double>(params.node_count);
  swim.pairs.mean_per_pair_day =
      static_cast<double>(total_contacts) /
      (n * (n - 1.0) * (params.sim_duration / 86400.0) * static_cast<double>(seeds.size()));
  write_analysis(dir, "swim_", swim, params.node_count, fits);

  const std::vector<Protocol> both{Protocol::Epidemic, Protocol::Delegation};
  auto rows = forward_rows(real, trace_label(args.real, real), both, seeds, opts);
  std::vector<ForwardRow> synthetic_rows;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (auto p : both)
      synthetic_rows.push_back(
          {"swim-" + preset.name, p, std::to_string(seeds[i]), evaluate(synthetic[i], p, seeds[i], opts).metrics});
  }
  rows.insert(rows.end(), synthetic_rows.begin(), synthetic_rows.end());

  auto fwd = open_output(dir / "forwarding.csv");
  write_metrics_header(fwd);
  write_rows(fwd, rows);
  if (seeds.size() > 1) write_rows(fwd, mean_rows(rows));

  std::cout << "real " << trace_label(args.real, real) << ": " << real.contacts.size() << " contacts, "
            << real_analysis.pairs.mean_per_pair_day << " contacts/pair/day\n"
            << "swim " << preset.name << " (" << seeds.size() << " seed" << (seeds.size() > 1 ? "s" : "")
            << "): " << total_contacts << " contacts, " << swim.pairs.mean_per_pair_day
            << " contacts/pair/day\n"
            << "wrote " << (dir / "forwarding.csv").string() << " and paired distributions\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SWIM mobility simulator, contact analysis and forwarding evaluation"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the mobility model and write an event log");
  auto* sim_preset = simulate->add_option("--preset", sim.preset, "infocom05, cambridge05 or cambridge06");
  auto* sim_config = simulate->add_option("--config", sim.config, "key = value parameter file");
  sim_preset->excludes(sim_config);
  auto* sim_seed = simulate->add_option("--seed", sim.seed, "Random seed");
  auto* sim_seeds = simulate->add_option("--seeds", sim.seeds, "Inclusive seed range a..b, run in parallel");
  sim_seed->excludes(sim_seeds);
  simulate->add_option("--out", sim.out, "Log file, '-' for stdout, or a directory with --seeds");
  simulate->add_option("--nodes", sim.nodes, "Override the node count (cambridge05 text variant: 11)");
  simulate->add_flag("--show-preset", sim.show_preset, "Print the preset parameters and exit");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Contact distributions and tail fits of a trace");
  analyze->add_option("trace", an.trace, "Event log or contact CSV")->required();
  analyze->add_option("--out", an.out, "Output directory")->required();
  analyze->add_option("--head-window", an.head_window, "Head fit window lo:hi in seconds (default 600:43200)");
  analyze->add_option("--tail-window", an.tail_window, "Tail fit window lo:hi in seconds (default 43200:inf)");

  ForwardArgs fw;
  auto* forward = app.add_subcommand("forward", "Replay epidemic or delegation forwarding on a trace");
  forward->add_option("--trace", fw.trace, "Event log or contact CSV")->required();
  forward->add_option("--protocol", fw.protocol, "epidemic, delegation or both")
      ->check(CLI::IsMember({"epidemic", "delegation", "both"}));
  auto* fw_seed = forward->add_option("--seed", fw.seed, "Traffic and quality seed");
  auto* fw_seeds = forward->add_option("--seeds", fw.seeds, "Inclusive seed range a..b");
  fw_seed->excludes(fw_seeds);
  auto* fw_window = forward->add_option("--window-start", fw.window_start,
                                        "Start of the 3 h window (default: busiest window)");
  forward->add_option("--out", fw.out, "Metrics CSV, '-' for stdout");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Side-by-side data of a real trace and a preset");
  compare->add_option("--real", cmp.real, "Contact CSV of the real trace")->required();
  compare->add_option("--preset", cmp.preset, "Preset to simulate")->required();
  auto* cmp_seed = compare->add_option("--seed", cmp.seed, "Seed");
  auto* cmp_seeds = compare->add_option("--seeds", cmp.seeds, "Inclusive seed range a..b");
  cmp_seed->excludes(cmp_seeds);
  compare->add_option("--nodes", cmp.nodes, "Override the preset node count");
  compare->add_option("--out", cmp.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, sim_seeds->count() > 0);
    if (analyze->parsed()) return cmd_analyze(an);
    if (forward->parsed()) return cmd_forward(fw, fw_seeds->count() > 0, fw_window->count() > 0);
    if (compare->parsed()) return cmd_compare(cmp, cmp_seeds->count() > 0);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
