#include "hsrnet/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "hsrnet/data/dataset.hpp"
#include "hsrnet/errors.hpp"
#include "hsrnet/geometry/hsr_replay.hpp"
#include "hsrnet/ntk/kernel.hpp"
#include "hsrnet/train/analysis.hpp"
#include "hsrnet/train/bench.hpp"
#include "hsrnet/train/trainer.hpp"

namespace hsrnet::cli {

using nlohmann::json;

namespace {

struct HsrOptions {
  std::size_t leaf_capacity = 16;
  double rebuild_fraction = 0.25;

  geometry::HsrConfig resolve() const {
    geometry::HsrConfig cfg;
    cfg.leaf_capacity = leaf_capacity;
    cfg.rebuild_fraction = rebuild_fraction;
    return cfg;
  }
};

struct GenOptions {
  std::size_t n = 32;
  std::size_t d = 8;
  double delta = 0.5;
  std::uint64_t seed = 1;
  std::string labels = "pm-one";
  std::string out;
  std::string report;
};

struct TrainOptions {
  std::string data;
  bool normalize = false;
  std::string mode = "data-index";
  std::size_t width = 4096;
  std::uint64_t iters = 1000;
  std::string eta = "auto";
  double alpha = 0.2;
  std::optional<double> shift;
  std::uint64_t seed = 1;
  double stop = 1e-6;
  std::uint64_t mc_samples = 100'000;
  bool verify_ledger = false;
  unsigned workers = 1;
  HsrOptions hsr;
  std::string out;
  std::vector<std::string> compare;
  double rtol = 1e-8;
};

struct NtkOptions {
  std::string data;
  bool normalize = false;
  std::vector<double> shifts;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
};

struct SelftestOptions {
  std::size_t n = 2000;
  std::size_t d = 8;
  std::size_t ops = 2000;
  std::size_t traces = 10;
  std::uint64_t seed = 1;
  bool inject_fault = false;
  HsrOptions hsr;
  std::string out;
};

struct BenchOptions {
  std::vector<std::size_t> widths{1024, 4096, 16384};
  std::vector<std::string> modes{"dense", "weight-index", "data-index"};
  std::size_t n = 32;
  std::size_t d = 8;
  double delta = 0.5;
  std::uint64_t iters = 5;
  std::uint64_t seed = 1;
  std::string eta = "auto";
  double alpha = 0.2;
  std::uint64_t mc_samples = 100'000;
  unsigned workers = 1;
  HsrOptions hsr;
  std::string out;
};

// Destination for newline-delimited records: a file when a path is given,
// otherwise the command's standard output.
class RecordSink {
 public:
  RecordSink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw IoError("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  void emit(const json& record) {
    *os_ << record.dump() << '\n';
    if (!*os_) throw IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

json config_record(const std::string& command, json params) {
  return {{"record", "config"}, {"command", command}, {"version", HSRNET_VERSION},
          {"params", std::move(params)}};
}

json hsr_params(const HsrOptions& h) {
  return {{"leaf_capacity", h.leaf_capacity}, {"rebuild_fraction", h.rebuild_fraction}};
}

json stats_json(const geometry::HsrStats& s) {
  return {{"nodes_visited", s.nodes_visited}, {"points_scanned", s.points_scanned},
          {"points_reported", s.points_reported}, {"queries", s.queries},
          {"inserts", s.inserts}, {"deletes", s.deletes},
          {"rebuilds", s.rebuilds}, {"maintenance_ops", s.maintenance_ops}};
}

std::optional<double> parse_eta(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0) || !std::isfinite(v))
    throw InvalidArgument("--eta must be 'auto' or a positive number, got '" + text + "'");
  return v;
}

model::ShiftPolicy shift_policy(double alpha, const std::optional<double>& shift) {
  if (shift) return model::ShiftPolicy::fixed(*shift);
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("--alpha must lie in [0, 1)");
  return model::ShiftPolicy::alpha(alpha);
}

void add_hsr_options(CLI::App* app, HsrOptions& h) {
  app->add_option("--leaf-capacity", h.leaf_capacity, "Points per tree leaf")
      ->capture_default_str();
  app->add_option("--rebuild-fraction", h.rebuild_fraction,
                  "Rebuild when tombstones exceed this fraction of live points")
      ->capture_default_str();
}

void add_config_file(CLI::App* app) {
  app->add_option("--config", "Flat key = value file; command-line flags take precedence");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Turns `--config FILE` into ordinary flags. Each `key = value` line becomes
// `--key value` unless the command line already sets that key. Unknown keys
// are rejected.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  if (args.empty()) return args;
  CLI::App* sub = app.get_subcommand_no_throw(args[0]);
  if (!sub) return args;

  std::vector<std::string> rest;
  std::string path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config") {
      if (k + 1 >= args.size()) throw InvalidArgument("--config needs a file name");
      path = args[++k];
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
    } else {
      rest.push_back(args[k]);
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::vector<std::string> extra;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt || key == "config")
      throw ParseError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "' for " +
                       args[0]);
    if (on_command_line(rest, flag)) continue;
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") {
        extra.push_back(flag);
      } else if (value != "false" && value != "0") {
        throw ParseError(path + ":" + std::to_string(lineno) + ": '" + key +
                         "' expects true or false");
      }
    } else {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  rest.insert(rest.end(), extra.begin(), extra.end());
  return rest;
}

int cmd_gen(const GenOptions& o, std::ostream& out) {
  data::LabelMode labels;
  if (o.labels == "pm-one") {
    labels = data::LabelMode::pm_one;
  } else if (o.labels == "uniform") {
    labels = data::LabelMode::uniform;
  } else {
    throw InvalidArgument("--labels must be pm-one or uniform");
  }
  if (o.n < 2 || o.d < 2) throw InvalidArgument("gen needs n >= 2 and d >= 2");
  if (!(o.delta > 0.0 && o.delta < std::sqrt(2.0)))
    throw InvalidArgument("--delta must lie in (0, sqrt(2))");

  const json params = {{"n", o.n},        {"d", o.d},     {"delta", o.delta},
                       {"seed", o.seed},  {"labels", o.labels}, {"out", o.out}};
  numerics::Rng rng(o.seed, 0);
  const auto dataset = data::gen_separated(rng, o.n, o.d, o.delta, labels);
  data::export_csv(dataset, o.out);

  RecordSink sink(o.report, out);
  sink.emit(config_record("gen", params));
  sink.emit({{"record", "dataset"}, {"path", o.out}, {"n", dataset.size()},
             {"d", dataset.dim()}, {"delta", dataset.separability()},
             {"delta_target", o.delta}});
  return kExitOk;
}

std::vector<json> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace '" + path + "'");
  std::vector<json> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

std::vector<double> err2_series(const std::vector<json>& records, const std::string& path) {
  std::vector<double> err2;
  for (const auto& r : records) {
    if (r.value("record", "") != "iteration") continue;
    const auto t = r.at("t").get<std::uint64_t>();
    if (t != err2.size()) throw ParseError(path + ": iteration records are not consecutive");
    err2.push_back(r.at("err2").get<double>());
  }
  if (err2.empty()) throw ParseError(path + ": no iteration records");
  return err2;
}

int cmd_compare(const TrainOptions& o, std::ostream& out) {
  const auto a = err2_series(read_records(o.compare[0]), o.compare[0]);
  const auto b = err2_series(read_records(o.compare[1]), o.compare[1]);
  json result = {{"record", "compare"}, {"a", o.compare[0]}, {"b", o.compare[1]},
                 {"rtol", o.rtol},      {"length_a", a.size()}, {"length_b", b.size()}};
  double worst = 0.0;
  std::optional<std::size_t> first_bad;
  const std::size_t common = std::min(a.size(), b.size());
  for (std::size_t t = 0; t < common; ++t) {
    const double scale = std::max(std::abs(a[t]), std::abs(b[t]));
    const double rel = scale > 0.0 ? std::abs(a[t] - b[t]) / scale : 0.0;
    worst = std::max(worst, rel);
    if (rel > o.rtol && !first_bad) first_bad = t;
  }
  const bool ok = a.size() == b.size() && !first_bad;
  result["max_relative_difference"] = worst;
  result["first_mismatch_t"] = first_bad ? json(*first_bad) : json(nullptr);
  result["match"] = ok;
  out << result.dump() << '\n';
  return ok ? kExitOk : kExitMismatch;
}

json iteration_json(const train::IterationRecord& r) {
  return {{"record", "iteration"},
          {"t", r.t},
          {"err2", r.err2},
          {"kmin", r.k_min},
          {"kmedian", r.k_median},
          {"kmax", r.k_max},
          {"ksum", r.k_sum},
          {"flips", r.flips},
          {"changed", r.changed},
          {"updated", r.updated},
          {"ops", r.ops.inner_products()},
          {"ops_phase",
           {{"query", r.ops.query},
            {"forward", r.ops.forward},
            {"backward", r.ops.backward},
            {"update", r.ops.update},
            {"maintain", r.ops.maintain}}},
          {"hsr", stats_json(r.hsr)},
          {"displacement", r.displacement},
          {"millis", r.millis}};
}

int cmd_train(const TrainOptions& o, std::ostream& out) {
  if (!o.compare.empty()) return cmd_compare(o, out);
  if (o.data.empty()) throw InvalidArgument("train needs --data (or --compare A B)");
  if (o.iters == 0) throw InvalidArgument("--iters must be >= 1");

  train::TrainConfig cfg;
  cfg.mode = train::parse_mode(o.mode);
  cfg.width = o.width;
  cfg.max_iters = o.iters;
  cfg.eta = parse_eta(o.eta);
  cfg.shift = shift_policy(o.alpha, o.shift);
  cfg.seed = o.seed;
  cfg.stop_threshold = o.stop;
  cfg.hsr = o.hsr.resolve();
  cfg.mc_samples = o.mc_samples;
  cfg.verify_ledger = o.verify_ledger;
  cfg.workers = o.workers;
  cfg.validate();

  const auto dataset = data::ingest_csv(o.data, o.normalize);
  const json params = {{"data", o.data},
                       {"normalize", o.normalize},
                       {"mode", o.mode},
                       {"width", o.width},
                       {"iters", o.iters},
                       {"eta", o.eta},
                       {"alpha", o.alpha},
                       {"shift", o.shift ? json(*o.shift) : json(nullptr)},
                       {"seed", o.seed},
                       {"stop", o.stop},
                       {"mc_samples", o.mc_samples},
                       {"verify_ledger", o.verify_ledger},
                       {"workers", o.workers},
                       {"hsr", hsr_params(o.hsr)}};
  RecordSink sink(o.out, out);
  sink.emit(config_record("train", params));

  const auto result = train::train(cfg, dataset);
  const auto& trace = result.trace;
  for (const auto& r : trace.records) sink.emit(iteration_json(r));

  json summary = {{"record", "summary"},
                  {"mode", train::to_string(trace.mode)},
                  {"n", trace.n},
                  {"width", trace.width},
                  {"shift", trace.shift},
                  {"eta", trace.eta},
                  {"eta_auto", trace.eta_auto},
                  {"converged", trace.converged},
                  {"iterations", trace.records.size() - 1},
                  {"err2_initial", trace.records.front().err2},
                  {"err2_final", trace.records.back().err2},
                  {"init_ops", trace.init_ops}};
  summary["lambda_hat"] = trace.eta_auto ? json(trace.lambda_hat) : json(nullptr);
  summary["lambda_stderr"] = trace.eta_auto ? json(trace.lambda_stderr) : json(nullptr);
  const auto err2 = trace.err2();
  if (err2.size() >= 10 &&
      std::all_of(err2.begin(), err2.end(), [](double e) { return e > 0.0; })) {
    const auto fit = train::convergence_fit(err2);
    summary["rho"] = fit.rho;
    summary["r2"] = fit.r2;
  } else {
    summary["rho"] = nullptr;
    summary["r2"] = nullptr;
  }
  const auto audit = train::sparsity_audit(trace, trace.width, trace.shift);
  summary["sparsity"] = {{"ok", audit.ok},         {"max_k", audit.max_k},
                         {"at_t", audit.at_t},     {"at_sample", audit.at_sample},
                         {"bound", audit.bound}};
  if (trace.eta_auto) {
    const double bound = train::displacement_bound(trace.lambda_hat, trace.width, trace.n,
                                                   std::sqrt(trace.records.front().err2));
    double worst = 0.0;
    for (const auto& r : trace.records) worst = std::max(worst, r.displacement);
    summary["displacement_bound"] = bound;
    summary["displacement_max"] = worst;
  }
  sink.emit(summary);
  return kExitOk;
}

int cmd_ntk(const NtkOptions& o, std::ostream& out, std::ostream& err) {
  if (o.shifts.empty()) throw InvalidArgument("ntk needs at least one --b value");
  if (o.mc_samples == 0) throw InvalidArgument("--mc-samples must be >= 1");
  const auto dataset = data::ingest_csv(o.data, o.normalize);
  if (dataset.size() < 2) throw InvalidArgument("ntk needs at least two data points");

  const json params = {{"data", o.data},     {"normalize", o.normalize},
                       {"b", o.shifts},      {"mc_samples", o.mc_samples},
                       {"seed", o.seed},     {"workers", o.workers}};
  RecordSink sink(o.out, out);
  sink.emit(config_record("ntk", params));

  bool all_pass = true;
  std::vector<double> unreliable;
  for (std::size_t k = 0; k < o.shifts.size(); ++k) {
    const double b = o.shifts[k];
    const auto report =
        ntk::h_continuous_mc(numerics::Rng(o.seed, k), dataset, b, o.mc_samples, o.workers);
    const auto gap = ntk::check_spectral_gap(report, dataset.separability(), dataset.size(), b);
    sink.emit({{"record", "kernel"},
               {"b", b},
               {"n", dataset.size()},
               {"delta", dataset.separability()},
               {"samples", report.samples},
               {"lambda_hat", report.lambda_min},
               {"stderr", report.lambda_stderr},
               {"lower_bound", gap.lower_bound},
               {"upper_bound", gap.upper_bound},
               {"reliable", gap.reliable},
               {"pass", gap.ok()}});
    all_pass = all_pass && gap.ok();
    if (!gap.reliable) unreliable.push_back(b);
  }
  if (!unreliable.empty()) {
    std::ostringstream msg;
    msg << "Monte-Carlo error exceeds the lower-bound margin for b =";
    for (double b : unreliable) msg << ' ' << b;
    msg << "; increase --mc-samples";
    throw UnreliableLambda(msg.str());
  }
  if (!all_pass) err << "spectral gap outside the predicted interval\n";
  return all_pass ? kExitOk : kExitMismatch;
}

int cmd_hsr_selftest(const SelftestOptions& o, std::ostream& out) {
  if (o.d == 0) throw InvalidArgument("--d must be >= 1");
  const json params = {{"n", o.n},           {"d", o.d},       {"ops", o.ops},
                       {"traces", o.traces}, {"seed", o.seed}, {"inject_fault", o.inject_fault},
                       {"hsr", hsr_params(o.hsr)}};
  RecordSink sink(o.out, out);
  sink.emit(config_record("hsr-selftest", params));

  bool ok = true;
  std::uint64_t queries = 0;
  for (std::size_t k = 0; k < o.traces && ok; ++k) {
    geometry::ReplayConfig rc;
    rc.initial = o.n;
    rc.dim = o.d;
    rc.ops = o.ops;
    rc.seed = o.seed + k;
    rc.tree = o.hsr.resolve();
    rc.tree.inject_fault = o.inject_fault;
    const auto rep = geometry::replay_against_naive(rc);
    queries += rep.queries;
    if (!rep.ok) {
      ok = false;
      sink.emit({{"record", "mismatch"},
                 {"trace", k},
                 {"seed", rc.seed},
                 {"op", *rep.mismatch_op},
                 {"detail", rep.detail}});
    }
  }
  sink.emit({{"record", "selftest"}, {"pass", ok}, {"queries", queries}});
  return ok ? kExitOk : kExitMismatch;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  train::BenchConfig cfg;
  cfg.widths = o.widths;
  cfg.modes.clear();
  for (const auto& m : o.modes) cfg.modes.push_back(train::parse_mode(m));
  cfg.n = o.n;
  cfg.d = o.d;
  cfg.delta = o.delta;
  cfg.iterations = o.iters;
  cfg.seed = o.seed;
  cfg.eta = parse_eta(o.eta);
  cfg.shift = shift_policy(o.alpha, std::nullopt);
  cfg.hsr = o.hsr.resolve();
  cfg.mc_samples = o.mc_samples;
  cfg.workers = o.workers;

  const json params = {{"widths", o.widths}, {"modes", o.modes},   {"n", o.n},
                       {"d", o.d},           {"delta", o.delta},   {"iters", o.iters},
                       {"seed", o.seed},     {"eta", o.eta},       {"alpha", o.alpha},
                       {"mc_samples", o.mc_samples},               {"workers", o.workers},
                       {"hsr", hsr_params(o.hsr)}};
  RecordSink sink(o.out, out);
  sink.emit(config_record("bench", params));
  const auto rows = train::run_bench(cfg);
  for (const auto& r : rows)
    sink.emit({{"record", "bench"},
               {"width", r.width},
               {"mode", train::to_string(r.mode)},
               {"shift", r.shift},
               {"ops_per_iter", r.median_ops},
               {"millis_per_iter", r.median_millis},
               {"dense_equivalent", r.dense_equivalent},
               {"ops_fraction", r.ops_fraction}});
  if (o.widths.size() >= 2) {
    for (auto mode : cfg.modes) {
      std::vector<double> x, y;
      for (const auto& r : rows)
        if (r.mode == mode && r.median_ops > 0.0) {
          x.push_back(static_cast<double>(r.width));
          y.push_back(r.median_ops);
        }
      if (x.size() >= 2)
        sink.emit({{"record", "fit"},
                   {"mode", train::to_string(mode)},
                   {"exponent", train::loglog_slope(x, y)}});
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse training of shifted-ReLU networks with half-space reporting indexes",
               "hsrnet"};
  app.set_version_flag("--version", std::string(HSRNET_VERSION));
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate a separated unit-norm dataset as CSV");
  add_config_file(g);
  g->add_option("--n", gen.n, "Number of points")->capture_default_str();
  g->add_option("--d", gen.d, "Dimension")->capture_default_str();
  g->add_option("--delta", gen.delta, "Target separability")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--labels", gen.labels, "pm-one or uniform")->capture_default_str();
  g->add_option("--out", gen.out, "CSV output path")->required();
  g->add_option("--report", gen.report, "Write the report records here instead of stdout");

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train a network and emit a per-iteration trace");
  add_config_file(t);
  t->add_option("--data", tr.data, "Dataset CSV");
  t->add_flag("--normalize", tr.normalize, "Scale rows to unit norm on load");
  t->add_option("--mode", tr.mode, "dense, weight-index or data-index")->capture_default_str();
  t->add_option("--width", tr.width, "Number of hidden neurons m")->capture_default_str();
  t->add_option("--iters", tr.iters, "Maximum iterations T")->capture_default_str();
  t->add_option("--eta", tr.eta, "Learning rate or 'auto'")->capture_default_str();
  auto* alpha = t->add_option("--alpha", tr.alpha, "Shift rule b = sqrt(0.5 (1 - alpha) ln m)")
                    ->capture_default_str();
  t->add_option("--shift", tr.shift, "Fixed shift b")->excludes(alpha);
  t->add_option("--seed", tr.seed)->capture_default_str();
  t->add_option("--stop", tr.stop, "Stop when err2 / err2(0) falls to this")
      ->capture_default_str();
  t->add_option("--mc-samples", tr.mc_samples, "Samples for the automatic learning rate")
      ->capture_default_str();
  t->add_flag("--verify-ledger", tr.verify_ledger, "Check fire sets against a rebuild each step");
  t->add_option("--workers", tr.workers)->capture_default_str();
  add_hsr_options(t, tr.hsr);
  t->add_option("--out", tr.out, "Trace output path (default stdout)");
  t->add_option("--compare", tr.compare, "Compare the err2 series of two traces")
      ->expected(2);
  t->add_option("--rtol", tr.rtol, "Relative tolerance for --compare")->capture_default_str();

  NtkOptions nk;
  auto* k = app.add_subcommand("ntk", "Estimate the kernel spectral gap for a list of shifts");
  add_config_file(k);
  k->add_option("--data", nk.data, "Dataset CSV")->required();
  k->add_flag("--normalize", nk.normalize);
  k->add_option("--b", nk.shifts, "Shift values (comma separated)")->delimiter(',')->required();
  k->add_option("--mc-samples", nk.mc_samples)->capture_default_str();
  k->add_option("--seed", nk.seed)->capture_default_str();
  k->add_option("--workers", nk.workers)->capture_default_str();
  k->add_option("--out", nk.out, "Report output path (default stdout)");

  SelftestOptions st;
  auto* s = app.add_subcommand("hsr-selftest", "Replay random traces on tree and naive backends");
  add_config_file(s);
  s->add_option("--n", st.n, "Initial points per trace")->capture_default_str();
  s->add_option("--d", st.d)->capture_default_str();
  s->add_option("--ops", st.ops, "Operations per trace")->capture_default_str();
  s->add_option("--traces", st.traces)->capture_default_str();
  s->add_option("--seed", st.seed)->capture_default_str();
  s->add_flag("--inject-fault", st.inject_fault, "Break the pruning test on purpose");
  add_hsr_options(s, st.hsr);
  s->add_option("--out", st.out);

  BenchOptions bn;
  auto* b = app.add_subcommand("bench", "Operation counts per iteration across widths and modes");
  add_config_file(b);
  b->add_option("--widths", bn.widths)->delimiter(',')->capture_default_str();
  b->add_option("--modes", bn.modes)->delimiter(',')->capture_default_str();
  b->add_option("--n", bn.n)->capture_default_str();
  b->add_option("--d", bn.d)->capture_default_str();
  b->add_option("--delta", bn.delta)->capture_default_str();
  b->add_option("--iters", bn.iters)->capture_default_str();
  b->add_option("--seed", bn.seed)->capture_default_str();
  b->add_option("--eta", bn.eta)->capture_default_str();
  b->add_option("--alpha", bn.alpha)->capture_default_str();
  b->add_option("--mc-samples", bn.mc_samples)->capture_default_str();
  b->add_option("--workers", bn.workers)->capture_default_str();
  add_hsr_options(b, bn.hsr);
  b->add_option("--out", bn.out);

  try {
    const auto expanded = expand_config(args, app);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, out);
    if (t->parsed()) return cmd_train(tr, out);
    if (k->parsed()) return cmd_ntk(nk, out, err);
    if (s->parsed()) return cmd_hsr_selftest(st, out);
    if (b->parsed()) return cmd_bench(bn, out);
  } catch (const PackingInfeasible& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const Divergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const InternalConsistency& e) {
    err << "error: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace hsrnet::cli
