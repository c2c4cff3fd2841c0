// SPDX-License-Identifier: Apache-2.0

#include "itcm_cli/cli.hpp"

#include "itcm/bench.hpp"
#include "itcm/classifier.hpp"
#include "itcm/cross_validation.hpp"
#include "itcm/error.hpp"
#include "itcm/flow_csv.hpp"
#include "itcm/labelling.hpp"
#include "itcm/pcap.hpp"
#include "itcm/pipeline.hpp"
#include "itcm/synth.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

namespace itcm::cli {

namespace {

/// Bad flag values discovered after parsing.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  double quantum_s = 30.0;
  double timeout_s = 60.0;
  std::string timeout_mode = "idle";
  std::string classifier;
  std::size_t k = 10;
  bool raw_distance = false;
  std::size_t rounds = 10;
  std::size_t min_leaf = 2;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  std::string portmap;
  bool paced = false;
  double speedup = 1.0;
  std::size_t runs = 30;
  std::string report_csv;
  std::string model;
  std::string input;
  std::string output;
  std::string flows_csv;
  std::size_t sessions = 100;
  std::size_t min_packets = 0;
  double span_s = 300.0;
  bool clean = false;
};

auto seconds_to_duration(double s) -> Duration {
  return Duration{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

auto reap_policy(const Options& o) -> ReapPolicy {
  auto p = ReapPolicy{};
  p.timeout = seconds_to_duration(o.timeout_s);
  p.mode = o.timeout_mode == "duration" ? TimeoutMode::duration
                                        : TimeoutMode::idle;
  return p;
}

auto learner(const Options& o, Algorithm algorithm) -> LearnerSpec {
  auto spec = LearnerSpec{};
  spec.algorithm = algorithm;
  spec.k = o.k;
  spec.knn_scaling = !o.raw_distance;
  spec.rounds = o.rounds;
  spec.min_leaf = o.min_leaf;
  return spec;
}

auto port_map(const Options& o) -> PortMap {
  auto map = PortMap::defaults();
  if (!o.portmap.empty())
    map.merge_file(o.portmap);
  return map;
}

void write_text(const std::string& path, const std::string& text) {
  auto out = std::ofstream{path, std::ios::binary};
  if (!out)
    throw IoError{"cannot create " + path};
  out << text;
  if (!out.flush())
    throw IoError{"cannot write " + path};
}

auto sibling(const std::string& path, std::string_view suffix) -> std::string {
  auto p = std::filesystem::path{path};
  auto stem = p.stem().string();
  return (p.parent_path() / (stem + std::string{suffix})).string();
}

auto read_dataset(const std::string& path) -> Dataset {
  auto rows = read_flow_csv(std::filesystem::path{path});
  auto ds = to_dataset(rows);
  if (ds.empty())
    throw DataError{0, path + " has no labelled rows"};
  return ds;
}

auto cmd_extract(const Options& o, std::ostream& out, std::ostream& err)
  -> int {
  auto reader = pcap::open_trace(o.input);
  auto counters = pcap::DecodeCounters{};
  auto packets = pcap::read_all_packets(reader, counters);
  auto table = make_reassembler(ReassemblyPolicy::move_to_front);
  auto flows = reassemble_all(*table, packets,
                              seconds_to_duration(o.quantum_s), reap_policy(o));
  auto map = port_map(o);
  auto rows = std::vector<FlowCsvRow>{};
  rows.reserve(flows.size());
  auto unlabelled = std::size_t{0};
  for (const auto& flow : flows) {
    auto label = label_flow(flow, map);
    unlabelled += label ? 0 : 1;
    rows.push_back(make_row(rows.size(), flow, label));
  }
  write_flow_csv(std::filesystem::path{o.output}, rows);
  err << fmt::format("flows {}, labelled {}, unlabelled {}, dropped packets "
                     "{}, tcp packets {}, skipped records {}\n",
                     rows.size(), rows.size() - unlabelled, unlabelled,
                     table->dropped(), packets.size(), counters.skipped());
  out << fmt::format("wrote {} flows to {}\n", rows.size(), o.output);
  return exit_ok;
}

auto cmd_train(const Options& o, std::ostream& out, std::ostream&) -> int {
  auto algorithm = parse_algorithm(o.classifier.empty() ? "c45" : o.classifier);
  auto ds = read_dataset(o.input);
  auto spec = learner(o, *algorithm);
  if (spec.algorithm == Algorithm::knn && spec.k > ds.size())
    spec.k = ds.size();
  auto model = train(ds, spec);
  save_model(*model, o.model);
  auto correct = std::size_t{0};
  for (std::size_t i = 0; i < ds.size(); ++i)
    correct += model->predict(ds.row(i)) == ds.label_name(i) ? 1 : 0;
  out << fmt::format("trained {} on {} instances, {} classes\n",
                     display_name(spec.algorithm), ds.size(), ds.class_count());
  out << fmt::format("training accuracy {:.4f}\n",
                     static_cast<double>(correct)
                       / static_cast<double>(ds.size()));
  return exit_ok;
}

auto format_confusion(const CvResult& r) -> std::string {
  auto width = std::size_t{8};
  for (const auto& c : r.classes)
    width = std::max(width, c.size() + 1);
  auto out = fmt::format("{:<{}}", "actual", width);
  for (const auto& c : r.classes)
    out += fmt::format("{:>{}}", c, width);
  out += '\n';
  for (std::size_t a = 0; a < r.classes.size(); ++a) {
    out += fmt::format("{:<{}}", r.classes[a], width);
    for (auto n : r.confusion[a])
      out += fmt::format("{:>{}}", n, width);
    out += '\n';
  }
  return out;
}

auto cmd_eval(const Options& o, std::ostream& out, std::ostream&) -> int {
  auto ds = read_dataset(o.input);
  if (o.folds > ds.size())
    throw UsageError{fmt::format("--folds {} exceeds the {} labelled rows",
                                 o.folds, ds.size())};
  auto algorithms = std::vector<Algorithm>{};
  if (o.classifier.empty())
    algorithms.assign(std::begin(all_algorithms), std::end(all_algorithms));
  else
    algorithms.push_back(*parse_algorithm(o.classifier));

  auto results = std::vector<std::pair<Algorithm, CvResult>>{};
  for (auto a : algorithms)
    results.emplace_back(a, cross_validate(ds, learner(o, a), o.folds, o.seed));

  auto report = std::string{"Global Accuracy per Trace\n"};
  report += fmt::format("instances {}, classes {}, folds {}, seed {}\n",
                        ds.size(), ds.class_count(), o.folds, o.seed);
  report += fmt::format("{:<28} {:>9} {:>10}\n", "Classifier", "Correct",
                        "Accuracy");
  for (const auto& [a, r] : results)
    report += fmt::format("{:<28} {:>9} {:>9.2f}%\n", display_name(a),
                          r.correct, 100.0 * r.accuracy());
  for (const auto& [a, r] : results) {
    report += fmt::format("\nConfusion matrix: {} (rows actual, columns "
                          "predicted)\n",
                          display_name(a));
    report += format_confusion(r);
  }
  out << report;

  if (!o.report_csv.empty()) {
    auto csv = std::string{"classifier,correct,total,accuracy\n"};
    for (const auto& [a, r] : results)
      csv += fmt::format("{},{},{},{}\n", to_string(a), r.correct, r.total,
                         r.accuracy());
    write_text(o.report_csv, csv);
  }
  return exit_ok;
}

auto cmd_monitor(const Options& o, std::ostream& out, std::ostream& err)
  -> int {
  auto model = std::unique_ptr<Classifier>{};
  auto labeller = FlowLabeller{};
  if (o.model.empty()) {
    labeller = port_labeller(port_map(o));
  } else {
    model = load_model(std::filesystem::path{o.model});
    labeller = classifier_labeller(*model);
  }
  auto config = MonitorConfig{};
  config.quantum = seconds_to_duration(o.quantum_s);
  config.reap = reap_policy(o);
  config.paced = o.paced;
  config.pace_speedup = o.speedup;

  auto reader = pcap::open_trace(o.input);
  auto result = run_monitor(reader, config, labeller);

  out << format_interval_table(result.intervals) << '\n'
      << format_summary(result.summary);
  auto per_label = std::map<std::string, std::size_t>{};
  for (const auto& d : result.flows)
    ++per_label[d.label.value_or("(unlabelled)")];
  out << fmt::format("\nFlows per label ({})\n",
                     model ? "classifier" : "port map");
  for (const auto& [label, n] : per_label)
    out << fmt::format("{:<20} {:>10}\n", label, n);
  err << fmt::format("tcp packets {}, dropped packets {}, skipped records {}\n",
                     result.accepted_packets + result.dropped_packets,
                     result.dropped_packets, result.decode.skipped());

  if (!o.flows_csv.empty()) {
    auto rows = std::vector<FlowCsvRow>{};
    for (const auto& d : result.flows)
      rows.push_back(make_row(rows.size(), d.flow, d.label));
    write_flow_csv(std::filesystem::path{o.flows_csv}, rows);
  }
  if (!o.report_csv.empty()) {
    write_text(o.report_csv, interval_csv(result.intervals));
    write_text(sibling(o.report_csv, "_summary.csv"),
               summary_csv(result.summary));
  }
  return exit_ok;
}

auto cmd_bench(const Options& o, std::ostream& out, std::ostream&) -> int {
  auto reader = pcap::open_trace(o.input);
  auto counters = pcap::DecodeCounters{};
  auto packets = pcap::read_all_packets(reader, counters);
  auto result = bench_reassembly(packets, o.runs,
                                 seconds_to_duration(o.quantum_s),
                                 reap_policy(o));
  out << format_bench(result);
  if (!o.report_csv.empty())
    write_text(o.report_csv, bench_csv(result));
  return exit_ok;
}

auto cmd_synth(const Options& o, std::ostream& out, std::ostream&) -> int {
  auto config = o.clean ? SynthConfig::clean(o.sessions, o.seed)
                        : SynthConfig{};
  config.sessions = o.sessions;
  config.seed = o.seed;
  config.span_seconds = o.span_s;
  config.min_packets = o.min_packets;
  auto sessions = generate_sessions(config);
  auto packets = merge_sessions(sessions);
  pcap::write_trace(std::filesystem::path{o.output}, packets);
  out << fmt::format("wrote {} packets from {} sessions to {}\n",
                     packets.size(), sessions.size(), o.output);
  return exit_ok;
}

void add_reassembly_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--quantum", o.quantum_s, "capture quantum in seconds")
    ->check(CLI::PositiveNumber);
  cmd.add_option("--timeout", o.timeout_s, "flow timeout in seconds")
    ->check(CLI::PositiveNumber);
  cmd.add_option("--timeout-mode", o.timeout_mode,
                 "idle: since the last packet; duration: since the first")
    ->check(CLI::IsMember({"idle", "duration"}));
}

void add_learner_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--k", o.k, "KNN neighbour count")->check(CLI::PositiveNumber);
  cmd.add_flag("--raw-distance", o.raw_distance,
               "KNN on unscaled features");
  cmd.add_option("--rounds", o.rounds, "AdaBoost rounds")
    ->check(CLI::PositiveNumber);
  cmd.add_option("--min-leaf", o.min_leaf, "C4.5 minimum leaf size")
    ->check(CLI::PositiveNumber);
}

auto classifier_check() -> CLI::Validator {
  return CLI::IsMember({"knn", "nb", "knb", "c45", "adaboost"});
}

} // namespace

auto run(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err) -> int {
  auto o = Options{};
  auto app = CLI::App{"Flow-based TCP traffic classifier monitor", "itcm"};
  app.require_subcommand(1);

  auto* extract = app.add_subcommand(
    "extract", "reassemble a pcap trace into a port-labelled flow CSV");
  extract->add_option("trace", o.input, "pcap trace")->required();
  extract->add_option("-o,--output", o.output, "flow CSV to write")
    ->required();
  extract->add_option("--portmap", o.portmap, "extra port,label entries");
  add_reassembly_flags(*extract, o);

  auto* train_cmd = app.add_subcommand(
    "train", "train a classifier on the labelled rows of a flow CSV");
  train_cmd->add_option("csv", o.input, "flow CSV")->required();
  train_cmd->add_option("--model", o.model, "model file to write")
    ->required();
  train_cmd->add_option("--classifier", o.classifier, "knn|nb|knb|c45|adaboost")
    ->check(classifier_check());
  add_learner_flags(*train_cmd, o);

  auto* eval = app.add_subcommand(
    "eval", "stratified k-fold cross-validation of the classifiers");
  eval->add_option("csv", o.input, "flow CSV")->required();
  eval->add_option("--classifier", o.classifier,
                   "evaluate only this classifier")
    ->check(classifier_check());
  eval->add_option("--folds", o.folds, "number of folds")
    ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  eval->add_option("--seed", o.seed, "fold shuffle seed");
  eval->add_option("--report-csv", o.report_csv, "accuracy table as CSV");
  add_learner_flags(*eval, o);

  auto* monitor = app.add_subcommand(
    "monitor", "run the pipelined monitor over a trace");
  monitor->add_option("trace", o.input, "pcap trace")->required();
  monitor->add_option("--model", o.model,
                      "trained model; without it flows get port labels");
  monitor->add_option("--portmap", o.portmap, "extra port,label entries");
  monitor->add_flag("--paced", o.paced, "replay capture gaps in real time");
  monitor->add_option("--speedup", o.speedup, "divide paced gaps by this")
    ->check(CLI::PositiveNumber);
  monitor->add_option("--flows-csv", o.flows_csv, "delivered flows as CSV");
  monitor->add_option("--report-csv", o.report_csv,
                      "per-interval metrics CSV; the summary goes next to it");
  add_reassembly_flags(*monitor, o);

  auto* bench = app.add_subcommand(
    "bench", "time both reassembly policies over a trace");
  bench->add_option("trace", o.input, "pcap trace")->required();
  bench->add_option("--runs", o.runs, "runs per policy")
    ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  bench->add_option("--report-csv", o.report_csv, "timings as CSV");
  add_reassembly_flags(*bench, o);

  auto* synth = app.add_subcommand("synth", "write a synthetic pcap trace");
  synth->add_option("output", o.output, "pcap file to write")->required();
  synth->add_option("--sessions", o.sessions, "number of sessions");
  synth->add_option("--min-packets", o.min_packets,
                    "add sessions until this many packets exist");
  synth->add_option("--seed", o.seed, "generator seed");
  synth->add_option("--span", o.span_s, "seconds over which sessions start")
    ->check(CLI::PositiveNumber);
  synth->add_flag("--clean", o.clean,
                  "only complete handshake, data, FIN sessions");

  try {
    auto reversed = std::vector<std::string>{args.rbegin(), args.rend()};
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "itcm: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (*extract)
      return cmd_extract(o, out, err);
    if (*train_cmd)
      return cmd_train(o, out, err);
    if (*eval)
      return cmd_eval(o, out, err);
    if (*monitor)
      return cmd_monitor(o, out, err);
    if (*bench)
      return cmd_bench(o, out, err);
    return cmd_synth(o, out, err);
  } catch (const UsageError& e) {
    err << "itcm: " << e.what() << '\n';
    return exit_usage;
  } catch (const ConfigError& e) {
    err << "itcm: " << e.what() << '\n';
    return exit_usage;
  } catch (const IoError& e) {
    err << "itcm: " << e.what() << '\n';
    return exit_usage;
  } catch (const pcap::TraceError& e) {
    err << "itcm: " << e.what() << '\n';
    return e.kind() == pcap::TraceError::Kind::io ? exit_usage
                                                  : exit_processing;
  } catch (const std::exception& e) {
    err << "itcm: " << e.what() << '\n';
    return exit_processing;
  }
}

} // namespace itcm::cli
