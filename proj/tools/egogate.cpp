// Command-line driver for the audio-gated capture pipeline.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "egogate/audio.hpp"
#include "egogate/gating.hpp"
#include "egogate/io.hpp"
#include "egogate/metrics.hpp"
#include "egogate/model.hpp"
#include "egogate/power.hpp"
#include "egogate/train.hpp"
#include "egogate/trigger.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// EGOGATE_LOG: unset/0/off = quiet, 1/info = progress, 2/debug = detail.
int log_level() {
  static const int level = [] {
    const char* env = std::getenv("EGOGATE_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v.empty() || v == "0" || v == "off" || v == "quiet") return 0;
    if (v == "2" || v == "debug" || v == "trace") return 2;
    return 1;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[egogate] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[egogate] " << msg << "\n";
}

// All-or-nothing outputs: anything registered here is deleted if the command
// throws before finishing.
struct OutputSet {
  std::vector<std::string> paths;

  void add(const std::string& path) {
    if (!path.empty()) paths.push_back(path);
  }
  void remove_all() const {
    for (const auto& p : paths) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }
};

struct TriggerFlags {
  std::string kind = "fixed";
  double tau = 0.4;
  double t_fixed = 1.0;
  double tau_on = 0.8;
  double tau_off = 0.7;

  egogate::TriggerConfig to_config() const {
    if (kind == "hysteresis") {
      return egogate::HysteresisTrigger{tau_on, tau_off};
    }
    return egogate::FixedOffTrigger{tau, t_fixed};
  }
};

void add_trigger_flags(CLI::App* cmd, TriggerFlags& flags) {
  cmd->add_option("--trigger", flags.kind, "Trigger strategy: fixed or hysteresis")
      ->check(CLI::IsMember({"fixed", "hysteresis"}))
      ->capture_default_str();
  cmd->add_option("--tau", flags.tau, "Activation threshold for the fixed trigger")
      ->capture_default_str();
  cmd->add_option("--t-fixed", flags.t_fixed, "Hold duration in seconds for the fixed trigger")
      ->capture_default_str();
  cmd->add_option("--tau-on", flags.tau_on, "Hysteresis arming threshold")->capture_default_str();
  cmd->add_option("--tau-off", flags.tau_off, "Hysteresis release threshold")
      ->capture_default_str();
}

std::string resolve_clip_path(const std::string& audio_dir, const std::string& clip_file) {
  fs::path p(clip_file);
  if (p.is_absolute()) return p.string();
  return (fs::path(audio_dir) / p).string();
}

struct TrainArgs {
  std::string labels_path;
  std::string audio_dir;
  std::string strategy = "class-weights";
  std::string out_model;
  std::string log_out;
  egogate::WindowSpec window;
  egogate::TrainConfig cfg;
  int k_neighbors = 5;
};

int cmd_train(const TrainArgs& args) {
  OutputSet outputs;
  const std::string log_path =
      args.log_out.empty() ? args.out_model + ".log.json" : args.log_out;
  outputs.add(args.out_model);
  outputs.add(log_path);
  try {
    const std::string audio_dir = args.audio_dir.empty()
                                      ? fs::path(args.labels_path).parent_path().string()
                                      : args.audio_dir;
    const auto clips = egogate::read_labels_jsonl(args.labels_path);
    log_info("loaded " + std::to_string(clips.size()) + " labeled clips");

    std::vector<egogate::LabeledExample> dataset;
    for (const auto& clip : clips) {
      const std::string path = resolve_clip_path(audio_dir, clip.clip_file);
      if (!fs::exists(path)) {
        throw std::runtime_error("audio file not found: " + path);
      }
      auto audio = egogate::load_wav(path);
      audio = egogate::to_mono(audio);
      audio = egogate::resample(audio, egogate::kFeatureSampleRate);
      audio = egogate::normalize_amplitude(audio);
      const auto windows = egogate::slide_windows(audio, args.window);
      for (const auto& w : windows) {
        auto feat = egogate::extract_features(w);
        dataset.push_back({std::move(feat.values), clip.label});
      }
      log_debug(clip.clip_file + ": " + std::to_string(windows.size()) + " windows");
    }
    log_info("built " + std::to_string(dataset.size()) + " training examples");

    egogate::TrainConfig cfg = args.cfg;
    egogate::ResampleStrategy strategy = egogate::ClassWeights{};
    if (args.strategy == "class-weights") {
      std::vector<int> labels;
      labels.reserve(dataset.size());
      for (const auto& ex : dataset) labels.push_back(ex.label);
      cfg.class_weights = egogate::compute_class_weights(labels);
    } else if (args.strategy == "smote") {
      strategy = egogate::SmoteOversample{args.k_neighbors, cfg.seed};
    } else {
      strategy = egogate::RandomUndersample{cfg.seed};
    }

    const auto result = egogate::train(dataset, cfg, strategy);
    for (size_t e = 0; e < result.epoch_loss.size(); ++e) {
      log_debug("epoch " + std::to_string(e) + " loss " + std::to_string(result.epoch_loss[e]));
    }
    egogate::save_model(args.out_model, result.head);

    ordered_json log;
    log["strategy"] = args.strategy;
    log["seed"] = cfg.seed;
    log["examples"] = dataset.size();
    log["original_counts"] = {result.original_counts[0], result.original_counts[1]};
    log["trained_counts"] = {result.trained_counts[0], result.trained_counts[1]};
    log["class_weights"] = {result.class_weights[0], result.class_weights[1]};
    log["epoch_loss"] = result.epoch_loss;
    log["final_loss"] = result.final_loss;
    {
      std::ofstream out(log_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open for writing: " + log_path);
      out << log.dump(2) << '\n';
    }
    std::printf("final_loss=%.12f\n", result.final_loss);
    log_info("wrote " + args.out_model + " and " + log_path);
    return 0;
  } catch (const std::exception& e) {
    outputs.remove_all();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

struct TriggerArgs {
  std::string model_path;
  std::string audio_path;
  std::string trace_path;
  std::string out_json;
  std::string trace_out;
  egogate::WindowSpec window;
  TriggerFlags trigger;
  double fallback_hop = 2.0;
};

int cmd_trigger(const TriggerArgs& args) {
  OutputSet outputs;
  outputs.add(args.out_json);
  outputs.add(args.trace_out);
  try {
    const bool have_model = !args.model_path.empty() || !args.audio_path.empty();
    const bool have_trace = !args.trace_path.empty();
    if (have_model == have_trace) {
      throw std::runtime_error("provide either --model with --audio, or --trace");
    }
    if (have_model && (args.model_path.empty() || args.audio_path.empty())) {
      throw std::runtime_error("--model and --audio must be given together");
    }

    egogate::ProbabilityTrace trace;
    if (have_trace) {
      trace = egogate::read_trace_csv(args.trace_path, args.fallback_hop);
    } else {
      const auto head = egogate::load_model(args.model_path);
      auto audio = egogate::load_wav(args.audio_path);
      audio = egogate::to_mono(audio);
      audio = egogate::resample(audio, egogate::kFeatureSampleRate);
      audio = egogate::normalize_amplitude(audio);
      trace = egogate::classify_trace(head, audio, args.window);
      log_info("classified " + std::to_string(trace.samples.size()) + " windows");
    }

    const auto intervals = egogate::run_trigger(trace, args.trigger.to_config());
    egogate::write_intervals_json(args.out_json, intervals);
    if (!args.trace_out.empty()) {
      egogate::write_trace_csv(args.trace_out, trace);
    }
    std::printf("total_active_sec=%.6f\n", egogate::total_active_sec(intervals));
    return 0;
  } catch (const std::exception& e) {
    outputs.remove_all();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

struct GateArgs {
  std::string intervals_path;
  bool decimate = false;
  double period = 5.0;
  double fps = 30.0;
  double duration = 0.0;
  double full_bitrate = 0.0;
  std::string out_json;
  std::string plan_out;
  std::string blackout_out;
};

int cmd_gate(const GateArgs& args) {
  OutputSet outputs;
  outputs.add(args.out_json);
  outputs.add(args.plan_out);
  outputs.add(args.blackout_out);
  try {
    if (args.decimate == !args.intervals_path.empty()) {
      throw std::runtime_error("provide exactly one of --intervals or --decimate");
    }
    const egogate::FrameTimeline timeline{args.fps, args.duration};
    const auto plan = args.decimate
                          ? egogate::decimate(timeline, args.period)
                          : egogate::apply_intervals(
                                timeline, egogate::read_intervals_json(args.intervals_path));
    const auto rep = egogate::report(plan, args.full_bitrate);
    egogate::write_report_json(args.out_json, rep);
    if (!args.plan_out.empty()) egogate::write_plan_json(args.plan_out, plan);
    if (!args.blackout_out.empty()) {
      std::ofstream out(args.blackout_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open for writing: " + args.blackout_out);
      out << egogate::emit_blackout_expr(plan) << '\n';
    }
    std::printf("frames_reduced_pct=%.2f est_bitrate_mbps=%.2f\n", rep.frames_reduced_pct,
                rep.est_bitrate_mbps);
    return 0;
  } catch (const std::exception& e) {
    outputs.remove_all();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

struct SweepArgs {
  std::string scores_path;
  std::string taus = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::string out_csv;
};

int cmd_sweep(const SweepArgs& args) {
  OutputSet outputs;
  outputs.add(args.out_csv);
  try {
    const auto rows = egogate::read_scores_csv(args.scores_path);
    std::vector<double> scores;
    std::vector<int> truths;
    for (const auto& r : rows) {
      scores.push_back(r.p);
      truths.push_back(r.label);
    }
    std::vector<double> taus;
    std::stringstream ss(args.taus);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) taus.push_back(std::stod(tok));
    }
    if (taus.empty()) throw std::runtime_error("no tau values given");
    const auto points = egogate::threshold_sweep(scores, truths, taus);
    egogate::write_sweep_csv(args.out_csv, points);
    std::printf("rows=%zu\n", points.size());
    return 0;
  } catch (const std::exception& e) {
    outputs.remove_all();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

struct PowerArgs {
  std::string config_path;
  std::string out_json;
};

int cmd_power(const PowerArgs& args) {
  OutputSet outputs;
  outputs.add(args.out_json);
  try {
    const auto components = egogate::read_power_config(args.config_path);
    const auto breakdown = egogate::duty_cycle_power(components);
    egogate::write_power_breakdown(args.out_json, breakdown);
    std::printf("total_w=%.2f\n", breakdown.total_w);
    return 0;
  } catch (const std::exception& e) {
    outputs.remove_all();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

struct ReportArgs {
  std::vector<std::string> plan_paths;
  double full_bitrate = 0.0;
  std::string out_json;
};

int cmd_report(const ReportArgs& args) {
  OutputSet outputs;
  outputs.add(args.out_json);
  try {
    ordered_json videos = ordered_json::array();
    long long frames_total = 0;
    long long frames_captured = 0;
    for (const auto& path : args.plan_paths) {
      const auto plan = egogate::read_plan_json(path);
      const auto rep = egogate::report(plan, args.full_bitrate);
      frames_total += rep.frames_total;
      frames_captured += rep.frames_captured;
      ordered_json v;
      v["plan"] = fs::path(path).filename().string();
      v["frames_total"] = rep.frames_total;
      v["frames_captured"] = rep.frames_captured;
      v["frames_reduced_pct"] = egogate::round_to(rep.frames_reduced_pct, 2);
      v["capture_fraction"] = rep.capture_fraction;
      v["est_bitrate_mbps"] = egogate::round_to(rep.est_bitrate_mbps, 2);
      videos.push_back(v);
    }
    if (frames_total == 0) throw std::runtime_error("no frames across input plans");
    const double fraction =
        static_cast<double>(frames_captured) / static_cast<double>(frames_total);
    ordered_json agg;
    agg["frames_total"] = frames_total;
    agg["frames_captured"] = frames_captured;
    agg["frames_reduced_pct"] = egogate::round_to(100.0 * (1.0 - fraction), 2);
    agg["capture_fraction"] = fraction;
    agg["est_bitrate_mbps"] = egogate::round_to(args.full_bitrate * fraction, 2);
    agg["full_bitrate_mbps"] = egogate::round_to(args.full_bitrate, 2);
    ordered_json doc;
    doc["videos"] = videos;
    doc["aggregate"] = agg;
    std::ofstream out(args.out_json, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + args.out_json);
    out << doc.dump(2) << '\n';
    std::printf("videos=%zu frames_reduced_pct=%.2f\n", args.plan_paths.size(),
                100.0 * (1.0 - fraction));
    return 0;
  } catch (const std::exception& e) {
    outputs.remove_all();
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audio-gated capture pipeline: train the interaction classifier, run capture "
               "triggers over probability traces, and report gating statistics"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train the interaction classifier on labeled clips");
  train->add_option("--labels", train_args.labels_path, "JSONL label manifest")->required();
  train->add_option("--audio-dir", train_args.audio_dir,
                    "Directory clip paths are relative to (default: manifest directory)");
  train->add_option("--strategy", train_args.strategy, "Class-imbalance strategy")
      ->check(CLI::IsMember({"class-weights", "smote", "undersample"}))
      ->capture_default_str();
  train->add_option("--out", train_args.out_model, "Output model file")->required();
  train->add_option("--log-out", train_args.log_out,
                    "Training log path (default: <out>.log.json)");
  train->add_option("--window-dur", train_args.window.window_sec, "Window duration in seconds")
      ->capture_default_str();
  train->add_option("--hop", train_args.window.hop_sec, "Window hop in seconds")
      ->capture_default_str();
  train->add_option("--seed", train_args.cfg.seed, "RNG seed")->capture_default_str();
  train->add_option("--epochs", train_args.cfg.epochs, "Training epochs")->capture_default_str();
  train->add_option("--batch-size", train_args.cfg.batch_size, "Minibatch size")
      ->capture_default_str();
  train->add_option("--learning-rate", train_args.cfg.learning_rate, "Step size")
      ->capture_default_str();
  train->add_option("--weight-decay", train_args.cfg.weight_decay, "Decoupled decay rate")
      ->capture_default_str();
  train->add_option("--k-neighbors", train_args.k_neighbors,
                    "Neighbor count for synthetic oversampling")
      ->capture_default_str();

  TriggerArgs trigger_args;
  auto* trig = app.add_subcommand("trigger", "Derive activation intervals from a model+audio "
                                             "pair or a precomputed probability trace");
  trig->add_option("--model", trigger_args.model_path, "Trained model file");
  trig->add_option("--audio", trigger_args.audio_path, "WAV recording to classify");
  trig->add_option("--trace", trigger_args.trace_path, "Precomputed probability trace CSV");
  trig->add_option("--out", trigger_args.out_json, "Output interval JSON")->required();
  trig->add_option("--trace-out", trigger_args.trace_out, "Also write the trace CSV here");
  trig->add_option("--window-dur", trigger_args.window.window_sec, "Window duration in seconds")
      ->capture_default_str();
  trig->add_option("--hop", trigger_args.window.hop_sec, "Window hop in seconds")
      ->capture_default_str();
  add_trigger_flags(trig, trigger_args.trigger);

  GateArgs gate_args;
  auto* gate = app.add_subcommand("gate", "Apply activation intervals to a video frame timeline");
  gate->add_option("--intervals", gate_args.intervals_path, "Activation interval JSON");
  gate->add_flag("--decimate", gate_args.decimate, "Periodic capture baseline instead of intervals");
  gate->add_option("--period", gate_args.period, "Decimation period in seconds")
      ->capture_default_str();
  gate->add_option("--fps", gate_args.fps, "Video frame rate")->capture_default_str();
  gate->add_option("--duration", gate_args.duration, "Video duration in seconds")->required();
  gate->add_option("--full-bitrate", gate_args.full_bitrate, "Ungated bitrate in Mbps")
      ->required();
  gate->add_option("--out", gate_args.out_json, "Output report JSON")->required();
  gate->add_option("--plan-out", gate_args.plan_out, "Also write the gating plan JSON here");
  gate->add_option("--blackout-out", gate_args.blackout_out,
                   "Also write a blackout filter expression here");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Threshold sweep over scored examples");
  sweep->add_option("--scores", sweep_args.scores_path, "CSV of p_c1,label rows")->required();
  sweep->add_option("--taus", sweep_args.taus, "Comma-separated threshold list")
      ->capture_default_str();
  sweep->add_option("--out", sweep_args.out_csv, "Output sweep CSV")->required();

  PowerArgs power_args;
  auto* power = app.add_subcommand("power", "Duty-cycle power model over a component config");
  power->add_option("--config", power_args.config_path, "Component config JSON")->required();
  power->add_option("--out", power_args.out_json, "Output breakdown JSON")->required();

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Aggregate gating plans into one report");
  report->add_option("plans", report_args.plan_paths, "Gating plan JSON files")->required();
  report->add_option("--full-bitrate", report_args.full_bitrate, "Ungated bitrate in Mbps")
      ->required();
  report->add_option("--out", report_args.out_json, "Output report JSON")->required();

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) return cmd_train(train_args);
  if (trig->parsed()) return cmd_trigger(trigger_args);
  if (gate->parsed()) return cmd_gate(gate_args);
  if (sweep->parsed()) return cmd_sweep(sweep_args);
  if (power->parsed()) return cmd_power(power_args);
  if (report->parsed()) return cmd_report(report_args);
  return 1;
}
