#include "egogate/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace egogate {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return in;
}

ordered_json parse_json_file(const std::string& path) {
  auto in = open_in(path);
  ordered_json j = ordered_json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("malformed JSON in " + path);
  return j;
}

void write_json_file(const std::string& path, const ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_double_field(const std::string& text, const std::string& path, size_t line_no) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  if (used != text.size()) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

void write_trace_csv(const std::string& path, const ProbabilityTrace& trace) {
  auto out = open_out(path);
  out << "start_sec,p_c1\n";
  for (const auto& s : trace.samples) {
    out << format_fixed(s.start_sec, 6) << ',' << format_fixed(s.p, 6) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ProbabilityTrace read_trace_csv(const std::string& path, double fallback_hop_sec) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "start_sec,p_c1") {
    throw std::runtime_error(path + ": expected header 'start_sec,p_c1'");
  }
  ProbabilityTrace trace;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    TraceSample s;
    s.start_sec = parse_double_field(fields[0], path, line_no);
    s.p = parse_double_field(fields[1], path, line_no);
    if (s.p < 0.0 || s.p > 1.0) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": p_c1 outside [0, 1]");
    }
    if (!trace.samples.empty() && s.start_sec <= trace.samples.back().start_sec) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": start_sec must be strictly increasing");
    }
    trace.samples.push_back(s);
  }
  if (trace.samples.empty()) throw std::runtime_error(path + ": trace has no samples");
  trace.hop_sec = trace.samples.size() >= 2
                      ? trace.samples[1].start_sec - trace.samples[0].start_sec
                      : fallback_hop_sec;
  return trace;
}

void write_intervals_json(const std::string& path,
                          const std::vector<ActivationInterval>& intervals) {
  ordered_json arr = ordered_json::array();
  for (const auto& iv : intervals) {
    arr.push_back({{"start_sec", iv.start_sec}, {"stop_sec", iv.stop_sec}});
  }
  write_json_file(path, arr);
}

std::vector<ActivationInterval> read_intervals_json(const std::string& path) {
  const auto j = parse_json_file(path);
  if (!j.is_array()) throw std::runtime_error(path + ": expected a JSON array of intervals");
  std::vector<ActivationInterval> out;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("start_sec") || !item.contains("stop_sec") ||
        !item["start_sec"].is_number() || !item["stop_sec"].is_number()) {
      throw std::runtime_error(path + ": interval entries need numeric start_sec/stop_sec");
    }
    ActivationInterval iv{item["start_sec"].get<double>(), item["stop_sec"].get<double>()};
    if (iv.stop_sec <= iv.start_sec) {
      throw std::runtime_error(path + ": interval with stop_sec <= start_sec");
    }
    if (!out.empty() && iv.start_sec < out.back().start_sec) {
      throw std::runtime_error(path + ": intervals must be sorted by start_sec");
    }
    out.push_back(iv);
  }
  return out;
}

std::vector<LabeledClip> read_labels_jsonl(const std::string& path) {
  auto in = open_in(path);
  std::vector<LabeledClip> clips;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed JSON object");
    }
    if (!j.contains("clip_file") || !j["clip_file"].is_string()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": missing clip_file");
    }
    if (!j.contains("is_hand_object_interaction") ||
        !j["is_hand_object_interaction"].is_number_integer()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": missing is_hand_object_interaction");
    }
    const int label = j["is_hand_object_interaction"].get<int>();
    if (label != 0 && label != 1) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": is_hand_object_interaction must be 0 or 1");
    }
    clips.push_back({j["clip_file"].get<std::string>(), label});
  }
  if (clips.empty()) throw std::runtime_error(path + ": no labeled clips");
  return clips;
}

void write_labels_jsonl(const std::string& path, const std::vector<LabeledClip>& clips) {
  auto out = open_out(path);
  for (const auto& c : clips) {
    ordered_json j{{"clip_file", c.clip_file}, {"is_hand_object_interaction", c.label}};
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_plan_json(const std::string& path, const GatingPlan& plan) {
  ordered_json j;
  j["fps"] = plan.timeline.fps;
  j["duration_sec"] = plan.timeline.duration_sec;
  ordered_json spans = ordered_json::array();
  for (const auto& iv : plan.captured_intervals()) {
    spans.push_back({iv.start_sec, iv.stop_sec});
  }
  j["captured_intervals"] = spans;
  write_json_file(path, j);
}

GatingPlan read_plan_json(const std::string& path) {
  const auto j = parse_json_file(path);
  if (!j.is_object() || !j.contains("fps") || !j.contains("duration_sec") ||
      !j.contains("captured_intervals") || !j["fps"].is_number() ||
      !j["duration_sec"].is_number() || !j["captured_intervals"].is_array()) {
    throw std::runtime_error(path + ": expected {fps, duration_sec, captured_intervals}");
  }
  FrameTimeline timeline{j["fps"].get<double>(), j["duration_sec"].get<double>()};
  if (!(timeline.fps > 0.0) || !(timeline.duration_sec > 0.0)) {
    throw std::runtime_error(path + ": fps and duration_sec must be positive");
  }
  std::vector<ActivationInterval> spans;
  for (const auto& item : j["captured_intervals"]) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
      throw std::runtime_error(path + ": captured_intervals entries must be [start, stop]");
    }
    spans.push_back({item[0].get<double>(), item[1].get<double>()});
  }
  return apply_intervals(timeline, spans);
}

void write_report_json(const std::string& path, const GatingReport& report) {
  ordered_json j;
  j["frames_total"] = report.frames_total;
  j["frames_captured"] = report.frames_captured;
  j["frames_reduced_pct"] = round_to(report.frames_reduced_pct, 2);
  j["capture_fraction"] = report.capture_fraction;
  j["est_bitrate_mbps"] = round_to(report.est_bitrate_mbps, 2);
  j["full_bitrate_mbps"] = round_to(report.full_bitrate_mbps, 2);
  write_json_file(path, j);
}

std::vector<PowerComponent> read_power_config(const std::string& path) {
  const auto j = parse_json_file(path);
  if (!j.is_array() || j.empty()) {
    throw std::runtime_error(path + ": expected a non-empty JSON array of components");
  }
  std::vector<PowerComponent> out;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string() ||
        !item.contains("active_power_w") || !item["active_power_w"].is_number() ||
        !item.contains("duty") || !item["duty"].is_number()) {
      throw std::runtime_error(path + ": components need name, active_power_w, duty");
    }
    PowerComponent c;
    c.name = item["name"].get<std::string>();
    c.active_power_w = item["active_power_w"].get<double>();
    c.duty = item["duty"].get<double>();
    if (item.contains("idle_power_w")) {
      if (!item["idle_power_w"].is_number()) {
        throw std::runtime_error(path + ": idle_power_w must be numeric");
      }
      c.idle_power_w = item["idle_power_w"].get<double>();
    }
    out.push_back(std::move(c));
  }
  return out;
}

void write_power_breakdown(const std::string& path, const PowerBreakdown& breakdown) {
  ordered_json j;
  ordered_json comps = ordered_json::array();
  for (const auto& c : breakdown.components) {
    comps.push_back({{"name", c.name}, {"average_w", round_to(c.average_w, 2)}});
  }
  j["components"] = comps;
  j["total_w"] = round_to(breakdown.total_w, 2);
  write_json_file(path, j);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points) {
  auto out = open_out(path);
  out << "tau,precision,recall,f1\n";
  for (const auto& p : points) {
    out << format_fixed(p.tau, 6) << ',' << format_fixed(p.precision, 6) << ','
        << format_fixed(p.recall, 6) << ',' << format_fixed(p.f1, 6) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<ScoredExample> read_scores_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "p_c1,label") {
    throw std::runtime_error(path + ": expected header 'p_c1,label'");
  }
  std::vector<ScoredExample> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    ScoredExample row;
    row.p = parse_double_field(fields[0], path, line_no);
    const double label = parse_double_field(fields[1], path, line_no);
    if (label != 0.0 && label != 1.0) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": label must be 0 or 1");
    }
    row.label = static_cast<int>(label);
    if (row.p < 0.0 || row.p > 1.0) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": p_c1 outside [0, 1]");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw std::runtime_error(path + ": no score rows");
  return rows;
}

void write_scores_csv(const std::string& path, const std::vector<ScoredExample>& rows) {
  auto out = open_out(path);
  out << "p_c1,label\n";
  for (const auto& r : rows) {
    out << format_fixed(r.p, 6) << ',' << r.label << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace egogate
