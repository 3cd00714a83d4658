#include "fracctl/report_io.hpp"

#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <system_error>

#include "fracctl/errors.hpp"
#include "fracctl/version.hpp"

namespace fracctl {

std::string format_double(double value) {
  char buffer[40];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) throw io_error("format_double: conversion failed");
  return std::string(buffer, ptr);
}

void JsonWriter::before_value() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (!has_items_.empty()) {
    if (has_items_.back()) out_ += ',';
    has_items_.back() = true;
  }
}

JsonWriter& JsonWriter::begin_object() {
  before_value();
  out_ += '{';
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  has_items_.pop_back();
  out_ += '}';
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  before_value();
  out_ += '[';
  has_items_.push_back(false);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  has_items_.pop_back();
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view name) {
  if (has_items_.back()) out_ += ',';
  has_items_.back() = true;
  out_ += '"';
  out_ += name;
  out_ += "\":";
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  before_value();
  if (!std::isfinite(v)) {
    out_ += "null";
  } else {
    out_ += format_double(v);
  }
  return *this;
}

JsonWriter& JsonWriter::value(int v) { return value(static_cast<std::int64_t>(v)); }

JsonWriter& JsonWriter::value(std::int64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  before_value();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  before_value();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
  before_value();
  out_ += '"';
  for (char c : v) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\t': out_ += "\\t"; break;
      case '\r': out_ += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out_ += buf;
        } else {
          out_ += c;
        }
    }
  }
  out_ += '"';
  return *this;
}

JsonWriter& JsonWriter::null() {
  before_value();
  out_ += "null";
  return *this;
}

JsonWriter& JsonWriter::raw(std::string_view json_text) {
  before_value();
  out_ += json_text;
  return *this;
}

void write_vector(JsonWriter& w, const Eigen::VectorXd& v) {
  w.begin_array();
  for (Eigen::Index i = 0; i < v.size(); ++i) w.value(v(i));
  w.end_array();
}

void write_matrix(JsonWriter& w, const Eigen::MatrixXd& m) {
  w.begin_array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    w.begin_array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.value(m(i, j));
    w.end_array();
  }
  w.end_array();
}

void write_text_file_atomic(const std::filesystem::path& path,
                            std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw io_error("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw io_error("cannot move " + tmp.string() + " into place: " +
                   ec.message());
  }
}

std::vector<std::string> component_names(Eigen::Index n) {
  if (n == 1) return {"x"};
  if (n == 2) return {"x", "y"};
  if (n == 3) return {"x", "y", "z"};
  std::vector<std::string> names;
  names.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    names.push_back("x" + std::to_string(i + 1));
  }
  return names;
}

namespace {

void append_trajectory_rows(std::string& out, const Trajectory& traj,
                            const std::string& label) {
  for (int k = 0; k <= traj.grid.N; ++k) {
    out += format_double(traj.grid.node(k));
    out += ',';
    out += label;
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) {
      out += ',';
      out += format_double(traj.states[k](i));
    }
    out += '\n';
  }
}

}  // namespace

std::string trajectories_csv(const std::vector<Trajectory>& members,
                             const Trajectory& average) {
  std::string out = "t,sample_id";
  for (const auto& name : component_names(average.states.front().size())) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t i = 0; i < members.size(); ++i) {
    append_trajectory_rows(out, members[i], std::to_string(i));
  }
  append_trajectory_rows(out, average, "average");
  return out;
}

std::string param_samples_csv(const std::vector<double>& values) {
  std::string out = "sample_id,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(values[i]);
    out += '\n';
  }
  return out;
}

std::string control_csv(const ControlSignal& u) {
  const Eigen::Index m = u.values.empty() ? 0 : u.values.front().size();
  std::string out = "t_mid";
  if (m == 1) {
    out += ",u";
  } else {
    for (Eigen::Index i = 0; i < m; ++i) out += ",u" + std::to_string(i + 1);
  }
  out += '\n';
  for (int j = 0; j < u.grid.N; ++j) {
    out += format_double(u.grid.midpoint(j));
    for (Eigen::Index i = 0; i < m; ++i) {
      out += ',';
      out += format_double(u.values[j](i));
    }
    out += '\n';
  }
  return out;
}

std::string current_utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

namespace {

void write_kalman_section(JsonWriter& w, const KalmanReport& report,
                          const std::optional<double>& det) {
  w.begin_object();
  w.key("K");
  write_matrix(w, report.K);
  w.key("singular_values");
  write_vector(w, report.singular_values);
  w.key("rank").value(report.rank);
  w.key("rank_target").value(report.rank_target);
  w.key("tolerance").value(report.tolerance);
  w.key("controllable_in_average").value(report.controllable_in_average);
  if (det.has_value()) {
    w.key("det").value(*det);
  }
  w.end_object();
}

void write_gramian_section(JsonWriter& w, const GramianReport& report) {
  w.begin_object();
  w.key("G");
  write_matrix(w, report.G);
  w.key("eigenvalues");
  write_vector(w, report.eigenvalues);
  w.key("lambda_min").value(report.lambda_min);
  w.key("lambda_max").value(report.lambda_max);
  w.key("invertible").value(report.invertible);
  w.key("condition_number").value(report.condition_number);  // null when inf
  w.key("ill_conditioned").value(report.ill_conditioned);
  w.key("tolerance").value(report.tolerance);
  w.key("quadrature_N").value(report.quadrature_N);
  w.end_object();
}

void write_control_section(JsonWriter& w, const ControlResult& result) {
  w.begin_object();
  w.key("y_hat_T");
  write_vector(w, result.y_hat_T);
  w.key("iterations").value(result.iterations);
  w.key("residual_history");
  w.begin_array();
  for (double r : result.residual_history) w.value(r);
  w.end_array();
  w.key("converged").value(result.converged);
  w.key("achieved_average");
  write_vector(w, result.achieved_average);
  w.key("terminal_error").value(result.terminal_error);
  w.key("energy").value(result.energy);
  w.key("ill_conditioned_warning").value(result.ill_conditioned_warning);
  w.end_object();
}

}  // namespace

std::string render_report(const ReportEnvelope& envelope) {
  JsonWriter w;
  w.begin_object();
  w.key("tool_version").value(std::string_view(kToolVersion));
  w.key("generated_at").value(std::string_view(envelope.generated_at));
  if (envelope.config_json.has_value()) {
    w.key("config_echo").raw(*envelope.config_json);
  }
  if (envelope.kalman.has_value()) {
    w.key("kalman");
    write_kalman_section(w, *envelope.kalman, envelope.kalman_det);
  }
  if (envelope.gramian.has_value()) {
    w.key("gramian");
    write_gramian_section(w, *envelope.gramian);
  }
  if (envelope.control.has_value()) {
    w.key("control");
    write_control_section(w, *envelope.control);
  }
  w.end_object();
  std::string out = w.str();
  out += '\n';
  return out;
}

}  // namespace fracctl
