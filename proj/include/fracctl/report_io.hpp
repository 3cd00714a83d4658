#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracctl/gramian.hpp"
#include "fracctl/hum_control.hpp"
#include "fracctl/kalman.hpp"

namespace fracctl {

// Locale-independent rendering with up to 17 significant digits, enough to
// round-trip any double exactly.
std::string format_double(double value);

// Streaming JSON writer. Key order is whatever the caller emits, so output
// bytes are stable run to run.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view name);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null();
  // Splices pre-rendered JSON text in value position.
  JsonWriter& raw(std::string_view json_text);
  const std::string& str() const { return out_; }

 private:
  void before_value();
  std::string out_;
  std::vector<bool> has_items_;  // per open scope
  bool pending_key_ = false;
};

void write_vector(JsonWriter& w, const Eigen::VectorXd& v);
void write_matrix(JsonWriter& w, const Eigen::MatrixXd& m);  // rows of arrays

// Writes via a temporary in the same directory and renames into place, so a
// failed run leaves no partial file.
void write_text_file_atomic(const std::filesystem::path& path,
                            std::string_view content);

// Component labels used in trajectory CSV headers: x | x,y | x,y,z below
// four states, x1..xn otherwise.
std::vector<std::string> component_names(Eigen::Index n);

// Long-format trajectory table: one row per (member, node) with columns
// t,sample_id,<components>, followed by the averaged rows labeled "average".
std::string trajectories_csv(const std::vector<Trajectory>& members,
                             const Trajectory& average);

std::string param_samples_csv(const std::vector<double>& values);

// Columns t_mid,u (single input) or t_mid,u1..um.
std::string control_csv(const ControlSignal& u);

struct ReportEnvelope {
  std::string generated_at;  // RFC 3339 UTC; excluded from determinism diffs
  std::optional<std::string> config_json;  // pre-rendered object
  std::optional<KalmanReport> kalman;
  std::optional<double> kalman_det;  // only when K is square
  std::optional<GramianReport> gramian;
  std::optional<ControlResult> control;
};

std::string current_utc_timestamp();

// Versioned report with every floating value at 17 significant digits.
// Infinite condition numbers serialize as null.
std::string render_report(const ReportEnvelope& envelope);

}  // namespace fracctl
