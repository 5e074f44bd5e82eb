#ifndef PROMO_REPORT_HPP
#define PROMO_REPORT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace promo {

inline constexpr const char* kToolVersion = "0.1.0";

// temp + rename so readers never observe a partial file
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// FNV-1a digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::string& path);
std::string string_digest(const std::string& content);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_hashes;
  std::string tool_version = kToolVersion;
  std::string timestamp;  // ISO 8601 UTC

  std::string to_json() const;
};

RunManifest make_manifest(const std::string& command,
                          const std::string& canonical_config, std::uint64_t seed,
                          const std::vector<std::string>& input_paths);

// Minimal inline-SVG line/bar chart page, fully self-contained.
struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
std::string render_chart_html(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<ChartSeries>& series);

}  // namespace promo

#endif
