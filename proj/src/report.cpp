#include "promo/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "promo/seeds.hpp"

namespace promo {

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + tmp + " -> " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string string_digest(const std::string& content) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(content)));
  return std::string(buf);
}

std::string file_digest(const std::string& path) { return string_digest(read_file(path)); }

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["input_hashes"] = input_hashes;
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  return j.dump(2) + "\n";
}

RunManifest make_manifest(const std::string& command, const std::string& canonical_config,
                          std::uint64_t seed, const std::vector<std::string>& input_paths) {
  RunManifest m;
  m.command = command;
  m.config_hash = string_digest(canonical_config);
  m.seed = seed;
  for (const std::string& p : input_paths) m.input_hashes[p] = file_digest(p);
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  m.timestamp = buf;
  return m;
}

std::string render_chart_html(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<ChartSeries>& series) {
  const double W = 640, H = 420, L = 70, B = 50, T = 40, R = 20;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const ChartSeries& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

  static const char* colors[] = {"#1a6fb5", "#c4501e", "#2c8a4b", "#7a4dbb"};
  std::ostringstream svg;
  svg.precision(6);
  svg << "<!DOCTYPE html><html><head><meta charset=\"utf-8\"><title>" << title
      << "</title></head><body><h2>" << title << "</h2>\n<svg width=\"" << W
      << "\" height=\"" << H << "\" xmlns=\"http://www.w3.org/2000/svg\">\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
      << H - B << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << (T + H - B) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = xmin + (xmax - xmin) * tick / 4.0;
    const double fy = ymin + (ymax - ymin) * tick / 4.0;
    svg << "<text x=\"" << sx(fx) << "\" y=\"" << H - B + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fx << "</text>\n";
    svg << "<text x=\"" << L - 8 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << fy << "</text>\n";
  }
  int ci = 0;
  for (const ChartSeries& s : series) {
    const char* color = colors[ci % 4];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      svg << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
    svg << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      svg << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i])
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << W - R - 6 << "\" y=\"" << T + 16 + 16 * ci
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << s.label
        << "</text>\n";
    ++ci;
  }
  svg << "</svg></body></html>\n";
  return svg.str();
}

}  // namespace promo
