#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pechaos/runio.hpp"

namespace pechaos {

const char* const kCodeVersion = "pechaos 0.1.0";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> columns,
                     std::uint64_t manifest_hash)
    : path_(std::move(path)), columns_(std::move(columns)), hash_(manifest_hash) {}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_.size())
    throw std::invalid_argument("CsvWriter::row: column count mismatch");
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ",";
    line += format_double(values[i]);
  }
  rows_.push_back(std::move(line));
}

void CsvWriter::row_text(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument("CsvWriter::row_text: column count mismatch");
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ",";
    line += cells[i];
  }
  rows_.push_back(std::move(line));
}

void CsvWriter::flush() {
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << "\n";
    for (const auto& r : rows_) out << r << "\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash_);
    out << "# manifest_hash=" << buf << "\n";
  }
  if (std::rename(tmp.c_str(), path_.c_str()) != 0)
    throw std::runtime_error("cannot move " + tmp + " into place");
}

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<std::pair<double, double>>& series) {
  if (series.empty()) return;
  double xmin = series[0].first, xmax = xmin, ymin = series[0].second, ymax = ymin;
  for (const auto& [x, y] : series) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double W = 720, H = 420, m = 48;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
      << "</text>\n";
  out << "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='";
  for (const auto& [x, y] : series) {
    const double px = m + (x - xmin) / (xmax - xmin) * (W - 2 * m);
    const double py = H - m - (y - ymin) / (ymax - ymin) * (H - 2 * m);
    out << px << "," << py << " ";
  }
  out << "'/>\n";
  out << "<text x='" << m << "' y='" << H - 8 << "' font-size='11'>" << format_double(xmin)
      << "</text>\n";
  out << "<text x='" << W - m << "' y='" << H - 8 << "' text-anchor='end' font-size='11'>"
      << format_double(xmax) << "</text>\n";
  out << "</svg>\n";
}

}  // namespace pechaos
