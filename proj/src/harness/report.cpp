#include "brl/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "brl/core/binary_io.hpp"
#include "brl/core/errors.hpp"
#include "brl/core/format.hpp"

namespace brl {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& s, double& out) {
  if (s == "nan") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (s.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::map<std::string, std::string> parse_provenance(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    out[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return out;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = strip_cr(line);
    if (t.header.empty()) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        for (auto& [k, v] : parse_provenance(line.substr(1))) t.provenance[k] = v;
        continue;
      }
      t.header = split_row(line);
      if (t.header.size() < 2) {
        throw ParseError(source + ":" + std::to_string(number) + ": header needs at least two columns");
      }
      continue;
    }
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != t.header.size()) {
      throw ParseError(source + ":" + std::to_string(number) + ": expected " +
                       std::to_string(t.header.size()) + " fields, found " +
                       std::to_string(cells.size()));
    }
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) {
        throw ParseError(source + ":" + std::to_string(number) + ": column '" + t.header[c] +
                         "' is not numeric: '" + cells[c] + "'");
      }
    }
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(number);
  }
  if (t.header.empty()) throw ParseError(source + ":" + std::to_string(number) + ": missing header row");
  if (t.rows.empty()) throw ParseError(source + ":" + std::to_string(number) + ": no data rows");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  const auto bytes = bin::read_file(path);
  return parse_csv(std::string(bytes.begin(), bytes.end()), path.string());
}

Band aggregate(const std::vector<CsvTable>& runs, const std::string& metric, bool numeric_x) {
  struct Acc {
    double sum = 0.0, lo = 0.0, hi = 0.0;
    std::size_t n = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  std::map<std::string, double> xnum;
  for (const CsvTable& t : runs) {
    const auto it = std::find(t.header.begin(), t.header.end(), metric);
    if (it == t.header.end()) continue;
    const auto col = static_cast<std::size_t>(it - t.header.begin());
    for (const auto& row : t.rows) {
      const std::string& key = row[0];
      if (!acc.count(key)) {
        order.push_back(key);
        acc[key] = Acc{};
        double xv = 0.0;
        if (numeric_x) {
          parse_number(key, xv);
          xnum[key] = xv;
        }
      }
      double v = 0.0;
      parse_number(row[col], v);
      if (!std::isfinite(v)) continue;
      Acc& a = acc[key];
      if (a.n == 0) {
        a.lo = a.hi = v;
      } else {
        a.lo = std::min(a.lo, v);
        a.hi = std::max(a.hi, v);
      }
      a.sum += v;
      a.n += 1;
    }
  }
  if (numeric_x) {
    std::stable_sort(order.begin(), order.end(),
                     [&](const std::string& a, const std::string& b) { return xnum[a] < xnum[b]; });
  }
  Band band;
  for (const std::string& key : order) {
    const Acc& a = acc[key];
    if (a.n == 0) continue;
    band.x.push_back(key);
    band.xs.push_back(numeric_x ? xnum[key] : static_cast<double>(band.x.size() - 1));
    band.mean.push_back(a.sum / static_cast<double>(a.n));
    band.min.push_back(a.lo);
    band.max.push_back(a.hi);
  }
  return band;
}

namespace {

constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Band& band, const std::string& metric, const std::string& x_label,
                       bool numeric_x, bool with_band) {
  if (band.mean.empty()) throw UsageError("render_svg: nothing to draw for " + metric);
  double y_lo = *std::min_element(band.min.begin(), band.min.end());
  double y_hi = *std::max_element(band.max.begin(), band.max.end());
  if (!numeric_x) {
    y_lo = std::min(y_lo, 0.0);
    y_hi = std::max(y_hi, 0.0);
  }
  if (y_hi == y_lo) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const std::size_t n = band.mean.size();
  const double x_lo = band.xs.front(), x_hi = band.xs.back();
  auto sx = [&](std::size_t i) {
    if (!numeric_x) return kLeft + pw * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    if (x_hi == x_lo) return kLeft + pw / 2;
    return kLeft + pw * (band.xs[i] - x_lo) / (x_hi - x_lo);
  };
  auto sy = [&](double v) { return kTop + ph * (y_hi - v) / (y_hi - y_lo); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
    << "<title>" << xml_escape(metric) << "</title>\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << xml_escape(metric) << "</text>\n"
    << "<line class=\"axis\" x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw
    << "\" y2=\"" << kTop + ph << "\" stroke=\"black\"/>\n"
    << "<line class=\"axis\" x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
    << "\" y2=\"" << kTop + ph << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + 4
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(y_hi)
    << "</text>\n"
    << "<text x=\"" << kLeft - 6 << "\" y=\"" << kTop + ph
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(y_lo)
    << "</text>\n"
    << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(x_label)
    << "</text>\n";

  if (numeric_x) {
    o << "<text x=\"" << kLeft << "\" y=\"" << kTop + ph + 16
      << "\" text-anchor=\"start\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(band.x.front())
      << "</text>\n"
      << "<text x=\"" << kLeft + pw << "\" y=\"" << kTop + ph + 16
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(band.x.back())
      << "</text>\n";
    if (with_band) {
      o << "<polygon class=\"band\" fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < n; ++i) o << (i ? " " : "") << fmt(sx(i)) << ',' << fmt(sy(band.max[i]));
      for (std::size_t i = n; i-- > 0;) o << ' ' << fmt(sx(i)) << ',' << fmt(sy(band.min[i]));
      o << "\"/>\n";
    }
    o << "<polyline class=\"mean\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < n; ++i) o << (i ? " " : "") << fmt(sx(i)) << ',' << fmt(sy(band.mean[i]));
    o << "\"/>\n";
  } else {
    const double bw = 0.6 * pw / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double top = sy(std::max(band.mean[i], 0.0)), bottom = sy(std::min(band.mean[i], 0.0));
      o << "<rect class=\"bar\" x=\"" << fmt(sx(i) - bw / 2) << "\" y=\"" << fmt(top) << "\" width=\""
        << fmt(bw) << "\" height=\"" << fmt(bottom - top) << "\" fill=\"#1f77b4\"/>\n";
      if (with_band) {
        o << "<line class=\"range\" x1=\"" << fmt(sx(i)) << "\" y1=\"" << fmt(sy(band.max[i]))
          << "\" x2=\"" << fmt(sx(i)) << "\" y2=\"" << fmt(sy(band.min[i]))
          << "\" stroke=\"black\"/>\n";
      }
      o << "<text x=\"" << fmt(sx(i)) << "\" y=\"" << kTop + ph + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << xml_escape(band.x[i]) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<std::filesystem::path> emit_report(const std::vector<std::filesystem::path>& inputs,
                                               const std::filesystem::path& out_dir) {
  if (inputs.empty()) throw UsageError("report needs at least one CSV");
  std::vector<CsvTable> runs;
  for (const auto& p : inputs) runs.push_back(read_csv(p));

  for (const char* key : {"env", "reward"}) {
    std::set<std::string> values;
    for (const CsvTable& t : runs) {
      if (auto it = t.provenance.find(key); it != t.provenance.end()) values.insert(it->second);
    }
    if (values.size() > 1) {
      throw ConfigError(std::string("refusing to aggregate CSVs with different ") + key + " values");
    }
  }
  const std::vector<std::string>& header = runs.front().header;
  for (const CsvTable& t : runs) {
    if (t.header != header) throw ConfigError(t.source + ": header differs from " + runs.front().source);
  }
  bool numeric_x = true;
  for (const CsvTable& t : runs) {
    for (const auto& row : t.rows) {
      double v = 0.0;
      if (!parse_number(row[0], v) || std::isnan(v)) numeric_x = false;
    }
  }

  std::vector<std::pair<std::filesystem::path, std::string>> pending;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const Band band = aggregate(runs, header[c], numeric_x);
    if (band.mean.empty()) continue;  // column without any finite value
    pending.emplace_back(out_dir / (header[c] + ".svg"),
                         render_svg(band, header[c], header[0], numeric_x, runs.size() > 1));
  }
  if (pending.empty()) throw ParseError("no finite values in any metric column");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, svg] : pending) {
    bin::write_file(path, svg);
    written.push_back(path);
  }
  return written;
}

}  // namespace brl
