// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "superlab/errors.hpp"

namespace superlab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_with_meta(const std::filesystem::path& path, const Metadata& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : meta) out << "# " << k << ": " << v << '\n';
  return out;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const Metadata& meta,
                     const std::vector<std::string>& columns)
    : out_(open_with_meta(path, meta)), width_(columns.size()) {
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw Error("CSV row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << '\n';
}

void write_trajectories(const std::filesystem::path& path, const Metadata& meta,
                        const std::vector<TrajectoryRecord>& records) {
  CsvWriter csv(path, meta, {"path_id", "t", "observable_name", "value"});
  for (const auto& r : records) {
    const std::string id = std::to_string(r.path_id);
    // A "phi0" observable already carries <phi0, X_t>.
    const bool has_phi0 =
        std::find(r.observable_names.begin(), r.observable_names.end(), "phi0") != r.observable_names.end();
    for (const auto& row : r.rows) {
      const std::string t = format_number(row.t);
      for (std::size_t j = 0; j < row.values.size(); ++j) {
        csv.row({id, t, r.observable_names.at(j), format_number(row.values[j])});
      }
      if (!has_phi0) csv.row({id, t, "phi0", format_number(row.phi0)});
      csv.row({id, t, "W", format_number(row.w)});
      csv.row({id, t, "count", std::to_string(row.count)});
      csv.row({id, t, "extinct", row.extinct ? "1" : "0"});
    }
  }
}

void write_summary(const std::filesystem::path& path, const Metadata& meta,
                   const ValidationReport& report) {
  auto out = open_with_meta(path, meta);
  out << report.subject << '\n';
  for (const auto& e : report.entries) {
    const char* tag = e.status == CheckStatus::Pass ? "PASS" : e.status == CheckStatus::Fail ? "FAIL" : "INFO";
    out << tag << "  " << e.name;
    if (!e.detail.empty()) out << "  " << e.detail;
    out << '\n';
  }
  if (report.incomplete) out << "INCOMPLETE\n";
  out << "overall: " << (report.passed() ? "PASS" : "FAIL") << '\n';
}

void write_svg(const std::filesystem::path& path, const Metadata& meta, const std::string& title,
               const std::string& x_label, const std::string& y_label,
               const std::vector<SvgSeries>& series) {
  constexpr double W = 720, H = 440, L = 70, R = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : meta) out << "<!-- " << k << ": " << xml_escape(v) << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    out << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << format_number(std::round(xv * 1000) / 1000) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
        << format_number(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << xml_escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
      << ")\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(y_label) << "</text>\n";
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << (s.emphasis ? "#c0392b" : "#7f8c8d")
        << "\" stroke-width=\"" << (s.emphasis ? 2.0 : 0.7) << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.y[i])) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    out << "\"><title>" << xml_escape(s.label) << "</title></polyline>\n";
  }
  out << "</svg>\n";
}

}  // namespace superlab
