// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "superlab/particle.hpp"
#include "superlab/report.hpp"

namespace superlab {

/// "# key: value" lines written at the top of every output file.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_number(double v);

/// CSV file with a metadata block and a header row. Fields containing
/// commas or quotes are quoted.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Metadata& meta,
            const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::size_t width_;
};

/// Long format: path_id, t, observable_name, value. Besides the
/// observables every time carries phi0, W, count and extinct.
void write_trajectories(const std::filesystem::path& path, const Metadata& meta,
                        const std::vector<TrajectoryRecord>& records);

/// Pass/fail line per check.
void write_summary(const std::filesystem::path& path, const Metadata& meta,
                   const ValidationReport& report);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool emphasis = false;
};

/// Static line plot with linear axes; the metadata goes in XML comments.
void write_svg(const std::filesystem::path& path, const Metadata& meta, const std::string& title,
               const std::string& x_label, const std::string& y_label,
               const std::vector<SvgSeries>& series);

}  // namespace superlab
