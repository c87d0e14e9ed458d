// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace superlab {

enum class CheckStatus { Pass, Fail, Skipped };

const char* to_string(CheckStatus s);

struct CheckEntry {
  std::string name;
  CheckStatus status = CheckStatus::Skipped;
  std::string detail;
  double value = 0.0;
};

/// Ordered list of named checks. Failures are entries, not exceptions.
struct ValidationReport {
  std::string subject;
  std::vector<CheckEntry> entries;
  /// Set when the report could not cover everything it was asked to.
  bool incomplete = false;

  void add(std::string name, bool passed, std::string detail = {}, double value = 0.0);
  void skip(std::string name, std::string detail = {});
  /// True when no entry failed and the report is complete.
  bool passed() const;
  const CheckEntry* find(const std::string& name) const;
};

}  // namespace superlab
