// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/report.hpp"

#include <algorithm>

namespace superlab {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Skipped:
      return "skipped";
  }
  return "?";
}

void ValidationReport::add(std::string name, bool passed, std::string detail, double value) {
  entries.push_back(
      {std::move(name), passed ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail), value});
}

void ValidationReport::skip(std::string name, std::string detail) {
  entries.push_back({std::move(name), CheckStatus::Skipped, std::move(detail), 0.0});
}

bool ValidationReport::passed() const {
  return !incomplete && std::none_of(entries.begin(), entries.end(), [](const CheckEntry& e) {
    return e.status == CheckStatus::Fail;
  });
}

const CheckEntry* ValidationReport::find(const std::string& name) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const CheckEntry& e) { return e.name == name; });
  return it == entries.end() ? nullptr : &*it;
}

}  // namespace superlab
