// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#include "superlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "superlab/errors.hpp"

namespace superlab {

namespace {

std::vector<int> trimmed(std::vector<int> p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

}  // namespace

int FieldTerm::degree() const {
  int s = 0;
  for (int p : powers) s += p;
  return s;
}

ScalarField ScalarField::constant(double value) {
  ScalarField f;
  if (value != 0.0) f.terms_.push_back({value, {}, 0.0});
  return f;
}

ScalarField ScalarField::gaussian(double amplitude, double rate) {
  ScalarField f;
  if (amplitude != 0.0) f.terms_.push_back({amplitude, {}, rate});
  return f;
}

ScalarField ScalarField::monomial(double coef, std::vector<int> powers) {
  for (int p : powers) {
    if (p < 0) throw ConfigError("monomial powers must be nonnegative");
  }
  FieldTerm t{coef, trimmed(std::move(powers)), 0.0};
  if (t.degree() > 4) throw ConfigError("polynomial fields are limited to degree 4");
  ScalarField f;
  if (coef != 0.0) f.terms_.push_back(std::move(t));
  return f;
}

ScalarField ScalarField::squared_norm(int dim, double coef) {
  ScalarField f;
  for (int k = 0; k < dim; ++k) {
    std::vector<int> p(static_cast<std::size_t>(k + 1), 0);
    p[static_cast<std::size_t>(k)] = 2;
    f = f + monomial(coef, p);
  }
  return f;
}

double ScalarField::operator()(std::span<const double> x) const {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coef;
    for (std::size_t k = 0; k < t.powers.size(); ++k) {
      const double xk = k < x.size() ? x[k] : 0.0;
      for (int j = 0; j < t.powers[k]; ++j) v *= xk;
    }
    if (t.rate != 0.0) v *= std::exp(-t.rate * r2);
    sum += v;
  }
  return sum;
}

ScalarField ScalarField::operator+(const ScalarField& other) const {
  ScalarField out = *this;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  out.simplify();
  return out;
}

ScalarField ScalarField::operator*(const ScalarField& other) const {
  ScalarField out;
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      FieldTerm t;
      t.coef = a.coef * b.coef;
      t.rate = a.rate + b.rate;
      t.powers.assign(std::max(a.powers.size(), b.powers.size()), 0);
      for (std::size_t k = 0; k < a.powers.size(); ++k) t.powers[k] += a.powers[k];
      for (std::size_t k = 0; k < b.powers.size(); ++k) t.powers[k] += b.powers[k];
      out.terms_.push_back(std::move(t));
    }
  }
  out.simplify();
  return out;
}

ScalarField ScalarField::operator*(double s) const { return *this * constant(s); }

void ScalarField::simplify() {
  std::vector<FieldTerm> merged;
  for (auto& t : terms_) {
    t.powers = trimmed(std::move(t.powers));
    auto it = std::find_if(merged.begin(), merged.end(), [&](const FieldTerm& m) {
      return m.rate == t.rate && m.powers == t.powers;
    });
    if (it == merged.end()) {
      merged.push_back(t);
    } else {
      it->coef += t.coef;
    }
  }
  std::erase_if(merged, [](const FieldTerm& t) { return t.coef == 0.0; });
  terms_ = std::move(merged);
}

std::optional<double> ScalarField::constant_value() const {
  if (terms_.empty()) return 0.0;
  if (terms_.size() == 1 && terms_[0].powers.empty() && terms_[0].rate == 0.0) {
    return terms_[0].coef;
  }
  return std::nullopt;
}

bool ScalarField::is_bounded() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const FieldTerm& t) {
    return t.rate > 0.0 || (t.rate == 0.0 && t.powers.empty());
  });
}

namespace {

// sup over x of |prod x_k^{p_k}| exp(-r|x|^2), r > 0
double term_sup(const FieldTerm& t) {
  double s = std::abs(t.coef);
  for (int p : t.powers) {
    if (p > 0) s *= std::pow(p / (2.0 * t.rate * std::exp(1.0)), 0.5 * p);
  }
  return s;
}

bool has_odd_power(const FieldTerm& t) {
  return std::any_of(t.powers.begin(), t.powers.end(), [](int p) { return p % 2 != 0; });
}

}  // namespace

std::optional<double> ScalarField::sup_abs_bound() const {
  if (!is_bounded()) return std::nullopt;
  double s = 0.0;
  for (const auto& t : terms_) s += term_sup(t);
  return s;
}

std::optional<double> ScalarField::lower_bound() const {
  if (!is_bounded()) return std::nullopt;
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.rate == 0.0) {
      s += t.coef;
    } else if (t.coef < 0.0 || has_odd_power(t)) {
      s -= term_sup(t);
    }
  }
  return s;
}

std::string ScalarField::describe() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (i > 0) os << " + ";
    os << t.coef;
    for (std::size_t k = 0; k < t.powers.size(); ++k) {
      if (t.powers[k] > 0) os << "*x" << k << "^" << t.powers[k];
    }
    if (t.rate != 0.0) os << "*exp(" << -t.rate << "|x|^2)";
  }
  return os.str();
}

}  // namespace superlab
