// SPDX-FileCopyrightText: 2026 superlab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace superlab {

using Point = std::vector<double>;

/// One term  coef * prod_k x_k^{powers[k]} * exp(-rate * |x|^2).
///
/// A negative rate is allowed; it is how growing Gaussians such as the
/// ground state of the quadratic-potential OU model are expressed.
struct FieldTerm {
  double coef = 0.0;
  std::vector<int> powers;  // missing trailing entries count as zero
  double rate = 0.0;

  int degree() const;
};

/// Closed family of scalar coefficient fields on R^d: constants, centred
/// Gaussians p*exp(-q|x|^2), monomials of degree <= 4, and finite sums and
/// products of these. Closed under + and *.
class ScalarField {
 public:
  ScalarField() = default;

  static ScalarField constant(double value);
  static ScalarField gaussian(double amplitude, double rate);
  /// coef * prod x_k^{powers[k]}; total degree must be <= 4.
  static ScalarField monomial(double coef, std::vector<int> powers);
  /// coef * |x|^2 in dimension d.
  static ScalarField squared_norm(int dim, double coef = 1.0);

  double operator()(std::span<const double> x) const;

  ScalarField operator+(const ScalarField& other) const;
  ScalarField operator*(const ScalarField& other) const;
  ScalarField operator*(double s) const;

  const std::vector<FieldTerm>& terms() const { return terms_; }

  /// Value if the field does not depend on x.
  std::optional<double> constant_value() const;
  bool is_constant() const { return constant_value().has_value(); }
  /// Structural boundedness: every term either decays (rate > 0) or is a pure constant.
  bool is_bounded() const;
  bool is_zero() const { return terms_.empty(); }
  /// Upper bound on sup |f| from the terms, when the field is bounded.
  std::optional<double> sup_abs_bound() const;
  /// Lower bound on inf f from the terms, when the field is bounded.
  std::optional<double> lower_bound() const;

  std::string describe() const;

 private:
  void simplify();
  std::vector<FieldTerm> terms_;
};

}  // namespace superlab
