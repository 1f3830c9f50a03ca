#pragma once

#include <string>
#include <variant>
#include <vector>

namespace stkr {

/// s(lambda) = sum_{p=1}^{q} pi_p lambda^p with nonnegative coefficients.
struct PolyTransform {
  std::vector<double> coeffs;  // coeffs[p-1] = pi_p, q = coeffs.size()

  explicit PolyTransform(std::vector<double> pi);
  /// Single monomial s(lambda) = lambda^p.
  static PolyTransform monomial(int p);

  int degree() const { return static_cast<int>(coeffs.size()); }
};

/// Encodes s through its reciprocal form: s(lambda) = lambda^r / rho(lambda),
/// rho(lambda) = sum_{p=0}^{q-1} xi_p lambda^p. Requires rho > 0 on
/// (0, lambda_max] and xi_0 > 0.
struct InverseTransform {
  std::vector<double> xi;  // xi[p], q = xi.size()
  int r = 1;
  double lambda_max = 1.0;

  InverseTransform(std::vector<double> xi, int r, double lambda_max = 1.0);

  double rho(double lambda) const;
  int degree() const { return static_cast<int>(xi.size()); }
};

using SpectralTransform = std::variant<PolyTransform, InverseTransform>;

/// s^{-1}(lambda) = lambda^{-1} - eta, i.e. s(lambda) = lambda / (1 - eta lambda).
InverseTransform inverse_laplacian(double eta, double lambda_max = 1.0);

double eval_s(const PolyTransform& t, double lambda);
double eval_s(const InverseTransform& t, double lambda);
double eval_s(const SpectralTransform& t, double lambda);

std::vector<double> apply_to_spectrum(const SpectralTransform& t,
                                      const std::vector<double>& eigenvalues);

/// Config syntax: "poly:p=8" | "poly:coeffs=0.5,0.5" | "invlap:eta=0.99" |
/// "base" (alias for poly p=1).
SpectralTransform parse_transform(const std::string& text);
std::string to_string(const SpectralTransform& t);

}  // namespace stkr
