#include "stkr/transform.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "stkr/graph.hpp"  // ValidationError

namespace stkr {

PolyTransform::PolyTransform(std::vector<double> pi) : coeffs(std::move(pi)) {
  if (coeffs.empty()) throw ValidationError("polynomial transform needs degree >= 1");
  bool any_positive = false;
  for (double c : coeffs) {
    if (c < 0.0) throw ValidationError("polynomial coefficients must be nonnegative");
    if (c > 0.0) any_positive = true;
  }
  if (!any_positive) throw ValidationError("polynomial transform must have a positive coefficient");
}

PolyTransform PolyTransform::monomial(int p) {
  if (p < 1) throw ValidationError("monomial power must be >= 1");
  std::vector<double> c(p, 0.0);
  c[p - 1] = 1.0;
  return PolyTransform(std::move(c));
}

InverseTransform::InverseTransform(std::vector<double> xi_in, int r_in, double lambda_max_in)
    : xi(std::move(xi_in)), r(r_in), lambda_max(lambda_max_in) {
  if (xi.empty() || r < 1) throw ValidationError("inverse transform needs xi and r >= 1");
  if (xi[0] <= 0.0) throw ValidationError("inverse transform requires xi_0 > 0");
  if (lambda_max <= 0.0) throw ValidationError("lambda_max must be positive");
  // rho must stay positive on the working spectral range (0, lambda_max].
  const int samples = 10000;
  for (int i = 1; i <= samples; ++i) {
    const double lam = lambda_max * static_cast<double>(i) / samples;
    if (rho(lam) <= 0.0)
      throw ValidationError("inverse transform has rho(lambda) <= 0 at lambda = " +
                            std::to_string(lam));
  }
}

double InverseTransform::rho(double lambda) const {
  double acc = 0.0;
  for (auto it = xi.rbegin(); it != xi.rend(); ++it) acc = acc * lambda + *it;
  return acc;
}

InverseTransform inverse_laplacian(double eta, double lambda_max) {
  if (eta <= 0.0 || eta >= 1.0 / lambda_max)
    throw ValidationError("inverse Laplacian requires eta in (0, 1/lambda_max)");
  return InverseTransform({1.0, -eta}, 1, lambda_max);
}

double eval_s(const PolyTransform& t, double lambda) {
  if (lambda < 0.0) throw std::domain_error("eval_s expects lambda >= 0");
  double acc = 0.0;
  for (auto it = t.coeffs.rbegin(); it != t.coeffs.rend(); ++it) acc = (acc + *it) * lambda;
  return acc;
}

double eval_s(const InverseTransform& t, double lambda) {
  if (lambda < 0.0) throw std::domain_error("eval_s expects lambda >= 0");
  if (lambda == 0.0) return 0.0;
  const double r = t.rho(lambda);
  if (r <= 0.0) throw std::domain_error("rho(lambda) <= 0: lambda outside the valid range");
  return std::pow(lambda, t.r) / r;
}

double eval_s(const SpectralTransform& t, double lambda) {
  return std::visit([lambda](const auto& tt) { return eval_s(tt, lambda); }, t);
}

std::vector<double> apply_to_spectrum(const SpectralTransform& t,
                                      const std::vector<double>& eigenvalues) {
  std::vector<double> out;
  out.reserve(eigenvalues.size());
  for (double lam : eigenvalues) out.push_back(eval_s(t, lam));
  return out;
}

namespace {

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ValidationError("malformed number: " + s);
  return v;
}

}  // namespace

SpectralTransform parse_transform(const std::string& text) {
  if (text == "base") return PolyTransform::monomial(1);
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  const auto eq = args.find('=');
  const std::string key = eq == std::string::npos ? "" : args.substr(0, eq);
  const std::string value = eq == std::string::npos ? "" : args.substr(eq + 1);

  if (kind == "poly") {
    if (key == "p") return PolyTransform::monomial(std::stoi(value));
    if (key == "coeffs") {
      std::vector<double> coeffs;
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) coeffs.push_back(parse_double(tok));
      return PolyTransform(std::move(coeffs));
    }
  } else if (kind == "invlap") {
    if (key == "eta") return inverse_laplacian(parse_double(value));
  }
  throw ValidationError("cannot parse transform: " + text);
}

std::string to_string(const SpectralTransform& t) {
  char buf[64];
  if (const auto* p = std::get_if<PolyTransform>(&t)) {
    int nonzero = 0, power = 0;
    for (int i = 0; i < p->degree(); ++i)
      if (p->coeffs[i] != 0.0) { ++nonzero; power = i + 1; }
    if (nonzero == 1 && p->coeffs[power - 1] == 1.0) {
      std::snprintf(buf, sizeof(buf), "poly:p=%d", power);
      return buf;
    }
    std::string out = "poly:coeffs=";
    for (int i = 0; i < p->degree(); ++i) {
      std::snprintf(buf, sizeof(buf), "%g", p->coeffs[i]);
      if (i) out += ',';
      out += buf;
    }
    return out;
  }
  const auto& inv = std::get<InverseTransform>(t);
  if (inv.degree() == 2 && inv.xi[0] == 1.0 && inv.r == 1) {
    std::snprintf(buf, sizeof(buf), "invlap:eta=%g", -inv.xi[1]);
    return buf;
  }
  std::string out = "inverse:r=" + std::to_string(inv.r) + ":xi=";
  for (int i = 0; i < inv.degree(); ++i) {
    std::snprintf(buf, sizeof(buf), "%g", inv.xi[i]);
    if (i) out += ',';
    out += buf;
  }
  return out;
}

}  // namespace stkr
