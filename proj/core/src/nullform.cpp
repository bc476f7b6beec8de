#include "nullwave/nullform.hpp"

#include "nullwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace nullwave {

NullFormTensor NullFormTensor::symmetrize(const RawTensor& raw) {
  NullFormTensor out;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        if (!std::isfinite(raw[l][m][n]))
          throw ConfigError("tensor entry (" + std::to_string(l) + "," + std::to_string(m) + "," +
                            std::to_string(n) + ") is not finite");
      }
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = m; n < 4; ++n) {
        // (a + a) / 2 == a exactly, so symmetric input is a fixed point.
        const double avg = m == n ? raw[l][m][n] : (raw[l][m][n] + raw[l][n][m]) / 2.0;
        out.e_[l][m][n] = avg;
        out.e_[l][n][m] = avg;
      }
  return out;
}

bool NullFormTensor::is_zero() const noexcept {
  for (const auto& a : e_)
    for (const auto& b : a)
      for (double x : b)
        if (x != 0.0) return false;
  return true;
}

double NullFormTensor::contract(const std::array<double, 4>& x) const noexcept {
  double acc = 0.0;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) acc += e_[l][m][n] * x[l] * x[m] * x[n];
  return acc;
}

NullFormTensor NullFormTensor::scaled(double c) const {
  NullFormTensor out = *this;
  for (auto& a : out.e_)
    for (auto& b : a)
      for (double& x : b) x *= c;
  return out;
}

NullFormTensor operator+(const NullFormTensor& a, const NullFormTensor& b) {
  NullFormTensor out;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) out.e_[l][m][n] = a.e_[l][m][n] + b.e_[l][m][n];
  return out;
}

NullVector NullVector::from_direction(double w1, double w2, double w3) {
  const double norm = std::sqrt(w1 * w1 + w2 * w2 + w3 * w3);
  if (!(norm > 0.0)) throw Error("null vector needs a nonzero spatial direction");
  return NullVector{{-1.0, w1 / norm, w2 / norm, w3 / norm}};
}

double NullVector::cone_defect() const noexcept {
  const auto& x = components;
  return std::abs(x[0] * x[0] - (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]));
}

void SpherePolynomial::reduce_on_sphere() {
  // w1^2 = 1 - w2^2 - w3^2, applied from the highest power of w1 down.
  for (int e1 = 3; e1 >= 2; --e1)
    for (int e2 = 0; e2 + e1 <= 3; ++e2)
      for (int e3 = 0; e3 + e2 + e1 <= 3; ++e3) {
        const double a = c[e1][e2][e3];
        if (a == 0.0) continue;
        c[e1][e2][e3] = 0.0;
        c[e1 - 2][e2][e3] += a;
        c[e1 - 2][e2 + 2][e3] -= a;
        c[e1 - 2][e2][e3 + 2] -= a;
      }
}

double SpherePolynomial::evaluate(double w1, double w2, double w3) const noexcept {
  double acc = 0.0;
  for (int e1 = 0; e1 < 4; ++e1)
    for (int e2 = 0; e2 < 4; ++e2)
      for (int e3 = 0; e3 < 4; ++e3) {
        const double a = c[e1][e2][e3];
        if (a != 0.0) acc += a * std::pow(w1, e1) * std::pow(w2, e2) * std::pow(w3, e3);
      }
  return acc;
}

double SpherePolynomial::l1_norm() const noexcept {
  double acc = 0.0;
  for (const auto& a : c)
    for (const auto& b : a)
      for (double x : b) acc += std::abs(x);
  return acc;
}

SpherePolynomial null_contraction_polynomial(const NullFormTensor& b) {
  // X_0 = -1 contributes a sign, X_i = w_i raises the exponent of w_i.
  SpherePolynomial p;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        const double coef = b(l, m, n);
        if (coef == 0.0) continue;
        std::array<int, 4> e{};
        double sign = 1.0;
        for (int idx : {l, m, n}) {
          if (idx == 0)
            sign = -sign;
          else
            ++e[idx];
        }
        p.c[e[1]][e[2]][e[3]] += sign * coef;
      }
  return p;
}

std::vector<std::array<double, 3>> sphere_directions(int n) {
  std::vector<std::array<double, 3>> dirs;
  if (n <= 0) return dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return dirs;
}

double null_defect(const NullFormTensor& b, DefectMethod method, int n_dirs) {
  if (method == DefectMethod::exact) {
    auto p = null_contraction_polynomial(b);
    p.reduce_on_sphere();
    return p.l1_norm();
  }
  double worst = 0.0;
  for (const auto& w : sphere_directions(n_dirs))
    worst = std::max(worst, std::abs(b.contract({-1.0, w[0], w[1], w[2]})));
  return worst;
}

bool is_null(const NullFormTensor& b, double tol) {
  return null_defect(b, DefectMethod::exact) <= tol;
}

double symmetry_defect(const RawTensor& raw) {
  double worst = 0.0;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) worst = std::max(worst, std::abs(raw[l][m][n] - raw[l][n][m]));
  return worst;
}

NullFormTensor canonical_tensor(CanonicalKind kind) {
  RawTensor raw{};
  switch (kind) {
  case CanonicalKind::zero:
    break;
  case CanonicalKind::q0_quasilinear:
    // u_t u_tt - grad u . grad u_t
    raw[0][0][0] = 1.0;
    for (int i = 1; i <= 3; ++i) {
      raw[i][0][i] = -0.5;
      raw[i][i][0] = -0.5;
    }
    break;
  case CanonicalKind::john_nonnull:
    raw[0][0][0] = 1.0;
    break;
  }
  return NullFormTensor::symmetrize(raw);
}

bool is_canonical_name(std::string_view name) {
  return name == "zero" || name == "q0_quasilinear" || name == "john_nonnull";
}

NullFormTensor canonical_tensor(std::string_view name) {
  if (name == "zero") return canonical_tensor(CanonicalKind::zero);
  if (name == "q0_quasilinear") return canonical_tensor(CanonicalKind::q0_quasilinear);
  if (name == "john_nonnull") return canonical_tensor(CanonicalKind::john_nonnull);
  throw ConfigError("unknown canonical tensor '" + std::string(name) + "'");
}

RawTensor read_tensor_literal(std::istream& in) {
  RawTensor raw{};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    std::istringstream rest(line);
    int l = -1, m = -1, n = -1;
    double value = 0.0;
    std::string extra;
    if (!(rest >> l >> m >> n >> value) || (rest >> extra))
      throw ConfigError("tensor literal line " + std::to_string(lineno) +
                        ": expected 'lambda mu nu value'");
    if (l < 0 || l > 3 || m < 0 || m > 3 || n < 0 || n > 3)
      throw ConfigError("tensor literal line " + std::to_string(lineno) + ": index out of 0..3");
    if (!std::isfinite(value))
      throw ConfigError("tensor literal line " + std::to_string(lineno) + ": value not finite");
    raw[l][m][n] = value;
  }
  return raw;
}

RawTensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tensor file '" + path.string() + "'");
  return read_tensor_literal(in);
}

void write_tensor_literal(std::ostream& out, const NullFormTensor& b) {
  char buf[96];
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        if (b(l, m, n) != 0.0) {
          std::snprintf(buf, sizeof(buf), "%d %d %d %.17g\n", l, m, n, b(l, m, n));
          out << buf;
        }
}

NullFormTensor resolve_tensor(const std::string& name_or_path) {
  if (is_canonical_name(name_or_path)) return canonical_tensor(name_or_path);
  return NullFormTensor::symmetrize(read_tensor_file(name_or_path));
}

} // namespace nullwave
