#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nullwave {

/// Dense (lambda, mu, nu) coefficient array, index 0 is time.
using RawTensor = std::array<std::array<std::array<double, 4>, 4>, 4>;

/// Constant coefficients B_{lambda mu nu} of the quadratic nonlinearity
/// B_{lambda mu nu} d_lambda u d_mu d_nu v. Always symmetric in (mu, nu);
/// immutable once built.
class NullFormTensor {
public:
  NullFormTensor() = default;

  /// Averages raw over the last two indices. Throws ConfigError on a
  /// non-finite entry.
  static NullFormTensor symmetrize(const RawTensor& raw);

  double operator()(int lambda, int mu, int nu) const { return e_[lambda][mu][nu]; }
  const RawTensor& entries() const noexcept { return e_; }

  bool is_zero() const noexcept;

  /// B_{lambda mu nu} X_lambda X_mu X_nu.
  double contract(const std::array<double, 4>& x) const noexcept;

  NullFormTensor scaled(double c) const;
  friend NullFormTensor operator+(const NullFormTensor& a, const NullFormTensor& b);

  friend bool operator==(const NullFormTensor&, const NullFormTensor&) = default;

private:
  RawTensor e_{};
};

/// A point of the null cone normalised to X_0 = -1, X' = omega with |omega| = 1.
struct NullVector {
  std::array<double, 4> components{-1.0, 1.0, 0.0, 0.0};

  /// Normalises (w1, w2, w3); throws Error for the zero vector.
  static NullVector from_direction(double w1, double w2, double w3);
  double cone_defect() const noexcept;
};

/// Coefficients of a polynomial of degree <= 3 in (w1, w2, w3), indexed
/// [e1][e2][e3]. After reduce_on_sphere() every monomial has e1 <= 1, which
/// is a unique representative of the restriction to the unit sphere.
struct SpherePolynomial {
  std::array<std::array<std::array<double, 4>, 4>, 4> c{};

  void reduce_on_sphere();
  double evaluate(double w1, double w2, double w3) const noexcept;
  double l1_norm() const noexcept;
};

/// Expands B_{lambda mu nu} X_lambda X_mu X_nu with X = (-1, omega).
SpherePolynomial null_contraction_polynomial(const NullFormTensor& b);

enum class DefectMethod { exact, sampled };

/// Exact: l1 norm of the sphere-reduced contraction polynomial (0 iff the
/// null condition holds, and an upper bound of |contraction| on the sphere).
/// Sampled: max |contraction| over n_dirs Fibonacci-sphere directions.
double null_defect(const NullFormTensor& b, DefectMethod method = DefectMethod::exact,
                   int n_dirs = 512);

bool is_null(const NullFormTensor& b, double tol);

/// max |raw[l][m][n] - raw[l][n][m]|.
double symmetry_defect(const RawTensor& raw);

/// Quasi-uniform unit vectors (Fibonacci lattice).
std::vector<std::array<double, 3>> sphere_directions(int n);

enum class CanonicalKind { zero, q0_quasilinear, john_nonnull };

NullFormTensor canonical_tensor(CanonicalKind kind);
/// Accepts "zero", "q0_quasilinear", "john_nonnull"; throws ConfigError otherwise.
NullFormTensor canonical_tensor(std::string_view name);
bool is_canonical_name(std::string_view name);

/// Reads `lambda mu nu value` lines. Blank lines and '#' comments are
/// skipped; unlisted entries are zero. Throws ConfigError on malformed input.
RawTensor read_tensor_literal(std::istream& in);
RawTensor read_tensor_file(const std::filesystem::path& path);
void write_tensor_literal(std::ostream& out, const NullFormTensor& b);

/// Canonical name or path to a tensor literal file.
NullFormTensor resolve_tensor(const std::string& name_or_path);

} // namespace nullwave
