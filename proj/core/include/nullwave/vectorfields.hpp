#pragma once

// Klainerman generators and their ordered products on discrete space-time
// data. A product Gamma^a is expanded once, exactly, into a linear
// differential operator whose coefficients are polynomials in (t, x); the
// operator is then evaluated against mixed derivatives d_t^k d_x^beta u read
// from a window of snapshots (temporal finite differences over the window,
// spatial stencils from grid.hpp).

#include "nullwave/grid.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nullwave {

inline constexpr int kGeneratorCount = 11;

/// Generator order: d_t, d_1, d_2, d_3, Omega_1..3, L_1..3, S.
enum Generator : int {
  kDt = 0,
  kD1 = 1,
  kD2 = 2,
  kD3 = 3,
  kOmega1 = 4,
  kOmega2 = 5,
  kOmega3 = 6,
  kL1 = 7,
  kL2 = 8,
  kL3 = 9,
  kScaling = 10,
};

const char* generator_name(int k);

/// Exponents over the 11 generators: Gamma^a = Gamma_0^{a_0} ... Gamma_10^{a_10}.
struct MultiIndex {
  std::array<int, kGeneratorCount> exponents{};

  static MultiIndex unit(int k);
  int order() const noexcept;
  MultiIndex operator+(const MultiIndex& o) const;
  std::string to_string() const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// Every a with |a| <= max_order, graded by |a| and lexicographic
/// (largest exponent vector first) within a grade, so e_0 precedes e_10.
std::vector<MultiIndex> enumerate_multiindices(int max_order);
void write_multiindices(std::ostream& out, std::span<const MultiIndex> list);

/// Exponents (t, x1, x2, x3) of a derivative d_t^k d_1^b1 d_2^b2 d_3^b3.
using DerivIndex = std::array<std::uint8_t, 4>;
/// Exponents (t, x1, x2, x3) of a coefficient monomial.
using Monomial = std::array<std::uint8_t, 4>;

inline int total(const DerivIndex& d) noexcept { return d[0] + d[1] + d[2] + d[3]; }

/// sum_j c_j(t, x) D_j with polynomial coefficients.
class DiffOperator {
public:
  using Key = std::pair<DerivIndex, Monomial>;

  static DiffOperator identity();
  /// d_mu, mu = 0 (time) .. 3.
  static DiffOperator partial(int mu);
  static DiffOperator generator(int k);
  /// The literal ordered product, Gamma_10 applied first.
  static DiffOperator product(const MultiIndex& a);
  /// The single term D^d with unit coefficient.
  static DiffOperator derivative(const DerivIndex& d);
  /// d_t^2 - (d_1^2 + d_2^2 + d_3^2).
  static DiffOperator box();

  /// outer o inner, expanded with the Leibniz rule.
  friend DiffOperator compose(const DiffOperator& outer, const DiffOperator& inner);
  friend DiffOperator operator+(const DiffOperator& a, const DiffOperator& b);
  DiffOperator scaled(double c) const;

  int order() const noexcept;
  int coefficient_degree() const noexcept;
  const std::map<Key, double>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  /// Applies the operator to a polynomial in (t, x) given as monomial map;
  /// used by tests as a symbolic oracle.
  std::map<Monomial, double> apply_to_polynomial(const std::map<Monomial, double>& p) const;

private:
  void add(const DerivIndex& d, const Monomial& m, double c);
  std::map<Key, double> terms_;
};

/// Window of W snapshots of one field at uniform spacing, centred on the
/// middle snapshot. Supplies d_t^k d_x^beta u at the centre time for
/// k + |beta| <= order(). A window of one snapshot is a static jet with
/// spatial derivatives only.
class SpacetimeJet {
public:
  /// W odd; uniform spacing and equal grids required. order < 0 picks the
  /// largest order with W >= 2*ceil(order/2) + 5.
  explicit SpacetimeJet(std::vector<FieldSnapshot> window, int order = -1);
  static SpacetimeJet static_field(FieldSnapshot f, int spatial_order);

  static int max_order_for_window(int w) noexcept;

  const GridSpec& grid() const noexcept { return window_.front().grid(); }
  double center_time() const noexcept { return window_[window_.size() / 2].t(); }
  const FieldSnapshot& center() const noexcept { return window_[window_.size() / 2]; }
  int order() const noexcept { return order_; }
  int window_size() const noexcept { return static_cast<int>(window_.size()); }
  double dt() const noexcept { return dt_; }
  bool is_static() const noexcept { return window_.size() == 1; }

  /// Throws BudgetError if the derivative is beyond the jet's budget.
  void check_budget(const DerivIndex& d) const;

  /// Cached d_t^k d_x^beta u at the centre time.
  std::span<const double> derivative(const DerivIndex& d) const;
  /// Computes a batch of derivatives in one sweep over the window.
  void require(const std::vector<DerivIndex>& ds) const;

  /// Weights w_j with d_t^k u(t_c) ~ sum_j w_j u(t_c + (j - m) dt).
  std::vector<double> temporal_weights(int k) const;

private:
  SpacetimeJet() = default;

  std::vector<FieldSnapshot> window_;
  int order_ = 0;
  double dt_ = 0.0;
  mutable std::map<DerivIndex, std::vector<double>> cache_;
};

/// Finite-difference weights for the k-th derivative at x0 on nodes xs.
std::vector<double> fornberg_weights(int k, double x0, std::span<const double> xs);

/// A batch of operators compiled against one jet. Coefficients are evaluated
/// at the jet centre time and node positions.
class OperatorBank {
public:
  OperatorBank(const SpacetimeJet& jet, const std::vector<DiffOperator>& ops);

  std::size_t size() const noexcept { return ops_.size(); }
  const SpacetimeJet& jet() const noexcept { return *jet_; }

  /// out[op * (hi - lo) + (i - lo)] = value of operator op at node i.
  void evaluate_block(std::size_t lo, std::size_t hi, std::span<double> out) const;
  FieldSnapshot field(std::size_t op) const;

private:
  struct Term {
    const double* field;
    int mono;
    double coef;
  };
  const SpacetimeJet* jet_;
  std::vector<std::vector<Term>> ops_;
  std::vector<std::array<std::uint8_t, 3>> monos_;
};

/// Gamma_k u at the jet centre.
FieldSnapshot apply_generator(int k, const SpacetimeJet& jet);
/// Gamma^a u at the jet centre; |a| = 0 returns u.
FieldSnapshot apply_multi(const MultiIndex& a, const SpacetimeJet& jet);

} // namespace nullwave
