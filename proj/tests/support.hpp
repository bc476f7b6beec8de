#pragma once

#include "nullwave/grid.hpp"
#include "nullwave/vectorfields.hpp"

#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace testing_support {

using nullwave::Monomial;
using Poly = std::map<Monomial, double>;

inline double eval(const Poly& p, double t, double x1, double x2, double x3) {
  double acc = 0.0;
  const double v[4] = {t, x1, x2, x3};
  for (const auto& [m, c] : p) {
    double term = c;
    for (int i = 0; i < 4; ++i) term *= std::pow(v[i], m[i]);
    acc += term;
  }
  return acc;
}

inline Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Monomial m{};
      for (int i = 0; i < 4; ++i) m[i] = static_cast<std::uint8_t>(ma[i] + mb[i]);
      out[m] += ca * cb;
    }
  return out;
}

inline Poly add(Poly a, const Poly& b, double scale = 1.0) {
  for (const auto& [m, c] : b) a[m] += scale * c;
  return a;
}

inline double max_coef(const Poly& p) {
  double m = 0.0;
  for (const auto& [k, c] : p) m = std::max(m, std::abs(c));
  return m;
}

/// Random polynomial in (t, x) with every monomial of total degree <= deg.
inline Poly random_poly(std::mt19937_64& rng, int deg) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Poly p;
  for (int a = 0; a <= deg; ++a)
    for (int b = 0; a + b <= deg; ++b)
      for (int c = 0; a + b + c <= deg; ++c)
        for (int d = 0; a + b + c + d <= deg; ++d)
          p[Monomial{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                     static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(d)}] = U(rng);
  return p;
}

inline nullwave::FieldSnapshot sample_poly(const nullwave::GridSpec& g, const Poly& p, double t) {
  return nullwave::FieldSnapshot::sample(
      g, t, [&](double a, double b, double c) { return eval(p, t, a, b, c); });
}

/// Window of W snapshots of p centred at t_c.
inline nullwave::SpacetimeJet poly_jet(const nullwave::GridSpec& g, const Poly& p, double t_c,
                                       double dt, int order, int W = 9) {
  std::vector<nullwave::FieldSnapshot> w;
  for (int j = 0; j < W; ++j) w.push_back(sample_poly(g, p, t_c + (j - W / 2) * dt));
  return nullwave::SpacetimeJet(std::move(w), order);
}

/// Max |a - b| over nodes at least `margin` cells from every face.
inline double interior_max_diff(const nullwave::FieldSnapshot& a, const nullwave::FieldSnapshot& b,
                                int margin) {
  double m = 0.0;
  const auto& g = a.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.face_distance(i) >= margin) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace testing_support
