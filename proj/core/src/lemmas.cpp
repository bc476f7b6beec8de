#include "nullwave/lemmas.hpp"

#include "nullwave/errors.hpp"
#include "nullwave/parallel.hpp"
#include "nullwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace nullwave {

namespace {

constexpr std::size_t kChunk = 4096;

void fold_max(double& m, double v) {
  if (std::isnan(m)) return;
  if (std::isnan(v) || v > m) m = v;
}

double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

double radius(const std::array<double, 3>& x) {
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

// Runs body(i, vals, stride) for every node, where vals[op * stride] is the
// value of operator op at node i. Returns the largest value body reports.
template <class Body>
double max_over_nodes(const OperatorBank& bank, Body&& body) {
  const std::size_t N = bank.jet().grid().size();
  const std::size_t nops = bank.size();
  const std::size_t count = (N + kChunk - 1) / kChunk;
  std::vector<double> best(count, 0.0);
  parallel::for_chunks(N, kChunk, [&](std::size_t lo, std::size_t hi) {
    thread_local std::vector<double> buf;
    const std::size_t b = hi - lo;
    if (buf.size() < nops * b) buf.resize(nops * b);
    bank.evaluate_block(lo, hi, std::span<double>(buf.data(), nops * b));
    double m = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      fold_max(m, body(lo + i, buf.data() + i, b));
    }
    best[lo / kChunk] = m;
  });
  double m = 0.0;
  for (double v : best) fold_max(m, v);
  return m;
}

// Per-node values collected into an array.
template <class Body>
std::vector<double> node_values(const OperatorBank& bank, Body&& body) {
  const std::size_t N = bank.jet().grid().size();
  const std::size_t nops = bank.size();
  std::vector<double> out(N);
  parallel::for_chunks(N, kChunk, [&](std::size_t lo, std::size_t hi) {
    thread_local std::vector<double> buf;
    const std::size_t b = hi - lo;
    if (buf.size() < nops * b) buf.resize(nops * b);
    bank.evaluate_block(lo, hi, std::span<double>(buf.data(), nops * b));
    for (std::size_t i = 0; i < b; ++i) out[lo + i] = body(lo + i, buf.data() + i, b);
  });
  return out;
}

double l2_norm(std::span<const double> f, const GridSpec& g) {
  const double s = parallel::pairwise_sum(f.size(), [&](std::size_t i) { return f[i] * f[i]; });
  return std::sqrt(s * g.cell_volume());
}

double grad_norm(std::span<const double> f, const GridSpec& g) {
  std::array<std::vector<double>, 3> d;
  for (int a = 0; a < 3; ++a) {
    d[a].assign(f.size(), 0.0);
    d1_into(f, d[a], g, a + 1);
  }
  const double s = parallel::pairwise_sum(f.size(), [&](std::size_t i) {
    return d[0][i] * d[0][i] + d[1][i] * d[1][i] + d[2][i] * d[2][i];
  });
  return std::sqrt(s * g.cell_volume());
}

std::vector<DerivIndex> spacetime_indices(int order) {
  std::vector<DerivIndex> out;
  for (int a = order; a >= 0; --a)
    for (int b = order - a; b >= 0; --b)
      for (int c = order - a - b; c >= 0; --c)
        out.push_back({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                       static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(order - a - b - c)});
  return out;
}

// Slot of d_m d_n (m <= n) among the 10 second derivatives.
int pair_slot(int m, int n) {
  if (m > n) std::swap(m, n);
  static constexpr int base[4] = {0, 4, 7, 9};
  return base[m] + (n - m);
}

DerivIndex second(int m, int n) {
  DerivIndex d{0, 0, 0, 0};
  ++d[m];
  ++d[n];
  return d;
}

} // namespace

// --- single-field ratios ------------------------------------------------------

double weighted_sobolev_ratio(const FieldSnapshot& u) {
  const GridSpec& g = u.grid();
  const std::size_t N = g.size();
  std::array<std::vector<double>, 3> grad;
  for (int a = 0; a < 3; ++a) {
    grad[a].assign(N, 0.0);
    d1_into(u.values(), grad[a], g, a + 1);
  }
  double den = grad_norm(u.values(), g);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    std::vector<double> omega(N);
    for (std::size_t idx = 0; idx < N; ++idx) {
      const auto x = g.position(idx);
      omega[idx] = x[j] * grad[k][idx] - x[k] * grad[j][idx];
    }
    den += grad_norm(omega, g);
  }
  double num = 0.0;
  const double r_min = 2.0 * g.h;
  for (std::size_t idx = 0; idx < N; ++idx) {
    const double r = radius(g.position(idx));
    if (r >= r_min) num = std::max(num, std::sqrt(r) * std::abs(u[idx]));
  }
  return safe_ratio(num, den);
}

double hardy_ratio(const FieldSnapshot& u, double t, double R) {
  const GridSpec& g = u.grid();
  const double tol = 1e-12 * u.max_abs();
  std::vector<double> weighted(u.size());
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    const double r = radius(g.position(idx));
    if (r > t + R && std::abs(u[idx]) > tol)
      throw Error("hardy_ratio: field is nonzero outside |x| <= t + R");
    weighted[idx] = u[idx] / std::sqrt(1.0 + (t - r) * (t - r));
  }
  return safe_ratio(l2_norm(weighted, g), grad_norm(u.values(), g));
}

// --- jet ratios -----------------------------------------------------------------

double derivative_ratio(const SpacetimeJet& jet, int N) {
  if (N < 0) throw ConfigError("derivative_ratio: N must be >= 0");
  std::vector<DiffOperator> ops;
  for (const auto& d : spacetime_indices(N)) ops.push_back(DiffOperator::derivative(d));
  const std::size_t n_alpha = ops.size();
  for (const auto& b : enumerate_multiindices(N)) ops.push_back(DiffOperator::product(b));
  const std::size_t n_ops = ops.size();
  for (const auto& op : ops)
    if (op.order() > jet.order())
      throw BudgetError("derivative_ratio needs jet order " + std::to_string(op.order()));
  OperatorBank bank(jet, ops);
  const GridSpec& g = jet.grid();
  const double t = jet.center_time();

  std::vector<double> num(g.size());
  const auto den = node_values(bank, [&](std::size_t i, const double* v, std::size_t s) {
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < n_alpha; ++k) a += std::abs(v[k * s]);
    for (std::size_t k = n_alpha; k < n_ops; ++k) b += std::abs(v[k * s]);
    num[i] = a;
    const double r = radius(g.position(i));
    return b * std::pow(1.0 + std::abs(t - r), -N);
  });
  const double dmax = *std::max_element(den.begin(), den.end());
  if (dmax == 0.0) return 0.0;
  const double floor = 1e-6 * dmax;
  double best = 0.0;
  for (std::size_t i = 0; i < den.size(); ++i)
    if (den[i] >= floor) best = std::max(best, num[i] / den[i]);
  return best;
}

double nullform_ratio(const SpacetimeJet& jet, const NullFormTensor& b) {
  if (!is_null(b, 1e-12)) throw ConfigError("nullform_ratio requires a null tensor");
  std::vector<DiffOperator> ops;
  for (int l = 0; l < 4; ++l) ops.push_back(DiffOperator::partial(l));            // 0..3
  for (int m = 0; m < 4; ++m)
    for (int n = m; n < 4; ++n) ops.push_back(DiffOperator::derivative(second(m, n)));  // 4..13
  for (int k = 0; k < kGeneratorCount; ++k) ops.push_back(DiffOperator::generator(k));  // 14..24
  for (int k = 0; k < kGeneratorCount; ++k)
    for (int m = 0; m < 4; ++m)
      ops.push_back(compose(DiffOperator::partial(m), DiffOperator::generator(k)));  // 25..68
  OperatorBank bank(jet, ops);
  const GridSpec& g = jet.grid();
  const double t = jet.center_time();
  const double r_lo = (t + 1.0) / 2.0;

  std::vector<double> num(g.size(), 0.0);
  const auto den = node_values(bank, [&](std::size_t i, const double* v, std::size_t s) {
    const double r = radius(g.position(i));
    if (r < r_lo) return 0.0;
    double du = 0.0, d2u = 0.0, gu = 0.0, dgu = 0.0, nl = 0.0;
    for (int l = 0; l < 4; ++l) du += std::abs(v[l * s]);
    for (int k = 0; k < 10; ++k) d2u += std::abs(v[(4 + k) * s]);
    for (int k = 0; k < kGeneratorCount; ++k) gu += std::abs(v[(14 + k) * s]);
    for (int k = 0; k < 4 * kGeneratorCount; ++k) dgu += std::abs(v[(25 + k) * s]);
    for (int l = 0; l < 4; ++l)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          const double c = b(l, m, n);
          if (c != 0.0) nl += c * v[l * s] * v[(4 + pair_slot(m, n)) * s];
        }
    num[i] = std::abs(nl);
    const double bracket = std::sqrt(1.0 + (t - r) * (t - r));
    return (gu * d2u + du * dgu + bracket * du * d2u) / (1.0 + t);
  });
  const double dmax = *std::max_element(den.begin(), den.end());
  if (dmax == 0.0) return 0.0;
  const double floor = 1e-6 * dmax;
  double best = 0.0;
  for (std::size_t i = 0; i < den.size(); ++i)
    if (den[i] >= floor && den[i] > 0.0) best = std::max(best, num[i] / den[i]);
  return best;
}

NullFormTensor commuted_tensor(const NullFormTensor& b, int generator) {
  if (generator < 0 || generator >= kGeneratorCount)
    throw ConfigError("generator index out of range");
  // Gamma = Gamma^alpha d_alpha with Gamma^alpha affine; M[l][alpha] = d_l Gamma^alpha.
  double M[4][4] = {};
  const DiffOperator gen = DiffOperator::generator(generator);
  for (const auto& [key, c] : gen.terms()) {
    const auto& [d, m] = key;
    int alpha = -1;
    for (int q = 0; q < 4; ++q)
      if (d[q] == 1) alpha = q;
    int deg = 0, lambda = -1;
    for (int q = 0; q < 4; ++q) {
      deg += m[q];
      if (m[q] == 1) lambda = q;
    }
    if (alpha < 0 || total(d) != 1 || deg > 1) throw Error("generator is not a vector field");
    if (deg == 1) M[lambda][alpha] += c;
  }
  RawTensor raw{};
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        const double c = b(l, m, n);
        if (c == 0.0) continue;
        for (int a = 0; a < 4; ++a) {
          raw[a][m][n] -= c * M[l][a];
          raw[l][m][a] -= c * M[n][a];
          raw[l][a][n] -= c * M[m][a];
        }
      }
  if (generator == kScaling)
    for (int l = 0; l < 4; ++l)
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) raw[l][m][n] += 2.0 * b(l, m, n);
  return NullFormTensor::symmetrize(raw);
}

CommutationResidual commutation_residual(const SpacetimeJet& jet, const NullFormTensor& b,
                                         const MultiIndex& a) {
  if (a.order() != 1) throw ConfigError("commutation check supports |a| = 1 only");
  int k = 0;
  while (a.exponents[k] == 0) ++k;
  const DiffOperator gen = DiffOperator::generator(k);
  const NullFormTensor bd = commuted_tensor(b, k);

  std::vector<DiffOperator> ops;
  ops.push_back(compose(DiffOperator::box(), gen));                                    // 0
  for (int l = 0; l < 4; ++l) ops.push_back(compose(DiffOperator::partial(l), gen));   // 1..4
  for (int m = 0; m < 4; ++m)
    for (int n = m; n < 4; ++n)
      ops.push_back(compose(DiffOperator::derivative(second(m, n)), gen));             // 5..14
  for (int l = 0; l < 4; ++l) ops.push_back(DiffOperator::partial(l));                 // 15..18
  for (int m = 0; m < 4; ++m)
    for (int n = m; n < 4; ++n) ops.push_back(DiffOperator::derivative(second(m, n)));  // 19..28
  for (const auto& op : ops)
    if (op.order() > jet.order())
      throw BudgetError("commutation check needs jet order " + std::to_string(op.order()));
  OperatorBank bank(jet, ops);
  const GridSpec& g = jet.grid();

  const auto sums = parallel::pairwise_sum_blocks(
      g.size(), 2, [&](std::size_t lo, std::size_t hi, std::span<double> acc) {
        thread_local std::vector<double> buf;
        const std::size_t s = hi - lo;
        if (buf.size() < ops.size() * s) buf.resize(ops.size() * s);
        bank.evaluate_block(lo, hi, std::span<double>(buf.data(), ops.size() * s));
        acc[0] = acc[1] = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
          const double* v = buf.data() + i;
          double rhs = 0.0;
          for (int l = 0; l < 4; ++l)
            for (int m = 0; m < 4; ++m)
              for (int n = 0; n < 4; ++n) {
                const int p = pair_slot(m, n);
                const double c = b(l, m, n), cd = bd(l, m, n);
                if (c != 0.0)
                  rhs += c * (v[(1 + l) * s] * v[(19 + p) * s] + v[(15 + l) * s] * v[(5 + p) * s]);
                if (cd != 0.0) rhs += cd * v[(15 + l) * s] * v[(19 + p) * s];
              }
          const double box = v[0];
          acc[0] += (box - rhs) * (box - rhs);
          acc[1] += box * box;
        }
      });
  const double dv = g.cell_volume();
  return CommutationResidual{std::sqrt(sums[0] * dv), std::sqrt(sums[1] * dv)};
}

double lorentz_identity_error(const SpacetimeJet& jet) {
  std::vector<DiffOperator> ops;
  for (int l = 0; l < 4; ++l) ops.push_back(DiffOperator::partial(l));
  ops.push_back(DiffOperator::generator(kScaling));
  for (int k = kL1; k <= kL3; ++k) ops.push_back(DiffOperator::generator(k));
  OperatorBank bank(jet, ops);
  const GridSpec& g = jet.grid();
  const double t = jet.center_time();
  const double r_lo = std::max((t + 1.0) / 2.0, 2.0 * g.h);
  return max_over_nodes(bank, [&](std::size_t i, const double* v, std::size_t s) {
    const auto x = g.position(i);
    const double r = radius(x);
    if (r < r_lo) return 0.0;
    const double dr = (x[0] * v[1 * s] + x[1] * v[2 * s] + x[2] * v[3 * s]) / r;
    const double lhs = v[0] + dr;
    const double lr = (x[0] * v[5 * s] + x[1] * v[6 * s] + x[2] * v[7 * s]) / r;
    const double rhs = (v[4 * s] + lr) / (t + r);
    return std::abs(lhs - rhs);
  });
}

double klainerman_ratio(const SpacetimeJet& jet) {
  const auto indices = enumerate_multiindices(2);
  std::vector<DiffOperator> ops;
  for (const auto& a : indices) ops.push_back(DiffOperator::product(a));
  OperatorBank bank(jet, ops);
  const GridSpec& g = jet.grid();
  const double t = jet.center_time();
  const std::size_t w = ops.size();
  const auto sums = parallel::pairwise_sum_blocks(
      g.size(), w, [&](std::size_t lo, std::size_t hi, std::span<double> acc) {
        thread_local std::vector<double> buf;
        const std::size_t s = hi - lo;
        if (buf.size() < w * s) buf.resize(w * s);
        bank.evaluate_block(lo, hi, std::span<double>(buf.data(), w * s));
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t k = 0; k < w; ++k)
          for (std::size_t i = 0; i < s; ++i) acc[k] += buf[k * s + i] * buf[k * s + i];
      });
  double den = 0.0;
  for (double v : sums) den += std::sqrt(v * g.cell_volume());
  const auto& u = jet.center();
  double num = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = radius(g.position(i));
    num = std::max(num, std::abs(u[i]) * (1.0 + t + r) * std::sqrt(1.0 + std::abs(t - r)));
  }
  return safe_ratio(num, den);
}

// --- bump families ----------------------------------------------------------------

double BumpField::value(double x1, double x2, double x3) const noexcept {
  double acc = 0.0;
  for (const auto& b : bumps) {
    const double d1 = x1 - b.center[0], d2 = x2 - b.center[1], d3 = x3 - b.center[2];
    const double z = (d1 * d1 + d2 * d2 + d3 * d3) / (b.R * b.R);
    if (z < 1.0) {
      const double w = 1.0 - z;
      acc += b.amplitude * w * w * w * w;
    }
  }
  return acc;
}

double BumpField::linear_solution(double t, double x1, double x2, double x3) const {
  double acc = 0.0;
  for (const auto& b : bumps) {
    const double d1 = x1 - b.center[0], d2 = x2 - b.center[1], d3 = x3 - b.center[2];
    const double r = std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
    if (r > b.R + std::abs(t)) continue;
    const CauchyData unit = make_cauchy_data(b.R, 1.0, Profile::poly_bump);
    acc += b.amplitude * linear_radial_oracle(unit, t, r);
  }
  return acc;
}

double BumpField::support_radius() const noexcept {
  double s = 0.0;
  for (const auto& b : bumps) s = std::max(s, radius(b.center) + b.R);
  return s;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

BumpField random_bump_field(std::mt19937_64& rng, double rho_lo, double rho_hi, double R_lo,
                            double R_hi) {
  BumpField f;
  const int count = 1 + static_cast<int>(uniform01(rng) * 5.0);
  for (int k = 0; k < count; ++k) {
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double rho = rho_lo + (rho_hi - rho_lo) * uniform01(rng);
    Bump b;
    b.center = {rho * s * std::cos(phi), rho * s * std::sin(phi), rho * z};
    b.R = R_lo + (R_hi - R_lo) * uniform01(rng);
    const double mag = 0.5 + uniform01(rng);
    b.amplitude = uniform01(rng) < 0.5 ? -mag : mag;
    f.bumps.push_back(b);
  }
  return f;
}

namespace {

template <class F>
FieldSnapshot sample_parallel(const GridSpec& g, double t, F&& f) {
  FieldSnapshot out(g, t);
  const std::size_t slab = static_cast<std::size_t>(g.n) * g.n;
  parallel::for_chunks(g.size(), slab, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto x = g.position(i);
      out[i] = f(x[0], x[1], x[2]);
    }
  });
  return out;
}

std::vector<FieldSnapshot> linear_window(const GridSpec& grid, const BumpField& f, double t_c,
                                         double dt, int W) {
  std::vector<FieldSnapshot> window;
  for (int j = 0; j < W; ++j) {
    const double t = t_c + (j - W / 2) * dt;
    window.push_back(sample_parallel(
        grid, t, [&](double a, double b, double c) { return f.linear_solution(t, a, b, c); }));
  }
  return window;
}

std::vector<FieldSnapshot> scaled_window(const std::vector<FieldSnapshot>& w, double c) {
  std::vector<FieldSnapshot> out;
  for (const auto& s : w) out.push_back(s.scaled(c));
  return out;
}

std::string describe(const char* what, double level, const BumpField& f) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s=%g bumps=%zu", what, level, f.bumps.size());
  return buf;
}

} // namespace

FieldSnapshot sample_static(const GridSpec& grid, const BumpField& f) {
  return sample_parallel(grid, 0.0, [&](double a, double b, double c) { return f.value(a, b, c); });
}

SpacetimeJet linear_jet(const GridSpec& grid, const BumpField& f, double t_c, double dt, int W) {
  return SpacetimeJet(linear_window(grid, f, t_c, dt, W));
}

RatioStats ratio_stats(std::vector<double> values) {
  RatioStats s;
  s.count = values.size();
  if (values.empty()) return s;
  for (double v : values) s.finite = s.finite && std::isfinite(v);
  std::sort(values.begin(), values.end());
  s.max = values.back();
  const std::size_t m = values.size() / 2;
  s.median = values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
  return s;
}

std::vector<LemmaFamily> run_lemma_families(const LemmaFamilyOptions& options) {
  if (options.n < 17) throw ConfigError("lemma families need n >= 17");
  if (options.members_per_level < 1) throw ConfigError("members_per_level must be >= 1");
  std::mt19937_64 rng(options.seed);
  constexpr double kScale = 7.0;

  LemmaFamily sob{"sobolev", "weighted Sobolev", {}, {}, {}, {}};
  LemmaFamily hardy{"hardy", "Hardy", {}, {}, {}, {}};
  LemmaFamily d1{"decay_n1", "derivative ordering N=1", {}, {}, {}, {}};
  LemmaFamily d2{"decay_n2", "derivative ordering N=2", {}, {}, {}, {}};
  LemmaFamily nf{"null_form", "null form pointwise", {}, {}, {}, {}};
  LemmaFamily lid{"lorentz_identity", "(d_t + d_r) identity error", {}, {}, {}, {}};
  LemmaFamily kl{"klainerman", "Klainerman sup bound (diagnostic)", {}, {}, {}, {}};

  // Static families on [-11, 11]^3.
  const GridSpec gs = GridSpec::make(options.n, 11.0);
  for (double rho : {2.0, 4.0, 8.0})
    for (int m = 0; m < options.members_per_level; ++m) {
      const BumpField f = random_bump_field(rng, rho, rho, 1.25, 2.0);
      const FieldSnapshot u = sample_static(gs, f);
      sob.members.push_back(describe("rho", rho, f));
      sob.ratios.push_back(weighted_sobolev_ratio(u));
      sob.scaled_ratios.push_back(weighted_sobolev_ratio(u.scaled(kScale)));
    }
  constexpr double kHardyR = 2.0;
  for (double t : {2.0, 4.0, 8.0})
    for (int m = 0; m < options.members_per_level; ++m) {
      const BumpField f = random_bump_field(rng, t - 1.0, t, 1.0, kHardyR);
      const FieldSnapshot u = sample_static(gs, f);
      hardy.members.push_back(describe("t", t, f));
      hardy.ratios.push_back(hardy_ratio(u, t, kHardyR));
      hardy.scaled_ratios.push_back(hardy_ratio(u.scaled(kScale), t, kHardyR));
    }

  // Space-time families: linear waves from bumps near the origin on [-7.5, 7.5]^3.
  const GridSpec gt = GridSpec::make(options.n, 7.5);
  const double dt = 0.4 * gt.h;
  const NullFormTensor q0 = canonical_tensor(CanonicalKind::q0_quasilinear);
  for (double t : {1.0, 2.0, 3.0})
    for (int m = 0; m < options.members_per_level; ++m) {
      const BumpField f = random_bump_field(rng, 0.0, 1.5, 1.0, 1.5);
      const auto window = linear_window(gt, f, t, dt, 9);
      const SpacetimeJet jet(window);
      const SpacetimeJet jet7(scaled_window(window, kScale));
      const std::string label = describe("t", t, f);
      for (LemmaFamily* fam : {&d1, &d2, &nf, &lid, &kl}) fam->members.push_back(label);
      d1.ratios.push_back(derivative_ratio(jet, 1));
      d1.scaled_ratios.push_back(derivative_ratio(jet7, 1));
      d2.ratios.push_back(derivative_ratio(jet, 2));
      d2.scaled_ratios.push_back(derivative_ratio(jet7, 2));
      nf.ratios.push_back(nullform_ratio(jet, q0));
      nf.scaled_ratios.push_back(nullform_ratio(jet7, q0));
      lid.ratios.push_back(lorentz_identity_error(jet));
      lid.scaled_ratios.push_back(lorentz_identity_error(jet7) / kScale);
      kl.ratios.push_back(klainerman_ratio(jet));
      kl.scaled_ratios.push_back(klainerman_ratio(jet7));
    }

  std::vector<LemmaFamily> out{d1, d2, sob, nf, hardy, lid, kl};
  for (auto& fam : out) fam.stats = ratio_stats(fam.ratios);
  return out;
}

} // namespace nullwave
