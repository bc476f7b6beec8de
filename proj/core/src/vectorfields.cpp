#include "nullwave/vectorfields.hpp"

#include "nullwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace nullwave {

namespace {

constexpr const char* kNames[kGeneratorCount] = {"dt", "d1", "d2", "d3", "Omega1", "Omega2",
                                                 "Omega3", "L1", "L2", "L3", "S"};

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double falling(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (n - i);
  return r;
}

DerivIndex unit_deriv(int mu) {
  DerivIndex d{};
  d[mu] = 1;
  return d;
}

Monomial unit_mono(int mu) {
  Monomial m{};
  m[mu] = 1;
  return m;
}

} // namespace

const char* generator_name(int k) {
  if (k < 0 || k >= kGeneratorCount) throw Error("generator id out of range");
  return kNames[k];
}

// --- MultiIndex ----------------------------------------------------------------

MultiIndex MultiIndex::unit(int k) {
  if (k < 0 || k >= kGeneratorCount) throw Error("generator id out of range");
  MultiIndex a;
  a.exponents[k] = 1;
  return a;
}

int MultiIndex::order() const noexcept {
  int s = 0;
  for (int e : exponents) s += e;
  return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  MultiIndex r;
  for (int k = 0; k < kGeneratorCount; ++k) r.exponents[k] = exponents[k] + o.exponents[k];
  return r;
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (int k = 0; k < kGeneratorCount; ++k) {
    if (k) s += ',';
    s += std::to_string(exponents[k]);
  }
  return s + ")";
}

namespace {

void enumerate_grade(int remaining, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == kGeneratorCount - 1) {
    cur.exponents[pos] = remaining;
    out.push_back(cur);
    cur.exponents[pos] = 0;
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur.exponents[pos] = e;
    enumerate_grade(remaining - e, pos + 1, cur, out);
  }
  cur.exponents[pos] = 0;
}

} // namespace

std::vector<MultiIndex> enumerate_multiindices(int max_order) {
  std::vector<MultiIndex> out;
  for (int g = 0; g <= max_order; ++g) {
    MultiIndex cur;
    enumerate_grade(g, 0, cur, out);
  }
  return out;
}

void write_multiindices(std::ostream& out, std::span<const MultiIndex> list) {
  for (const auto& a : list) out << a.order() << ' ' << a.to_string() << '\n';
}

// --- DiffOperator ----------------------------------------------------------------

void DiffOperator::add(const DerivIndex& d, const Monomial& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(Key{d, m}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

DiffOperator DiffOperator::identity() {
  DiffOperator op;
  op.add(DerivIndex{}, Monomial{}, 1.0);
  return op;
}

DiffOperator DiffOperator::partial(int mu) {
  if (mu < 0 || mu > 3) throw Error("partial index must be 0..3");
  DiffOperator op;
  op.add(unit_deriv(mu), Monomial{}, 1.0);
  return op;
}

DiffOperator DiffOperator::generator(int k) {
  DiffOperator op;
  switch (k) {
  case kDt:
  case kD1:
  case kD2:
  case kD3:
    return partial(k);
  case kOmega1: // x2 d3 - x3 d2
    op.add(unit_deriv(3), unit_mono(2), 1.0);
    op.add(unit_deriv(2), unit_mono(3), -1.0);
    return op;
  case kOmega2: // x3 d1 - x1 d3
    op.add(unit_deriv(1), unit_mono(3), 1.0);
    op.add(unit_deriv(3), unit_mono(1), -1.0);
    return op;
  case kOmega3: // x1 d2 - x2 d1
    op.add(unit_deriv(2), unit_mono(1), 1.0);
    op.add(unit_deriv(1), unit_mono(2), -1.0);
    return op;
  case kL1:
  case kL2:
  case kL3: { // t d_i + x_i d_t
    const int i = k - kL1 + 1;
    op.add(unit_deriv(i), unit_mono(0), 1.0);
    op.add(unit_deriv(0), unit_mono(i), 1.0);
    return op;
  }
  case kScaling: // t d_t + x . grad
    for (int mu = 0; mu < 4; ++mu) op.add(unit_deriv(mu), unit_mono(mu), 1.0);
    return op;
  default:
    throw Error("generator id out of range");
  }
}

DiffOperator DiffOperator::product(const MultiIndex& a) {
  DiffOperator op = identity();
  for (int k = kGeneratorCount - 1; k >= 0; --k) {
    if (a.exponents[k] < 0) throw Error("negative multi-index exponent");
    const DiffOperator g = generator(k);
    for (int rep = 0; rep < a.exponents[k]; ++rep) op = compose(g, op);
  }
  return op;
}

DiffOperator DiffOperator::derivative(const DerivIndex& d) {
  DiffOperator op;
  op.add(d, Monomial{}, 1.0);
  return op;
}

DiffOperator DiffOperator::box() {
  DiffOperator op;
  DerivIndex d{};
  d[0] = 2;
  op.add(d, Monomial{}, 1.0);
  for (int i = 1; i <= 3; ++i) {
    DerivIndex di{};
    di[i] = 2;
    op.add(di, Monomial{}, -1.0);
  }
  return op;
}

DiffOperator compose(const DiffOperator& outer, const DiffOperator& inner) {
  DiffOperator out;
  for (const auto& [ko, co] : outer.terms_) {
    const auto& [alpha, mo] = ko;
    for (const auto& [ki, ci] : inner.terms_) {
      const auto& [beta, mi] = ki;
      // D^alpha (z^mi D^beta w) = sum_gamma C(alpha, gamma) D^gamma(z^mi) D^(alpha-gamma+beta) w
      for (int g0 = 0; g0 <= std::min<int>(alpha[0], mi[0]); ++g0)
        for (int g1 = 0; g1 <= std::min<int>(alpha[1], mi[1]); ++g1)
          for (int g2 = 0; g2 <= std::min<int>(alpha[2], mi[2]); ++g2)
            for (int g3 = 0; g3 <= std::min<int>(alpha[3], mi[3]); ++g3) {
              const int g[4] = {g0, g1, g2, g3};
              double c = co * ci;
              DerivIndex d{};
              Monomial m{};
              for (int mu = 0; mu < 4; ++mu) {
                c *= binomial(alpha[mu], g[mu]) * falling(mi[mu], g[mu]);
                d[mu] = static_cast<std::uint8_t>(alpha[mu] - g[mu] + beta[mu]);
                m[mu] = static_cast<std::uint8_t>(mo[mu] + mi[mu] - g[mu]);
              }
              out.add(d, m, c);
            }
    }
  }
  return out;
}

DiffOperator operator+(const DiffOperator& a, const DiffOperator& b) {
  DiffOperator out = a;
  for (const auto& [k, c] : b.terms_) out.add(k.first, k.second, c);
  return out;
}

DiffOperator DiffOperator::scaled(double c) const {
  DiffOperator out;
  for (const auto& [k, v] : terms_) out.add(k.first, k.second, v * c);
  return out;
}

int DiffOperator::order() const noexcept {
  int o = 0;
  for (const auto& [k, c] : terms_) o = std::max(o, total(k.first));
  return o;
}

int DiffOperator::coefficient_degree() const noexcept {
  int o = 0;
  for (const auto& [k, c] : terms_) o = std::max(o, k.second[0] + k.second[1] + k.second[2] + k.second[3]);
  return o;
}

std::map<Monomial, double>
DiffOperator::apply_to_polynomial(const std::map<Monomial, double>& p) const {
  std::map<Monomial, double> out;
  for (const auto& [key, c] : terms_) {
    const auto& [d, m] = key;
    for (const auto& [pm, pc] : p) {
      double v = c * pc;
      Monomial r{};
      bool zero = false;
      for (int mu = 0; mu < 4; ++mu) {
        if (d[mu] > pm[mu]) {
          zero = true;
          break;
        }
        v *= falling(pm[mu], d[mu]);
        r[mu] = static_cast<std::uint8_t>(pm[mu] - d[mu] + m[mu]);
      }
      if (zero || v == 0.0) continue;
      out[r] += v;
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0.0 ? out.erase(it) : std::next(it);
  return out;
}

// --- SpacetimeJet ------------------------------------------------------------------

std::vector<double> fornberg_weights(int k, double x0, std::span<const double> xs) {
  const int n = static_cast<int>(xs.size());
  if (k < 0 || n <= k) throw BudgetError("not enough stencil points for derivative order");
  std::vector<std::vector<double>> c(n, std::vector<double>(k + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, k);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int m = mn; m >= 1; --m)
          c[i][m] = c1 * (m * c[i - 1][m - 1] - c5 * c[i - 1][m]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int m = mn; m >= 1; --m) c[j][m] = (c4 * c[j][m] - m * c[j][m - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][k];
  return w;
}

int SpacetimeJet::max_order_for_window(int w) noexcept {
  int order = -1;
  for (int k = 0; k < 64; ++k)
    if (w >= 2 * ((k + 1) / 2) + 5) order = k;
  return order;
}

SpacetimeJet::SpacetimeJet(std::vector<FieldSnapshot> window, int order)
    : window_(std::move(window)) {
  const int w = static_cast<int>(window_.size());
  if (w < 5 || w % 2 == 0) throw ConfigError("jet window must hold an odd number >= 5 of snapshots");
  for (const auto& s : window_)
    if (!(s.grid() == window_.front().grid())) throw ConfigError("jet snapshots on different grids");
  dt_ = (window_.back().t() - window_.front().t()) / (w - 1);
  if (!(dt_ > 0.0)) throw ConfigError("jet snapshots must have increasing times");
  for (int j = 1; j < w; ++j) {
    const double step = window_[j].t() - window_[j - 1].t();
    if (std::abs(step - dt_) > 1e-9 * dt_) throw ConfigError("jet snapshots are not uniformly spaced");
  }
  const int max_order = max_order_for_window(w);
  order_ = order < 0 ? max_order : order;
  if (order_ > max_order)
    throw BudgetError("window of " + std::to_string(w) + " snapshots cannot support jet order " +
                      std::to_string(order_));
}

SpacetimeJet SpacetimeJet::static_field(FieldSnapshot f, int spatial_order) {
  SpacetimeJet jet;
  jet.window_.push_back(std::move(f));
  jet.dt_ = 0.0;
  jet.order_ = spatial_order;
  return jet;
}

void SpacetimeJet::check_budget(const DerivIndex& d) const {
  if (total(d) > order_)
    throw BudgetError("derivative of total order " + std::to_string(total(d)) +
                      " exceeds jet order " + std::to_string(order_));
  if (is_static() && d[0] > 0) throw BudgetError("static jet has no time derivatives");
}

std::vector<double> SpacetimeJet::temporal_weights(int k) const {
  const int w = window_size();
  const int m = w / 2;
  std::vector<double> w_out(w, 0.0);
  if (k == 0) {
    w_out[m] = 1.0;
    return w_out;
  }
  std::vector<double> offsets(w);
  for (int j = 0; j < w; ++j) offsets[j] = j - m;
  auto unit = fornberg_weights(k, 0.0, offsets);
  const double scale = std::pow(dt_, -k);
  for (int j = 0; j < w; ++j) w_out[j] = unit[j] * scale;
  return w_out;
}

void SpacetimeJet::require(const std::vector<DerivIndex>& ds) const {
  // Group missing entries by spatial part; each spatial derivative of each
  // window level is computed once and scattered into every time order.
  std::map<std::array<std::uint8_t, 3>, std::vector<int>> by_beta;
  for (const auto& d : ds) {
    check_budget(d);
    if (cache_.count(d)) continue;
    auto& ks = by_beta[{d[1], d[2], d[3]}];
    if (std::find(ks.begin(), ks.end(), d[0]) == ks.end()) ks.push_back(d[0]);
  }
  if (by_beta.empty()) return;

  const GridSpec& g = grid();
  const std::size_t N = g.size();
  const int w = window_size();
  std::map<int, std::vector<double>> weights;
  for (const auto& [beta, ks] : by_beta)
    for (int k : ks)
      if (!weights.count(k)) weights[k] = temporal_weights(k);
  for (const auto& [beta, ks] : by_beta)
    for (int k : ks) cache_[DerivIndex{static_cast<std::uint8_t>(k), beta[0], beta[1], beta[2]}]
                         .assign(N, 0.0);

  for (int j = 0; j < w; ++j) {
    bool needed = false;
    for (const auto& [beta, ks] : by_beta)
      for (int k : ks) needed = needed || weights[k][j] != 0.0;
    if (!needed) continue;
    // Spatial derivatives of level j, composed axis 1 first, then 2, then 3.
    std::map<std::array<std::uint8_t, 3>, std::vector<double>> level;
    auto spatial = [&](auto&& self, const std::array<std::uint8_t, 3>& beta) -> const std::vector<double>& {
      if (auto it = level.find(beta); it != level.end()) return it->second;
      if (beta[0] == 0 && beta[1] == 0 && beta[2] == 0) {
        const auto v = window_[j].values();
        return level.emplace(beta, std::vector<double>(v.begin(), v.end())).first->second;
      }
      int axis = beta[2] ? 2 : (beta[1] ? 1 : 0);
      auto parent = beta;
      --parent[axis];
      const auto& src = self(self, parent);
      std::vector<double> dst(N);
      d1_into(src, dst, g, axis + 1);
      return level.emplace(beta, std::move(dst)).first->second;
    };
    for (const auto& [beta, ks] : by_beta) {
      const auto& field = spatial(spatial, beta);
      for (int k : ks) {
        const double wj = weights[k][j];
        if (wj == 0.0) continue;
        auto& acc = cache_[DerivIndex{static_cast<std::uint8_t>(k), beta[0], beta[1], beta[2]}];
        for (std::size_t i = 0; i < N; ++i) acc[i] += wj * field[i];
      }
    }
  }
}

std::span<const double> SpacetimeJet::derivative(const DerivIndex& d) const {
  if (auto it = cache_.find(d); it != cache_.end()) return it->second;
  require({d});
  return cache_.at(d);
}

// --- OperatorBank ------------------------------------------------------------------

OperatorBank::OperatorBank(const SpacetimeJet& jet, const std::vector<DiffOperator>& ops)
    : jet_(&jet) {
  std::vector<DerivIndex> needed;
  for (const auto& op : ops)
    for (const auto& [key, c] : op.terms()) needed.push_back(key.first);
  jet.require(needed);

  const double tc = jet.center_time();
  std::map<std::array<std::uint8_t, 3>, int> mono_ids;
  ops_.reserve(ops.size());
  for (const auto& op : ops) {
    // Fold powers of the centre time into the coefficient; merge terms that
    // then share a derivative field and spatial monomial.
    std::map<std::pair<DerivIndex, std::array<std::uint8_t, 3>>, double> folded;
    for (const auto& [key, c] : op.terms()) {
      const auto& [d, m] = key;
      folded[{d, {m[1], m[2], m[3]}}] += c * std::pow(tc, m[0]);
    }
    std::vector<Term> terms;
    for (const auto& [key, c] : folded) {
      if (c == 0.0) continue;
      auto [it, inserted] = mono_ids.try_emplace(key.second, static_cast<int>(monos_.size()));
      if (inserted) monos_.push_back(key.second);
      terms.push_back(Term{jet.derivative(key.first).data(), it->second, c});
    }
    ops_.push_back(std::move(terms));
  }
}

void OperatorBank::evaluate_block(std::size_t lo, std::size_t hi, std::span<double> out) const {
  const std::size_t b = hi - lo;
  const GridSpec& g = jet_->grid();
  std::vector<double> mono(monos_.size() * b);
  std::vector<double> x1(b), x2(b), x3(b);
  for (std::size_t i = 0; i < b; ++i) {
    const auto x = g.position(lo + i);
    x1[i] = x[0];
    x2[i] = x[1];
    x3[i] = x[2];
  }
  for (std::size_t m = 0; m < monos_.size(); ++m) {
    const auto e = monos_[m];
    double* dst = mono.data() + m * b;
    for (std::size_t i = 0; i < b; ++i) {
      double v = 1.0;
      for (int p = 0; p < e[0]; ++p) v *= x1[i];
      for (int p = 0; p < e[1]; ++p) v *= x2[i];
      for (int p = 0; p < e[2]; ++p) v *= x3[i];
      dst[i] = v;
    }
  }
  for (std::size_t op = 0; op < ops_.size(); ++op) {
    double* dst = out.data() + op * b;
    std::fill(dst, dst + b, 0.0);
    for (const Term& t : ops_[op]) {
      const double* f = t.field + lo;
      const double* mv = mono.data() + static_cast<std::size_t>(t.mono) * b;
      const double c = t.coef;
      for (std::size_t i = 0; i < b; ++i) dst[i] += c * mv[i] * f[i];
    }
  }
}

FieldSnapshot OperatorBank::field(std::size_t op) const {
  const GridSpec& g = jet_->grid();
  FieldSnapshot out(g, jet_->center_time());
  const std::size_t N = g.size();
  constexpr std::size_t kBlock = 256;
  std::vector<double> buf(ops_.size() * kBlock);
  for (std::size_t lo = 0; lo < N; lo += kBlock) {
    const std::size_t hi = std::min(N, lo + kBlock);
    const std::size_t b = hi - lo;
    evaluate_block(lo, hi, std::span<double>(buf.data(), ops_.size() * b));
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(op * b),
              buf.begin() + static_cast<std::ptrdiff_t>((op + 1) * b), out.data() + lo);
  }
  return out;
}

FieldSnapshot apply_generator(int k, const SpacetimeJet& jet) {
  return OperatorBank(jet, {DiffOperator::generator(k)}).field(0);
}

FieldSnapshot apply_multi(const MultiIndex& a, const SpacetimeJet& jet) {
  if (a.order() > jet.order())
    throw BudgetError("|a| = " + std::to_string(a.order()) + " exceeds jet order " +
                      std::to_string(jet.order()));
  if (a.order() == 0) {
    FieldSnapshot u = jet.center();
    return u;
  }
  return OperatorBank(jet, {DiffOperator::product(a)}).field(0);
}

} // namespace nullwave
