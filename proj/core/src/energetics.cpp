#include "nullwave/energetics.hpp"

#include "nullwave/errors.hpp"
#include "nullwave/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace nullwave {

GhostWeight ghost_q(double sigma) noexcept {
  return GhostWeight{sigma, std::atan(sigma), 1.0 / (1.0 + sigma * sigma)};
}

namespace {

struct Layout {
  std::vector<MultiIndex> indices;
  std::size_t n_idx = 0;
  bool identity = false;
  bool correction = false;
  bool hs = false;
  int s = 1;
  // operator slots
  std::size_t ops_per_index = 4;
  std::size_t du_base = 0;  // d_lambda u, 4 ops
  std::size_t hs_base = 0;  // Hs operators
  std::size_t hs_count = 0;
  // accumulator slots
  std::size_t acc_E = 0, acc_G = 0, acc_rhs = 0, acc_corr = 0, acc_hs = 0, width = 0;
};

std::vector<std::array<std::uint8_t, 3>> spatial_multi(int max_order) {
  std::vector<std::array<std::uint8_t, 3>> out;
  for (int o = 0; o <= max_order; ++o)
    for (int a = o; a >= 0; --a)
      for (int b = o - a; b >= 0; --b)
        out.push_back({static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                       static_cast<std::uint8_t>(o - a - b)});
  return out;
}

EnergySample run_sample(const SpacetimeJet& jet, std::span<const MultiIndex> indices, int s,
                        const NullFormTensor& b, Weighting weighting, bool with_identity,
                        bool with_correction, bool with_hs) {
  if (s < 1) throw Error("energy order s must be >= 1");
  Layout lay;
  lay.indices.assign(indices.begin(), indices.end());
  lay.n_idx = lay.indices.size();
  lay.identity = with_identity;
  lay.correction = with_correction && !b.is_zero();
  lay.hs = with_hs;
  lay.s = s;
  lay.ops_per_index = with_identity ? 5 : 4;

  std::vector<DiffOperator> ops;
  ops.reserve(lay.n_idx * lay.ops_per_index + 4 + 64);
  for (const auto& a : lay.indices) {
    const DiffOperator p = DiffOperator::product(a);
    for (int mu = 0; mu < 4; ++mu) ops.push_back(compose(DiffOperator::partial(mu), p));
    if (with_identity) ops.push_back(compose(DiffOperator::box(), p));
  }
  lay.du_base = ops.size();
  if (lay.correction)
    for (int mu = 0; mu < 4; ++mu) ops.push_back(DiffOperator::partial(mu));
  lay.hs_base = ops.size();
  if (lay.hs) {
    for (const auto& beta : spatial_multi(s - 1))
      for (int mu = 0; mu < 4; ++mu) {
        DerivIndex d{0, beta[0], beta[1], beta[2]};
        ++d[mu];
        ops.push_back(DiffOperator::derivative(d));
      }
    lay.hs_count = ops.size() - lay.hs_base;
  }

  for (const auto& op : ops)
    if (op.order() > jet.order())
      throw BudgetError("energy of order s=" + std::to_string(s) + " needs jet order " +
                        std::to_string(op.order()) + ", jet has " + std::to_string(jet.order()));

  OperatorBank bank(jet, ops);
  lay.acc_E = 0;
  lay.acc_G = lay.n_idx;
  lay.acc_rhs = 2 * lay.n_idx;
  lay.acc_corr = 3 * lay.n_idx;
  lay.acc_hs = lay.acc_corr + 1;
  lay.width = lay.acc_hs + 1;

  // eta_{nu nu} folded into C_{mu nu} = sum_l B_{l mu nu} d_l u eta_{nu nu}
  const GridSpec& g = jet.grid();
  const double tc = jet.center_time();
  const double r_min = g.h / 2.0;
  const bool ghost = weighting == Weighting::ghost;
  const std::size_t nops = bank.size();
  const std::size_t top_order = static_cast<std::size_t>(s - 1);

  auto leaf = [&](std::size_t lo, std::size_t hi, std::span<double> acc) {
    thread_local std::vector<double> buf;
    const std::size_t bsz = hi - lo;
    if (buf.size() < nops * bsz) buf.resize(nops * bsz);
    bank.evaluate_block(lo, hi, std::span<double>(buf.data(), nops * bsz));
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i = 0; i < bsz; ++i) {
      const auto x = g.position(lo + i);
      const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      double ew = 1.0, qp = 0.0;
      if (ghost) {
        const GhostWeight gw = ghost_q(tc - r);
        ew = std::exp(-gw.q);
        qp = gw.qprime;
      }
      const bool flux_ok = r >= r_min;
      const double inv_r = flux_ok ? 1.0 / r : 0.0;
      double cmat[4][4] = {};
      if (lay.correction) {
        double du[4];
        for (int l = 0; l < 4; ++l) du[l] = buf[(lay.du_base + l) * bsz + i];
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n) {
            double c = 0.0;
            for (int l = 0; l < 4; ++l) c += b(l, m, n) * du[l];
            cmat[m][n] = n == 0 ? c : -c;
          }
      }
      for (std::size_t a = 0; a < lay.n_idx; ++a) {
        const std::size_t base = a * lay.ops_per_index;
        const double w0 = buf[(base + 0) * bsz + i];
        const double w1 = buf[(base + 1) * bsz + i];
        const double w2 = buf[(base + 2) * bsz + i];
        const double w3 = buf[(base + 3) * bsz + i];
        acc[lay.acc_E + a] += 0.5 * (w0 * w0 + w1 * w1 + w2 * w2 + w3 * w3) * ew;
        if (flux_ok && qp != 0.0) {
          const double g1 = w0 * x[0] * inv_r + w1;
          const double g2 = w0 * x[1] * inv_r + w2;
          const double g3 = w0 * x[2] * inv_r + w3;
          acc[lay.acc_G + a] += 0.5 * (g1 * g1 + g2 * g2 + g3 * g3) * ew * qp;
        }
        if (lay.identity) acc[lay.acc_rhs + a] += buf[(base + 4) * bsz + i] * w0 * ew;
        if (lay.correction && static_cast<std::size_t>(lay.indices[a].order()) == top_order) {
          const double dg[4] = {w0, w1, w2, w3};
          double c = 0.0;
          for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n) c += cmat[m][n] * dg[m] * dg[n];
          acc[lay.acc_corr] += 0.5 * c * ew;
        }
      }
      if (lay.hs) {
        double h2 = 0.0;
        for (std::size_t k = 0; k < lay.hs_count; ++k) {
          const double v = buf[(lay.hs_base + k) * bsz + i];
          h2 += v * v;
        }
        acc[lay.acc_hs] += h2;
      }
    }
  };

  const auto sums = parallel::pairwise_sum_blocks(g.size(), lay.width, leaf);
  const double dv = g.cell_volume();
  EnergySample out;
  out.t = tc;
  out.per_index.resize(lay.n_idx);
  for (std::size_t a = 0; a < lay.n_idx; ++a) {
    out.per_index[a] = sums[lay.acc_E + a] * dv;
    out.Es += out.per_index[a];
    out.G += sums[lay.acc_G + a] * dv;
    out.identity_rhs += sums[lay.acc_rhs + a] * dv;
  }
  out.EsTilde = out.Es - sums[lay.acc_corr] * dv;
  out.Hs = sums[lay.acc_hs] * dv;
  return out;
}

} // namespace

double energy_E1(const SpacetimeJet& jet, Weighting weighting) {
  const MultiIndex empty;
  return run_sample(jet, std::span<const MultiIndex>(&empty, 1), 1, NullFormTensor{}, weighting,
                    false, false, false)
      .Es;
}

GeneralizedEnergy energy_Es(const SpacetimeJet& jet, int s, Weighting weighting) {
  if (s < 1) throw Error("energy order s must be >= 1");
  const auto indices = enumerate_multiindices(s - 1);
  return energy_Es(jet, indices, weighting);
}

GeneralizedEnergy energy_Es(const SpacetimeJet& jet, std::span<const MultiIndex> indices,
                            Weighting weighting) {
  int s = 1;
  for (const auto& a : indices) s = std::max(s, a.order() + 1);
  const auto sample = run_sample(jet, indices, s, NullFormTensor{}, weighting, false, false, false);
  return GeneralizedEnergy{sample.Es, {indices.begin(), indices.end()}, sample.per_index};
}

double dissipation_G(const SpacetimeJet& jet, int s, Weighting weighting) {
  if (s < 1) throw Error("energy order s must be >= 1");
  const auto indices = enumerate_multiindices(s - 1);
  return run_sample(jet, indices, s, NullFormTensor{}, weighting, false, false, false).G;
}

double modified_energy(const SpacetimeJet& jet, int s, const NullFormTensor& b,
                       Weighting weighting) {
  if (s < 1) throw Error("energy order s must be >= 1");
  const auto indices = enumerate_multiindices(s - 1);
  return run_sample(jet, indices, s, b, weighting, false, true, false).EsTilde;
}

double hs_energy(const SpacetimeJet& jet, int s) {
  if (s < 1) throw Error("energy order s must be >= 1");
  return run_sample(jet, {}, s, NullFormTensor{}, Weighting::none, false, false, true).Hs;
}

EnergySample sample_energies(const SpacetimeJet& jet, const SampleRequest& request) {
  const auto indices = enumerate_multiindices(request.s - 1);
  return run_sample(jet, indices, request.s, request.b, request.weighting, request.with_identity,
                    true, request.with_hs);
}

double plain_energy(const FieldSnapshot& u, const FieldSnapshot& v) {
  const GridSpec& g = u.grid();
  if (!(g == v.grid())) throw Error("plain_energy: u and v on different grids");
  std::array<std::vector<double>, 3> grad;
  for (int a = 0; a < 3; ++a) {
    grad[a].resize(g.size());
    d1_into(u.values(), grad[a], g, a + 1);
  }
  const double* vv = v.data();
  const double sum = parallel::pairwise_sum(g.size(), [&](std::size_t i) {
    return vv[i] * vv[i] + grad[0][i] * grad[0][i] + grad[1][i] * grad[1][i] +
           grad[2][i] * grad[2][i];
  });
  return 0.5 * sum * g.cell_volume();
}

EnergyReport to_report(const EnergySample& sample, double min_denom) {
  EnergyReport r;
  r.t = sample.t;
  r.Es = sample.Es;
  r.EsTilde = sample.EsTilde;
  r.G = sample.G;
  r.Hs = sample.Hs;
  r.min_denom = min_denom;
  r.identity_rhs = sample.identity_rhs;
  r.per_index = sample.per_index;
  return r;
}

std::vector<double> energy_identity_residuals(std::span<const EnergyReport> series,
                                              bool include_rhs) {
  const std::size_t n = series.size();
  if (n < 3) throw Error("energy identity residual needs at least 3 samples");
  const double spacing = (series.back().t - series.front().t) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(series[i].t - series[i - 1].t - spacing) > 1e-9 * spacing)
      throw Error("energy identity residual needs uniformly spaced samples");
  const std::size_t width = std::min<std::size_t>(5, n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= width / 2 ? i - width / 2 : 0;
    lo = std::min(lo, n - width);
    std::vector<double> ts(width);
    for (std::size_t j = 0; j < width; ++j) ts[j] = series[lo + j].t;
    const auto w = fornberg_weights(1, series[i].t, ts);
    double dE = 0.0;
    for (std::size_t j = 0; j < width; ++j) dE += w[j] * series[lo + j].Es;
    out[i] = std::abs(dE + series[i].G - (include_rhs ? series[i].identity_rhs : 0.0));
  }
  return out;
}

void fill_residuals(std::vector<EnergyReport>& series) {
  if (series.size() < 3) return;
  const auto res = energy_identity_residuals(series);
  for (std::size_t i = 0; i < series.size(); ++i) series[i].residual = res[i];
}

void write_report_csv(std::ostream& out, std::span<const EnergyReport> series) {
  out << "t,Es,EsTilde,G,Hs,residual,min_denom\n";
  char buf[512];
  for (const auto& r : series) {
    std::snprintf(buf, sizeof(buf), "%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e\n", r.t, r.Es,
                  r.EsTilde, r.G, r.Hs, r.residual, r.min_denom);
    out << buf;
  }
}

std::vector<EnergyReport> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,Es,EsTilde,G,Hs,residual,min_denom")
    throw ConfigError("energy report CSV: unexpected header");
  std::vector<EnergyReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    EnergyReport r;
    std::string fields[7];
    for (auto& f : fields)
      if (!(ls >> f)) throw ConfigError("energy report CSV: short row");
    double* dst[7] = {&r.t, &r.Es, &r.EsTilde, &r.G, &r.Hs, &r.residual, &r.min_denom};
    for (int k = 0; k < 7; ++k) *dst[k] = std::stod(fields[k]);
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace nullwave
