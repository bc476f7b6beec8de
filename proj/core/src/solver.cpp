#include "nullwave/solver.hpp"

#include "nullwave/errors.hpp"
#include "nullwave/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nullwave {

Profile parse_profile(const std::string& name) {
  if (name == "poly_bump") return Profile::poly_bump;
  if (name == "poly_bump8") return Profile::poly_bump8;
  if (name == "gauss_truncated") return Profile::gauss_truncated;
  throw ConfigError("unknown profile '" + name + "'");
}

const char* profile_name(Profile p) {
  switch (p) {
    case Profile::poly_bump: return "poly_bump";
    case Profile::poly_bump8: return "poly_bump8";
    case Profile::gauss_truncated: return "gauss_truncated";
  }
  return "?";
}

double CauchyData::shape(double rho) const noexcept {
  const double z = rho * rho / (R * R);
  if (z >= 1.0) return 0.0;
  const double w = 1.0 - z;
  if (profile == Profile::poly_bump) return w * w * w * w;
  if (profile == Profile::poly_bump8) {
    const double w4 = w * w * w * w;
    return w4 * w4;
  }
  return std::exp(-1.0 / w);
}

double CauchyData::shape_derivative(double rho) const noexcept {
  const double z = rho * rho / (R * R);
  if (z >= 1.0) return 0.0;
  const double w = 1.0 - z;
  const double dz = 2.0 * rho / (R * R);
  if (profile == Profile::poly_bump) return -4.0 * w * w * w * dz;
  if (profile == Profile::poly_bump8) {
    const double w3 = w * w * w;
    return -8.0 * w3 * w3 * w * dz;
  }
  return -std::exp(-1.0 / w) / (w * w) * dz;
}

double CauchyData::phi_at(double x1, double x2, double x3) const noexcept {
  const double d1 = x1 - center[0], d2 = x2 - center[1], d3 = x3 - center[2];
  return phi(std::sqrt(d1 * d1 + d2 * d2 + d3 * d3));
}

double CauchyData::psi_at(double x1, double x2, double x3) const noexcept {
  const double d1 = x1 - center[0], d2 = x2 - center[1], d3 = x3 - center[2];
  return psi(std::sqrt(d1 * d1 + d2 * d2 + d3 * d3));
}

CauchyData make_cauchy_data(double R, double eps, Profile profile, double psi_eps) {
  if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError("support radius R must be positive");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("amplitude eps must be >= 0");
  if (!(psi_eps >= 0.0) || !std::isfinite(psi_eps)) throw ConfigError("psi amplitude must be >= 0");
  CauchyData d;
  d.R = R;
  d.eps = eps;
  d.psi_eps = psi_eps;
  d.profile = profile;
  return d;
}

void check_data_fits(const CauchyData& data, const GridSpec& grid, int pad) {
  const double offset = std::sqrt(data.center[0] * data.center[0] + data.center[1] * data.center[1] +
                                   data.center[2] * data.center[2]);
  if (offset + data.R >= grid.L - pad * grid.h)
    throw ConfigError("data support reaches the padded boundary (R + |center| >= L - pad*h)");
}

namespace {

// int_0^rho s psi(s) ds, even in rho.
double psi_moment(const CauchyData& d, double rho) {
  const double a = std::min(std::abs(rho), d.R);
  if (d.psi_eps == 0.0 || a == 0.0) return 0.0;
  if (d.profile != Profile::gauss_truncated) {
    const int p = d.profile == Profile::poly_bump ? 4 : 8;
    const double w = 1.0 - a * a / (d.R * d.R);
    return d.psi_eps * d.R * d.R / (2.0 * (p + 1)) * (1.0 - std::pow(w, p + 1));
  }
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate([&](double s) { return s * d.psi(s); }, 0.0, a, 12,
                                              1e-15);
}

} // namespace

double linear_radial_oracle(const CauchyData& data, double t, double r) {
  if (!data.is_radial()) throw ConfigError("linear radial oracle needs data centred at the origin");
  r = std::abs(r);
  auto w0 = [&](double rho) { return rho * data.phi(rho); };
  if (r < 1e-7) {
    const double dw0 = data.phi(t) + t * data.eps * data.shape_derivative(t);
    return dw0 + t * data.psi(t);
  }
  const double wave = (w0(r + t) + w0(r - t)) / (2.0 * r);
  const double source = (psi_moment(data, r + t) - psi_moment(data, r - t)) / (2.0 * r);
  return wave + source;
}

// --- right-hand side ---------------------------------------------------------

QuasilinearOperator::QuasilinearOperator(const GridSpec& grid, const NullFormTensor& b,
                                         LaplacianKind laplacian)
    : grid_(grid), b_(b), laplacian_(laplacian) {
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        if (b(l, m, n) == 0.0) continue;
        need_du_[l] = true;
        if (m == 0 && n == 0) continue;
        const int lo = std::min(m, n), hi = std::max(m, n);
        if (lo == 0)
          need_dv_[hi] = true;
        else
          need_dudu_[lo][hi] = true;
      }
  const std::size_t N = grid.size();
  lap_.assign(N, 0.0);
  scratch_.assign(2 * N, 0.0);
  for (int i = 1; i <= 3; ++i) {
    bool first_needed = need_du_[i];
    for (int j = 1; j <= 3; ++j)
      if (need_dudu_[std::min(i, j)][std::max(i, j)]) first_needed = true;
    if (first_needed) du_[i].assign(N, 0.0);
    if (need_dv_[i]) dv_[i].assign(N, 0.0);
    for (int j = i; j <= 3; ++j)
      if (need_dudu_[i][j]) dd_[i][j].assign(N, 0.0);
  }
}

QuasilinearOperator::Margin QuasilinearOperator::evaluate(std::span<const double> u,
                                                          std::span<const double> v,
                                                          std::span<double> dvdt) {
  const GridSpec& g = grid_;
  const std::size_t N = g.size();
  laplacian_into(u, lap_, g, laplacian_, scratch_);

  for (int i = 1; i <= 3; ++i) {
    if (!du_[i].empty()) d1_into(u, du_[i], g, i);
    if (!dv_[i].empty()) d1_into(v, dv_[i], g, i);
  }
  for (int i = 1; i <= 3; ++i)
    for (int j = i; j <= 3; ++j) {
      if (dd_[i][j].empty()) continue;
      if (i == j && laplacian_ == LaplacianKind::compact)
        d2_compact_into(u, dd_[i][j], g, i);
      else
        d1_into(du_[j], dd_[i][j], g, i);
    }

  // Active products: coefficient * d_l u * (second derivative field).
  struct Active {
    int l;
    const double* second;
    double coef;
  };
  std::vector<Active> active;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = m; n < 4; ++n) {
        if (m == 0 && n == 0) continue;
        const double c = b_(l, m, n) * (m == n ? 1.0 : 2.0);
        if (c == 0.0) continue;
        const double* second = m == 0 ? dv_[n].data() : dd_[m][n].data();
        active.push_back({l, second, c});
      }
  double b00[4];
  bool quasilinear = false;
  for (int l = 0; l < 4; ++l) {
    b00[l] = b_(l, 0, 0);
    quasilinear = quasilinear || b00[l] != 0.0;
  }
  const double* dl[4] = {v.data(), du_[1].empty() ? nullptr : du_[1].data(),
                         du_[2].empty() ? nullptr : du_[2].data(),
                         du_[3].empty() ? nullptr : du_[3].data()};

  if (active.empty() && !quasilinear) {
    std::copy(lap_.begin(), lap_.end(), dvdt.begin());
    return Margin{1.0, 0};
  }

  const std::size_t chunk = static_cast<std::size_t>(g.n) * g.n;
  const std::size_t nchunks = (N + chunk - 1) / chunk;
  std::vector<Margin> margins(nchunks);
  parallel::for_chunks(N, chunk, [&](std::size_t lo, std::size_t hi) {
    Margin m{std::numeric_limits<double>::infinity(), lo};
    for (std::size_t i = lo; i < hi; ++i) {
      double num = lap_[i];
      for (const Active& a : active) num += a.coef * dl[a.l][i] * a.second[i];
      double den = 1.0;
      if (quasilinear)
        for (int l = 0; l < 4; ++l)
          if (b00[l] != 0.0) den -= b00[l] * dl[l][i];
      if (den < m.min) m = Margin{den, i};
      dvdt[i] = num / den;
    }
    margins[lo / chunk] = m;
  });
  Margin best = margins.front();
  for (const auto& m : margins)
    if (m.min < best.min) best = m;
  return best;
}

RhsResult quasilinear_rhs(const FieldSnapshot& u, const FieldSnapshot& v, const NullFormTensor& b,
                          double delta_hyp, LaplacianKind laplacian) {
  if (!(u.grid() == v.grid())) throw Error("quasilinear_rhs: u and v on different grids");
  QuasilinearOperator op(u.grid(), b, laplacian);
  RhsResult out{v, FieldSnapshot(u.grid(), u.t()), 1.0};
  const auto margin = op.evaluate(u.values(), v.values(), out.dv_dt.values());
  out.min_denom = margin.min;
  if (margin.min < delta_hyp) {
    const auto x = u.grid().position(margin.where);
    throw HyperbolicityLoss(u.t(), x[0], x[1], x[2], margin.min);
  }
  return out;
}

// --- time stepping -------------------------------------------------------------

SimState initial_state(const GridSpec& grid, const CauchyData& data, double dt, int window) {
  if (window < 1) throw ConfigError("history window must be >= 1");
  SimState s;
  s.u = FieldSnapshot::sample(grid, 0.0, [&](double a, double b, double c) { return data.phi_at(a, b, c); });
  s.v = FieldSnapshot::sample(grid, 0.0, [&](double a, double b, double c) { return data.psi_at(a, b, c); });
  s.t = 0.0;
  s.dt = dt;
  s.window = window;
  s.history.push_back(s.u);
  s.history_margin.push_back(std::numeric_limits<double>::quiet_NaN());
  return s;
}

namespace {

void check_margin(const QuasilinearOperator::Margin& m, const GridSpec& g, double t,
                  double delta_hyp) {
  if (m.min < delta_hyp) {
    const auto x = g.position(m.where);
    throw HyperbolicityLoss(t, x[0], x[1], x[2], m.min);
  }
}

} // namespace

void step_rk4_inplace(SimState& state, QuasilinearOperator& op, const StepOptions& options) {
  const GridSpec& g = state.u.grid();
  const std::size_t N = g.size();
  const double dt = state.dt;
  const double t0 = state.t;
  std::span<const double> u0 = state.u.values();
  std::span<const double> v0 = state.v.values();

  std::vector<double> us(N), vs(N), kv(N), au(N), av(N);
  auto eval = [&](std::span<const double> uu, std::span<const double> vv, double t) {
    const auto m = op.evaluate(uu, vv, kv);
    check_margin(m, g, t, options.delta_hyp);
    return m.min;
  };

  const double m1 = eval(u0, v0, t0);
  if (!state.history_margin.empty()) state.history_margin.back() = m1;
  double stage_min = m1;
  for (std::size_t i = 0; i < N; ++i) {
    au[i] = v0[i];
    av[i] = kv[i];
    us[i] = u0[i] + 0.5 * dt * v0[i];
    vs[i] = v0[i] + 0.5 * dt * kv[i];
  }
  stage_min = std::min(stage_min, eval(us, vs, t0 + 0.5 * dt));
  for (std::size_t i = 0; i < N; ++i) {
    au[i] += 2.0 * vs[i];
    av[i] += 2.0 * kv[i];
    us[i] = u0[i] + 0.5 * dt * vs[i];
    vs[i] = v0[i] + 0.5 * dt * kv[i];
  }
  stage_min = std::min(stage_min, eval(us, vs, t0 + 0.5 * dt));
  for (std::size_t i = 0; i < N; ++i) {
    au[i] += 2.0 * vs[i];
    av[i] += 2.0 * kv[i];
    us[i] = u0[i] + dt * vs[i];
    vs[i] = v0[i] + dt * kv[i];
  }
  stage_min = std::min(stage_min, eval(us, vs, t0 + dt));
  for (std::size_t i = 0; i < N; ++i) {
    au[i] += vs[i];
    av[i] += kv[i];
  }
  double* u = state.u.data();
  double* v = state.v.data();
  for (std::size_t i = 0; i < N; ++i) {
    u[i] += dt / 6.0 * au[i];
    v[i] += dt / 6.0 * av[i];
  }

  state.t = t0 + dt;
  state.step += 1;
  state.u.set_t(state.t);
  state.v.set_t(state.t);
  state.min_denom = std::min(state.min_denom, stage_min);
  if (!state.u.all_finite()) throw BlowupError(state.t, "u");
  if (!state.v.all_finite()) throw BlowupError(state.t, "v");

  const double leak = std::max(state.u.max_abs_in_pad(options.pad), state.v.max_abs_in_pad(options.pad));
  state.boundary_leak = std::max(state.boundary_leak, leak);
  state.u.zero_pad(options.pad);
  state.v.zero_pad(options.pad);

  state.history.push_back(state.u);
  state.history_margin.push_back(std::numeric_limits<double>::quiet_NaN());
  while (static_cast<int>(state.history.size()) > state.window) {
    state.history.pop_front();
    state.history_margin.pop_front();
  }
}

SimState step_rk4(const SimState& state, const NullFormTensor& b, const StepOptions& options) {
  QuasilinearOperator op(state.u.grid(), b, options.laplacian);
  SimState next = state;
  step_rk4_inplace(next, op, options);
  return next;
}

double choose_dt(const RunConfig& config, long* steps) {
  if (!(config.cfl > 0.0)) throw ConfigError("cfl must be positive");
  if (!(config.T_final > 0.0)) throw ConfigError("T_final must be positive");
  const double dt_max = config.cfl * config.grid.h;
  const long n = static_cast<long>(std::ceil(config.T_final / dt_max - 1e-12));
  if (steps) *steps = n;
  return config.T_final / static_cast<double>(n);
}

RunResult run(const RunConfig& config, const RunObserver& observer) {
  if (config.s < 1) throw ConfigError("s must be >= 1");
  if (config.sample_every < 1) throw ConfigError("sample_every must be >= 1");
  if (config.pad < 0) throw ConfigError("pad must be >= 0");
  check_data_fits(config.data, config.grid, config.pad);
  const double reach = config.data.R + config.T_final;
  if (reach > config.grid.L - config.pad * config.grid.h)
    throw ConfigError("R + T_final exceeds the padded domain; the wave would reach the boundary");
  const int needed_order = config.s + 1;
  if (config.diagnostics && SpacetimeJet::max_order_for_window(config.window) < needed_order)
    throw ConfigError("history window " + std::to_string(config.window) +
                      " cannot supply derivatives of order " + std::to_string(needed_order) +
                      " needed for s=" + std::to_string(config.s));

  long nsteps = 0;
  const double dt = choose_dt(config, &nsteps);
  RunResult result;
  result.final_state = initial_state(config.grid, config.data, dt, config.window);
  SimState& state = result.final_state;
  QuasilinearOperator op(config.grid, config.b, config.laplacian);
  const StepOptions opts{config.delta_hyp, config.pad, config.laplacian};
  const SampleRequest request{config.s, config.b, config.weighting, config.with_hs, true};
  if (config.track_plain_energy)
    result.plain_energy_series.emplace_back(state.t, plain_energy(state.u, state.v));

  for (long k = 1; k <= nsteps; ++k) {
    const double t_before = state.t;
    try {
      step_rk4_inplace(state, op, opts);
    } catch (const HyperbolicityLoss& e) {
      result.failure = FailureRecord{FailureRecord::Kind::hyperbolicity, e.time(), e.what()};
      break;
    } catch (const BlowupError& e) {
      result.failure = FailureRecord{FailureRecord::Kind::blowup, e.time(), e.what()};
      break;
    }
    const double m = state.history_margin[state.history_margin.size() - 2];
    result.margin_series.emplace_back(t_before, m);
    if (config.track_plain_energy)
      result.plain_energy_series.emplace_back(state.t, plain_energy(state.u, state.v));

    if (config.diagnostics && state.history_full() && state.step % config.sample_every == 0) {
      SpacetimeJet jet(std::vector<FieldSnapshot>(state.history.begin(), state.history.end()));
      const auto sample = sample_energies(jet, request);
      EnergyReport report = to_report(sample, state.history_margin[state.history.size() / 2]);
      if (observer) observer(state, report);
      result.reports.push_back(std::move(report));
    }
  }
  const double scale = std::max(1e-300, state.u.max_abs());
  result.boundary_contact = state.boundary_leak > config.leak_tolerance * scale;
  fill_residuals(result.reports);
  return result;
}

SpacetimeJet solution_jet(const RunConfig& config, double t_c) {
  if (!(t_c > 0.0)) throw ConfigError("jet centre time must be positive");
  if (config.window < 1 || config.window % 2 == 0) throw ConfigError("window must be odd");
  check_data_fits(config.data, config.grid, config.pad);
  RunConfig probe = config;
  probe.T_final = t_c;
  long m = 0;
  const double dt = choose_dt(probe, &m);
  if (m < config.window / 2) throw ConfigError("jet centre time too early for the history window");
  const long total = m + config.window / 2;
  if (config.data.R + total * dt > config.grid.L - config.pad * config.grid.h)
    throw ConfigError("jet window reaches the padded boundary");
  SimState state = initial_state(config.grid, config.data, dt, config.window);
  QuasilinearOperator op(config.grid, config.b, config.laplacian);
  const StepOptions opts{config.delta_hyp, config.pad, config.laplacian};
  for (long k = 0; k < total; ++k) step_rk4_inplace(state, op, opts);
  return SpacetimeJet(std::vector<FieldSnapshot>(state.history.begin(), state.history.end()));
}

} // namespace nullwave
