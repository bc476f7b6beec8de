#include "nullwave/grid.hpp"

#include "nullwave/errors.hpp"
#include "nullwave/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace nullwave {

GridSpec GridSpec::make(int n, double L) {
  if (n < 17) throw ConfigError("grid needs n >= 17, got " + std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("grid half-extent L must be positive");
  return GridSpec{n, L, 2.0 * L / (n - 1)};
}

int GridSpec::face_distance(std::size_t idx) const noexcept {
  const auto ijk = unravel(idx);
  int d = n;
  for (int a : ijk) d = std::min({d, a, n - 1 - a});
  return d;
}

FieldSnapshot::FieldSnapshot(const GridSpec& grid, double t)
    : grid_(grid), t_(t), values_(grid.size(), 0.0) {}

FieldSnapshot::FieldSnapshot(const GridSpec& grid, double t, std::vector<double> values)
    : grid_(grid), t_(t), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error("snapshot size does not match grid");
}

bool FieldSnapshot::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

double FieldSnapshot::max_abs() const noexcept {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

double FieldSnapshot::max_abs_in_pad(int pad) const noexcept {
  double m = 0.0;
  for (std::size_t idx = 0; idx < values_.size(); ++idx)
    if (grid_.face_distance(idx) < pad) m = std::max(m, std::abs(values_[idx]));
  return m;
}

void FieldSnapshot::zero_pad(int pad) noexcept {
  if (pad <= 0) return;
  const int n = grid_.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool whole_line = i < pad || i >= n - pad || j < pad || j >= n - pad;
      for (int k = 0; k < n; ++k)
        if (whole_line || k < pad || k >= n - pad) values_[grid_.index(i, j, k)] = 0.0;
    }
}

void FieldSnapshot::axpy(double a, const FieldSnapshot& other) {
  if (!(grid_ == other.grid_)) throw Error("axpy on mismatched grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * other.values_[i];
}

FieldSnapshot FieldSnapshot::scaled(double c) const {
  FieldSnapshot out = *this;
  for (double& x : out.values_) x *= c;
  return out;
}

namespace {

// Applies a 5-point stencil along one axis with zero extension, in paired
// form: out = c0 f[0] + c1 (f[+1] + sign f[-1]) + c2 (f[+2] + sign f[-2]).
// sign = -1 makes first differences of constants exactly zero.
void stencil5_axis(std::span<const double> in, std::span<double> out, const GridSpec& g,
                   int axis, double c0, double c1, double c2, double sign) {
  const int n = g.n;
  const double* src = in.data();
  double* dst = out.data();
  const std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
  parallel::for_chunks(static_cast<std::size_t>(n), 1, [&](std::size_t lo, std::size_t hi) {
    for (int i = static_cast<int>(lo); i < static_cast<int>(hi); ++i) {
      for (int j = 0; j < n; ++j) {
        const std::size_t base = g.index(i, j, 0);
        double* o = dst + base;
        if (axis == 3) {
          const double* f = src + base;
          const auto at = [&](int k) { return k >= 0 && k < n ? f[k] : 0.0; };
          for (int k = 0; k < n; ++k)
            o[k] = c0 * f[k] + c1 * (at(k + 1) + sign * at(k - 1)) +
                   c2 * (at(k + 2) + sign * at(k - 2));
          continue;
        }
        const int pos = axis == 1 ? i : j;
        const std::ptrdiff_t stride =
            axis == 1 ? static_cast<std::ptrdiff_t>(n) * n : static_cast<std::ptrdiff_t>(n);
        const auto line = [&](int s) {
          const int pp = pos + s;
          return pp >= 0 && pp < n ? src + base + s * stride : zeros.data();
        };
        const double* f0 = line(0);
        const double* p1 = line(1);
        const double* m1 = line(-1);
        const double* p2 = line(2);
        const double* m2 = line(-2);
        for (int k = 0; k < n; ++k)
          o[k] = c0 * f0[k] + c1 * (p1[k] + sign * m1[k]) + c2 * (p2[k] + sign * m2[k]);
      }
    }
  });
}

void check_axis(int axis) {
  if (axis < 1 || axis > 3) throw Error("axis must be 1, 2 or 3, got " + std::to_string(axis));
}

} // namespace

void d1_into(std::span<const double> in, std::span<double> out, const GridSpec& g, int axis) {
  check_axis(axis);
  const double s = 1.0 / (12.0 * g.h);
  stencil5_axis(in, out, g, axis, 0.0, 8.0 * s, -s, -1.0);
}

void d2_compact_into(std::span<const double> in, std::span<double> out, const GridSpec& g,
                     int axis) {
  check_axis(axis);
  const double s = 1.0 / (12.0 * g.h * g.h);
  stencil5_axis(in, out, g, axis, -30.0 * s, 16.0 * s, -s, 1.0);
}

FieldSnapshot spatial_derivative(const FieldSnapshot& f, int axis, int order) {
  check_axis(axis);
  if (order != 1 && order != 2) throw Error("derivative order must be 1 or 2");
  FieldSnapshot out(f.grid(), f.t());
  d1_into(f.values(), out.values(), f.grid(), axis);
  if (order == 2) {
    FieldSnapshot second(f.grid(), f.t());
    d1_into(out.values(), second.values(), f.grid(), axis);
    return second;
  }
  return out;
}

FieldSnapshot mixed_derivative(const FieldSnapshot& f, int a, int b) {
  check_axis(a);
  check_axis(b);
  if (a > b) std::swap(a, b);
  FieldSnapshot first(f.grid(), f.t()), out(f.grid(), f.t());
  d1_into(f.values(), first.values(), f.grid(), a);
  d1_into(first.values(), out.values(), f.grid(), b);
  return out;
}

void laplacian_into(std::span<const double> in, std::span<double> out, const GridSpec& g,
                    LaplacianKind kind, std::span<double> scratch) {
  const std::size_t N = g.size();
  const std::size_t need = kind == LaplacianKind::composed ? 2 * N : N;
  if (in.size() != N || out.size() != N || scratch.size() < need)
    throw Error("laplacian_into: buffer sizes do not match the grid");
  std::fill(out.begin(), out.end(), 0.0);
  for (int axis = 1; axis <= 3; ++axis) {
    auto tmp = scratch.subspan(0, N);
    if (kind == LaplacianKind::compact) {
      d2_compact_into(in, tmp, g, axis);
    } else {
      auto first = scratch.subspan(N, N);
      d1_into(in, first, g, axis);
      d1_into(first, tmp, g, axis);
    }
    for (std::size_t i = 0; i < N; ++i) out[i] += tmp[i];
  }
}

RadialAngular radial_angular_decompose(const FieldSnapshot& f) {
  const GridSpec& g = f.grid();
  std::array<FieldSnapshot, 3> grad{FieldSnapshot(g, f.t()), FieldSnapshot(g, f.t()),
                                    FieldSnapshot(g, f.t())};
  for (int a = 0; a < 3; ++a) d1_into(f.values(), grad[a].values(), g, a + 1);

  RadialAngular out{FieldSnapshot(g, f.t()),
                    {FieldSnapshot(g, f.t()), FieldSnapshot(g, f.t()), FieldSnapshot(g, f.t())},
                    {}};
  const double r_min = g.h / 2.0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto x = g.position(idx);
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r < r_min) {
      out.excluded.push_back(idx);
      continue;
    }
    const std::array<double, 3> d{grad[0][idx], grad[1][idx], grad[2][idx]};
    out.radial[idx] = (x[0] * d[0] + x[1] * d[1] + x[2] * d[2]) / r;
    // Omega f = x ^ grad f
    const std::array<double, 3> om{x[1] * d[2] - x[2] * d[1], x[2] * d[0] - x[0] * d[2],
                                   x[0] * d[1] - x[1] * d[0]};
    const double inv_r2 = 1.0 / (r * r);
    // -(x / r^2) ^ Omega f
    out.angular[0][idx] = -(x[1] * om[2] - x[2] * om[1]) * inv_r2;
    out.angular[1][idx] = -(x[2] * om[0] - x[0] * om[2]) * inv_r2;
    out.angular[2][idx] = -(x[0] * om[1] - x[1] * om[0]) * inv_r2;
  }
  return out;
}

Integral integrate(const FieldSnapshot& f, const NodeWeight& weight, int pad) {
  const GridSpec& g = f.grid();
  const double* v = f.data();
  Integral out;
  const double sum = parallel::pairwise_sum(g.size(), [&](std::size_t idx) {
    if (v[idx] == 0.0) return 0.0;
    if (!weight) return v[idx];
    const auto x = g.position(idx);
    return weight(x[0], x[1], x[2]) * v[idx];
  });
  out.value = sum * g.cell_volume();
  for (std::size_t idx = 0; idx < g.size() && !out.boundary_contact; ++idx)
    if (v[idx] != 0.0 && g.face_distance(idx) < pad) out.boundary_contact = true;
  return out;
}

void write_snapshot(std::ostream& out, const FieldSnapshot& f, bool binary) {
  const GridSpec& g = f.grid();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g\n", g.n, g.h, g.L, f.t());
  out << buf;
  if (binary) {
    for (double x : f.values()) {
      auto bits = std::bit_cast<std::uint64_t>(x);
      unsigned char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xffu);
      out.write(reinterpret_cast<const char*>(bytes), 8);
    }
    return;
  }
  for (double x : f.values()) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", x);
    out << buf;
  }
}

FieldSnapshot read_snapshot(std::istream& in, bool binary) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("snapshot: missing header");
  std::istringstream hs(header);
  int n = 0;
  double h = 0.0, L = 0.0, t = 0.0;
  if (!(hs >> n >> h >> L >> t)) throw ConfigError("snapshot: header must be 'n h L t'");
  GridSpec g = GridSpec::make(n, L);
  if (std::abs(g.h - h) > 1e-12 * std::abs(h)) throw ConfigError("snapshot: h inconsistent with n, L");
  std::vector<double> values(g.size());
  if (binary) {
    for (double& x : values) {
      unsigned char bytes[8];
      if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ConfigError("snapshot: truncated data");
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
      x = std::bit_cast<double>(bits);
    }
  } else {
    for (double& x : values)
      if (!(in >> x)) throw ConfigError("snapshot: truncated data");
  }
  return FieldSnapshot(g, t, std::move(values));
}

} // namespace nullwave
