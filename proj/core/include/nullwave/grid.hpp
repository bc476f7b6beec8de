#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace nullwave {

/// Uniform node lattice on the cube [-L, L]^3 with n nodes per axis.
/// Nodes are stored x-major: index = (i1 * n + i2) * n + i3.
struct GridSpec {
  int n = 0;
  double L = 0.0;
  double h = 0.0;

  /// Throws ConfigError unless n >= 17 and L > 0.
  static GridSpec make(int n, double L);

  double coord(int i) const noexcept { return -L + i * h; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  std::size_t index(int i1, int i2, int i3) const noexcept {
    return (static_cast<std::size_t>(i1) * n + i2) * static_cast<std::size_t>(n) + i3;
  }
  std::array<int, 3> unravel(std::size_t idx) const noexcept {
    const auto nn = static_cast<std::size_t>(n);
    return {static_cast<int>(idx / (nn * nn)), static_cast<int>((idx / nn) % nn),
            static_cast<int>(idx % nn)};
  }
  std::array<double, 3> position(std::size_t idx) const noexcept {
    const auto ijk = unravel(idx);
    return {coord(ijk[0]), coord(ijk[1]), coord(ijk[2])};
  }
  /// Distance in cells from node to the nearest face of the cube.
  int face_distance(std::size_t idx) const noexcept;
  double cell_volume() const noexcept { return h * h * h; }

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.n == b.n && a.L == b.L && a.h == b.h;
  }
};

/// One time-stamped scalar field on a grid.
class FieldSnapshot {
public:
  FieldSnapshot() = default;
  FieldSnapshot(const GridSpec& grid, double t);
  FieldSnapshot(const GridSpec& grid, double t, std::vector<double> values);

  template <class F>
  static FieldSnapshot sample(const GridSpec& grid, double t, F&& f) {
    FieldSnapshot out(grid, t);
    for (int i = 0; i < grid.n; ++i)
      for (int j = 0; j < grid.n; ++j)
        for (int k = 0; k < grid.n; ++k)
          out.values_[grid.index(i, j, k)] = f(grid.coord(i), grid.coord(j), grid.coord(k));
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  double t() const noexcept { return t_; }
  void set_t(double t) noexcept { t_ = t; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;
  /// Largest |value| on the outermost `pad` node layers.
  double max_abs_in_pad(int pad) const noexcept;
  void zero_pad(int pad) noexcept;

  /// this += a * other (same grid).
  void axpy(double a, const FieldSnapshot& other);
  FieldSnapshot scaled(double c) const;

private:
  GridSpec grid_{};
  double t_ = 0.0;
  std::vector<double> values_;
};

// --- stencils ---------------------------------------------------------------
//
// First derivative: (f[-2] - 8 f[-1] + 8 f[+1] - f[+2]) / (12 h), with the
// field extended by zero outside the cube. Second derivatives are the
// composition of two first-derivative passes, so D_i D_j == D_j D_i exactly
// and the discrete Laplacian is -sum D_i^T D_i.

void d1_into(std::span<const double> in, std::span<double> out, const GridSpec& g, int axis);
/// Compact (-1, 16, -30, 16, -1) / (12 h^2) second derivative, zero-extended.
void d2_compact_into(std::span<const double> in, std::span<double> out, const GridSpec& g,
                     int axis);

/// axis in {1,2,3}; order in {1,2}. Throws Error otherwise.
FieldSnapshot spatial_derivative(const FieldSnapshot& f, int axis, int order);

/// D_a D_b f with the smaller axis applied first, so (a, b) and (b, a) agree bitwise.
FieldSnapshot mixed_derivative(const FieldSnapshot& f, int a, int b);

enum class LaplacianKind { composed, compact };
/// scratch holds 2 size() doubles (composed) or size() (compact); throws Error otherwise.
void laplacian_into(std::span<const double> in, std::span<double> out, const GridSpec& g,
                    LaplacianKind kind, std::span<double> scratch);

// --- radial / angular split ------------------------------------------------

/// grad f = (x/r) d_r f - (x/r^2) ^ Omega f on the stencil gradient.
/// Nodes with r < h/2 carry zeros and are listed in `excluded`.
struct RadialAngular {
  FieldSnapshot radial;
  std::array<FieldSnapshot, 3> angular;
  std::vector<std::size_t> excluded;
};

RadialAngular radial_angular_decompose(const FieldSnapshot& f);

// --- quadrature -------------------------------------------------------------

struct Integral {
  double value = 0.0;
  /// The integrand was nonzero on the outermost `pad` layers.
  bool boundary_contact = false;
};

using NodeWeight = std::function<double(double, double, double)>;

/// sum_nodes weight(x) f(x) h^3, reduced by the deterministic pairwise tree.
Integral integrate(const FieldSnapshot& f, const NodeWeight& weight = {}, int pad = 4);

// --- snapshot dump ----------------------------------------------------------
//
// Header line "n h L t" then node values in index order: one decimal per line
// (text) or raw little-endian float64 (binary).

void write_snapshot(std::ostream& out, const FieldSnapshot& f, bool binary);
FieldSnapshot read_snapshot(std::istream& in, bool binary);

} // namespace nullwave
