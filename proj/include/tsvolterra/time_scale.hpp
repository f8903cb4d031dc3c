#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsvolterra/errors.hpp"

namespace tsvolterra {

class TimeScale;
using TimeScalePtr = std::shared_ptr<const TimeScale>;

// Generator description for a scale. Kept alongside the points so reports can
// say how a grid was produced.
struct ScaleSpec {
  enum class Kind { Explicit, Uniform, QScale, Union };

  Kind kind = Kind::Explicit;
  std::vector<double> points;    // Explicit
  double start = 0.0;            // Uniform / QScale
  double stop = 0.0;             // Uniform
  double step = 0.0;             // Uniform
  double q = 0.0;                // QScale
  std::size_t count = 0;         // QScale
  std::vector<ScaleSpec> parts;  // Union

  static ScaleSpec explicit_points(std::vector<double> pts);
  static ScaleSpec uniform(double start, double stop, double step);
  static ScaleSpec qscale(double q, double start, std::size_t count);
  static ScaleSpec scale_union(std::vector<ScaleSpec> parts);
};

// A finite isolated time scale: strictly increasing points t_0 < ... < t_{N-1}.
// By convention sigma(b) = b and mu(b) = 0 at the right endpoint; rho(a) = a.
class TimeScale {
public:
  explicit TimeScale(std::vector<double> pts, ScaleSpec spec = {});

  static TimeScale from_points(std::vector<double> pts);
  static TimeScale uniform(double start, double stop, double step);
  static TimeScale qscale(double q, double start, std::size_t count);

  std::size_t size() const noexcept { return pts_.size(); }
  double operator[](std::size_t i) const { return pts_[i]; }
  double a() const { return pts_.front(); }
  double b() const { return pts_.back(); }
  const std::vector<double>& points() const noexcept { return pts_; }

  // Membership uses a relative snap of 1e-9 so that values arriving through
  // text round trips still land on their grid point.
  std::optional<std::size_t> try_index(double t) const noexcept;
  std::size_t index_of(double t) const;  // throws NotAPoint

  double sigma(double t) const;
  double rho(double t) const;
  double mu(double t) const;

  double sigma_at(std::size_t i) const { return pts_[i + 1 < pts_.size() ? i + 1 : i]; }
  double rho_at(std::size_t i) const { return pts_[i > 0 ? i - 1 : 0]; }
  double mu_at(std::size_t i) const {
    return i + 1 < pts_.size() ? pts_[i + 1] - pts_[i] : 0.0;
  }

  // number of points in T^kappa (all but the last)
  std::size_t kappa_size() const { return pts_.size() - 1; }

  const ScaleSpec& spec() const noexcept { return spec_; }
  std::string describe() const;

  // new scale made of points [lo..hi] of this one
  TimeScale restrict_range(std::size_t lo, std::size_t hi) const;

private:
  std::vector<double> pts_;
  ScaleSpec spec_;
};

TimeScalePtr build_time_scale(const ScaleSpec& spec);
TimeScalePtr share(TimeScale ts);

struct Jump {
  double sigma;
  double rho;
  double mu;
};

Jump jump(const TimeScale& ts, double t);

// Real samples aligned with a scale's points. Values must be finite.
class GridFunction {
public:
  GridFunction() = default;
  GridFunction(TimeScalePtr scale, std::vector<double> values);

  static GridFunction constant(TimeScalePtr scale, double value);
  static GridFunction sample(TimeScalePtr scale, const std::function<double(double)>& fn);

  const TimeScale& scale() const { return *scale_; }
  const TimeScalePtr& scale_ptr() const { return scale_; }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at_point(double t) const { return values_[scale_->index_of(t)]; }
  const std::vector<double>& values() const noexcept { return values_; }

  double max_abs() const;

private:
  TimeScalePtr scale_;
  std::vector<double> values_;
};

// Values on the lower triangle {(i,j): i >= j} of a scale's point grid, used
// for kernels K(t_i, t_j), resolvents and shift tables. Entries must be finite.
class KernelTable {
public:
  KernelTable() = default;
  explicit KernelTable(TimeScalePtr scale);  // zero-filled

  static KernelTable from_fn(TimeScalePtr scale,
                             const std::function<double(std::size_t, std::size_t)>& fn);

  const TimeScale& scale() const { return *scale_; }
  const TimeScalePtr& scale_ptr() const { return scale_; }
  std::size_t points() const noexcept { return n_; }

  double at(std::size_t i, std::size_t j) const { return tri_[offset(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { tri_[offset(i, j)] = v; }

  double max_abs() const;
  bool all_zero() const;
  void check_finite() const;  // throws InvalidProblem on NaN/inf entries

private:
  std::size_t offset(std::size_t i, std::size_t j) const;

  TimeScalePtr scale_;
  std::size_t n_ = 0;
  std::vector<double> tri_;  // row-major, row i holds j = 0..i
};

}  // namespace tsvolterra
