#include "tsvolterra/time_scale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsvolterra {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::EmptyScale: return "EmptyScale";
    case Errc::NonMonotone: return "NonMonotone";
    case Errc::NotAPoint: return "NotAPoint";
    case Errc::KappaBoundary: return "KappaBoundary";
    case Errc::NotRegressive: return "NotRegressive";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::BackwardUnsupported: return "BackwardUnsupported";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownFunction: return "UnknownFunction";
    case Errc::BadArity: return "BadArity";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::BadArgument: return "BadArgument";
    case Errc::Truncated: return "Truncated";
    case Errc::MaxIterations: return "MaxIterations";
    case Errc::ZeroDiagonal: return "ZeroDiagonal";
    case Errc::NonzeroAtA: return "NonzeroAtA";
    case Errc::OrderTooHigh: return "OrderTooHigh";
    case Errc::LambdaZero: return "LambdaZero";
    case Errc::DomainExit: return "DomainExit";
    case Errc::InvalidProblem: return "InvalidProblem";
    case Errc::SchemaError: return "SchemaError";
    case Errc::GridMismatch: return "GridMismatch";
  }
  return "Error";
}

ScaleSpec ScaleSpec::explicit_points(std::vector<double> pts) {
  ScaleSpec s;
  s.kind = Kind::Explicit;
  s.points = std::move(pts);
  return s;
}

ScaleSpec ScaleSpec::uniform(double start, double stop, double step) {
  ScaleSpec s;
  s.kind = Kind::Uniform;
  s.start = start;
  s.stop = stop;
  s.step = step;
  return s;
}

ScaleSpec ScaleSpec::qscale(double q, double start, std::size_t count) {
  ScaleSpec s;
  s.kind = Kind::QScale;
  s.q = q;
  s.start = start;
  s.count = count;
  return s;
}

ScaleSpec ScaleSpec::scale_union(std::vector<ScaleSpec> parts) {
  ScaleSpec s;
  s.kind = Kind::Union;
  s.parts = std::move(parts);
  return s;
}

namespace {

// duplicate detection uses a relative 1e-12 tolerance
bool effectively_equal(double x, double y) {
  double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
  return std::fabs(x - y) <= 1e-12 * scale;
}

void validate_points(const std::vector<double>& pts) {
  if (pts.size() < 2) throw Error(Errc::EmptyScale, "a time scale needs at least two points");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i] < pts[i + 1]) || effectively_equal(pts[i], pts[i + 1])) {
      throw Error(Errc::NonMonotone,
                  "points must be strictly increasing (offending index " + std::to_string(i + 1) + ")");
    }
  }
  for (double p : pts) {
    if (!std::isfinite(p)) throw Error(Errc::NonMonotone, "points must be finite");
  }
}

std::vector<double> expand(const ScaleSpec& spec) {
  switch (spec.kind) {
    case ScaleSpec::Kind::Explicit:
      return spec.points;
    case ScaleSpec::Kind::Uniform: {
      if (!(spec.step > 0.0)) throw Error(Errc::NonMonotone, "uniform step must be positive");
      if (!(spec.stop > spec.start)) throw Error(Errc::EmptyScale, "uniform stop must exceed start");
      std::vector<double> pts;
      // k chosen so start + k*step lands within a half-step of stop
      double span = spec.stop - spec.start;
      std::size_t n = static_cast<std::size_t>(std::floor(span / spec.step + 0.5 + 1e-9));
      for (std::size_t k = 0; k <= n; ++k) {
        double p = spec.start + static_cast<double>(k) * spec.step;
        if (p > spec.stop + 1e-9 * std::max(1.0, std::fabs(spec.stop))) break;
        pts.push_back(p);
      }
      return pts;
    }
    case ScaleSpec::Kind::QScale: {
      if (!(spec.q > 1.0)) throw Error(Errc::NonMonotone, "q must exceed 1");
      if (!(spec.start > 0.0)) throw Error(Errc::NonMonotone, "q-scale start must be positive");
      if (spec.count < 2) throw Error(Errc::EmptyScale, "q-scale needs at least two points");
      std::vector<double> pts;
      double p = spec.start;
      for (std::size_t k = 0; k < spec.count; ++k) {
        pts.push_back(p);
        p *= spec.q;
      }
      return pts;
    }
    case ScaleSpec::Kind::Union: {
      std::vector<double> pts;
      for (const auto& part : spec.parts) {
        auto sub = expand(part);
        pts.insert(pts.end(), sub.begin(), sub.end());
      }
      std::sort(pts.begin(), pts.end());
      std::vector<double> merged;
      for (double p : pts) {
        if (merged.empty() || !effectively_equal(merged.back(), p)) merged.push_back(p);
      }
      return merged;
    }
  }
  return {};
}

}  // namespace

TimeScale::TimeScale(std::vector<double> pts, ScaleSpec spec)
    : pts_(std::move(pts)), spec_(std::move(spec)) {
  validate_points(pts_);
  if (spec_.kind == ScaleSpec::Kind::Explicit && spec_.points.empty()) spec_.points = pts_;
}

TimeScale TimeScale::from_points(std::vector<double> pts) {
  auto spec = ScaleSpec::explicit_points(pts);
  return TimeScale(std::move(pts), std::move(spec));
}

TimeScale TimeScale::uniform(double start, double stop, double step) {
  auto spec = ScaleSpec::uniform(start, stop, step);
  return TimeScale(expand(spec), std::move(spec));
}

TimeScale TimeScale::qscale(double q, double start, std::size_t count) {
  auto spec = ScaleSpec::qscale(q, start, count);
  return TimeScale(expand(spec), std::move(spec));
}

std::optional<std::size_t> TimeScale::try_index(double t) const noexcept {
  if (!std::isfinite(t) || pts_.empty()) return std::nullopt;
  auto it = std::lower_bound(pts_.begin(), pts_.end(), t);
  std::size_t cand = static_cast<std::size_t>(it - pts_.begin());
  auto close = [&](std::size_t i) {
    double tol = 1e-9 * std::max(1.0, std::fabs(pts_[i]));
    return std::fabs(pts_[i] - t) <= tol;
  };
  if (cand < pts_.size() && close(cand)) return cand;
  if (cand > 0 && close(cand - 1)) return cand - 1;
  return std::nullopt;
}

std::size_t TimeScale::index_of(double t) const {
  auto idx = try_index(t);
  if (!idx) throw Error(Errc::NotAPoint, std::to_string(t) + " is not a grid point");
  return *idx;
}

double TimeScale::sigma(double t) const { return sigma_at(index_of(t)); }
double TimeScale::rho(double t) const { return rho_at(index_of(t)); }
double TimeScale::mu(double t) const { return mu_at(index_of(t)); }

std::string TimeScale::describe() const {
  std::ostringstream os;
  switch (spec_.kind) {
    case ScaleSpec::Kind::Explicit:
      os << "explicit[" << pts_.size() << " pts, " << a() << ".." << b() << "]";
      break;
    case ScaleSpec::Kind::Uniform:
      os << "uniform[start=" << spec_.start << ", stop=" << spec_.stop
         << ", step=" << spec_.step << "]";
      break;
    case ScaleSpec::Kind::QScale:
      os << "qscale[q=" << spec_.q << ", start=" << spec_.start << ", count=" << spec_.count << "]";
      break;
    case ScaleSpec::Kind::Union:
      os << "union[" << spec_.parts.size() << " parts, " << pts_.size() << " pts]";
      break;
  }
  return os.str();
}

TimeScale TimeScale::restrict_range(std::size_t lo, std::size_t hi) const {
  if (lo > hi || hi >= pts_.size())
    throw Error(Errc::BadArgument, "restrict_range indices out of bounds");
  std::vector<double> sub(pts_.begin() + static_cast<std::ptrdiff_t>(lo),
                          pts_.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  return TimeScale::from_points(std::move(sub));
}

TimeScalePtr build_time_scale(const ScaleSpec& spec) {
  return std::make_shared<const TimeScale>(expand(spec), spec);
}

TimeScalePtr share(TimeScale ts) { return std::make_shared<const TimeScale>(std::move(ts)); }

Jump jump(const TimeScale& ts, double t) {
  std::size_t i = ts.index_of(t);
  return Jump{ts.sigma_at(i), ts.rho_at(i), ts.mu_at(i)};
}

GridFunction::GridFunction(TimeScalePtr scale, std::vector<double> values)
    : scale_(std::move(scale)), values_(std::move(values)) {
  if (!scale_) throw Error(Errc::BadArgument, "grid function needs a scale");
  if (values_.size() != scale_->size())
    throw Error(Errc::BadArgument, "grid function length must match the point count");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(Errc::InvalidProblem, "grid function value not finite");
  }
}

GridFunction GridFunction::constant(TimeScalePtr scale, double value) {
  if (!scale) throw Error(Errc::BadArgument, "grid function needs a scale");
  std::vector<double> vals(scale->size(), value);
  return GridFunction(std::move(scale), std::move(vals));
}

GridFunction GridFunction::sample(TimeScalePtr scale, const std::function<double(double)>& fn) {
  if (!scale) throw Error(Errc::BadArgument, "grid function needs a scale");
  std::vector<double> vals;
  vals.reserve(scale->size());
  for (double p : scale->points()) vals.push_back(fn(p));
  return GridFunction(std::move(scale), std::move(vals));
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

KernelTable::KernelTable(TimeScalePtr scale) : scale_(std::move(scale)) {
  if (!scale_) throw Error(Errc::BadArgument, "kernel table needs a scale");
  n_ = scale_->size();
  tri_.assign(n_ * (n_ + 1) / 2, 0.0);
}

KernelTable KernelTable::from_fn(TimeScalePtr scale,
                                 const std::function<double(std::size_t, std::size_t)>& fn) {
  KernelTable k(std::move(scale));
  for (std::size_t i = 0; i < k.n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) k.set(i, j, fn(i, j));
  k.check_finite();
  return k;
}

std::size_t KernelTable::offset(std::size_t i, std::size_t j) const {
  if (i >= n_ || j > i) throw Error(Errc::BadArgument, "kernel table index outside triangle");
  return i * (i + 1) / 2 + j;
}

double KernelTable::max_abs() const {
  double m = 0.0;
  for (double v : tri_) m = std::max(m, std::fabs(v));
  return m;
}

bool KernelTable::all_zero() const {
  for (double v : tri_)
    if (v != 0.0) return false;
  return true;
}

void KernelTable::check_finite() const {
  for (double v : tri_)
    if (!std::isfinite(v)) throw Error(Errc::InvalidProblem, "kernel entry not finite");
}

}  // namespace tsvolterra
