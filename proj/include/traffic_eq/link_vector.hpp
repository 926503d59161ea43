#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace traffic_eq {

/// Dense vector indexed by link id. The tag keeps times and flows apart.
template <class Tag>
class LinkVector {
 public:
  LinkVector() = default;
  explicit LinkVector(std::size_t size, double value = 0.0) : values_(size, value) {}
  explicit LinkVector(std::vector<double> values) : values_(std::move(values)) {}
  LinkVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t e) { return values_[e]; }
  double operator[](std::size_t e) const { return values_[e]; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  std::span<const double> span() const noexcept { return values_; }
  std::span<double> span() noexcept { return values_; }
  const std::vector<double>& values() const& noexcept { return values_; }
  std::vector<double> values() && noexcept { return std::move(values_); }

  friend bool operator==(const LinkVector&, const LinkVector&) = default;

 private:
  std::vector<double> values_;
};

struct LinkTimesTag;
struct LinkFlowsTag;

/// Link travel times in hours (the dual variable t).
using LinkTimes = LinkVector<LinkTimesTag>;
/// Link flows in vehicles per hour (the primal variable f).
using LinkFlows = LinkVector<LinkFlowsTag>;

namespace vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace vec
}  // namespace traffic_eq
