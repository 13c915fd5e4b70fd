#include "ordwalk/core.hpp"

#include <cmath>
#include <sstream>

namespace ordwalk {

namespace {

bool strictly_increasing(std::span<const double> x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i - 1] < x[i])) return false;
  }
  return true;
}

double delta1_range(std::span<const double> x) {
  double prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) prod *= 1.0 + std::abs(x[j] - x[i]);
  }
  return prod;
}

}  // namespace

ChamberPoint::ChamberPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2 || !strictly_increasing(coords_)) {
    throw PreconditionError("core-domain", "ChamberPoint",
                            "coordinates must be strictly increasing with length >= 2");
  }
}

ChamberPoint ChamberPoint::translated(double c) const {
  std::vector<double> y = coords_;
  for (double& v : y) v += c;
  return ChamberPoint(std::move(y));
}

ChamberPoint ChamberPoint::mirrored() const {
  std::vector<double> y(coords_.rbegin(), coords_.rend());
  for (double& v : y) v = -v;
  return ChamberPoint(std::move(y));
}

CompactPoint CompactPoint::in_chamber(std::vector<double> x) {
  return CompactPoint{Frozen::None, std::move(x)};
}

CompactPoint CompactPoint::top_frozen(std::vector<double> finite_lower) {
  return CompactPoint{Frozen::TopPlusInfinity, std::move(finite_lower)};
}

CompactPoint CompactPoint::bottom_frozen(std::vector<double> finite_upper) {
  return CompactPoint{Frozen::BottomMinusInfinity, std::move(finite_upper)};
}

bool CompactPoint::valid() const {
  if (finite.empty()) return false;
  for (double v : finite) {
    if (!std::isfinite(v)) return false;
  }
  return strictly_increasing(finite);
}

void validate_params(const WalkParams& params) {
  const auto fail = [](const std::string& msg) {
    throw DomainError("core-domain", "validate_params", msg);
  };
  const int k = params.k;
  const double a = params.alpha();
  if (k < 4) {
    std::ostringstream os;
    os << "k >= 4 required (got k=" << k << ")";
    fail(os.str());
  }
  if (!(a > k - 2 && a < k - 1)) {
    std::ostringstream os;
    os << "alpha must lie strictly inside (k-2, k-1) = (" << k - 2 << ", " << k - 1
       << ") (got alpha=" << a << ")";
    fail(os.str());
  }
  if (params.p() < 0.0 || params.q() < 0.0) fail("tail weights p, q must be nonnegative");
  if (!(params.p() + params.q() > 0.0)) fail("p + q must be positive");
}

bool in_chamber(std::span<const double> x) { return strictly_increasing(x); }

double vandermonde(std::span<const double> x) {
  double prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) prod *= x[j] - x[i];
  }
  return prod;
}

double delta1(std::span<const double> x, Side side) {
  if (x.size() < 3) {
    throw PreconditionError("core-domain", "delta1", "delta1 needs k >= 3 coordinates");
  }
  const auto sub = side == Side::Lower ? x.first(x.size() - 1) : x.subspan(1);
  return delta1_range(sub);
}

double delta1_all(std::span<const double> x) { return delta1_range(x); }

double theory_exponent(const WalkParams& params) {
  const double k = params.k;
  return params.alpha() / 2.0 + (k - 1.0) * (k - 2.0) / 4.0;
}

std::vector<double> gaps_of(std::span<const double> x) {
  std::vector<double> g;
  g.reserve(x.empty() ? 0 : x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) g.push_back(x[i] - x[i - 1]);
  return g;
}

std::vector<double> positions_from_gaps(std::span<const double> gaps) {
  std::vector<double> x(gaps.size() + 1, 0.0);
  for (std::size_t i = 0; i < gaps.size(); ++i) x[i + 1] = x[i] + gaps[i];
  return x;
}

}  // namespace ordwalk
