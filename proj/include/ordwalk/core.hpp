#pragma once

#include <span>
#include <string>
#include <vector>

#include "ordwalk/errors.hpp"

namespace ordwalk {

/// Parameters of the increment law: tail index, right/left tail constants and
/// the cut beyond which the tails are exact power laws.
struct IncrementLawSpec {
  double alpha = 2.5;
  double p = 0.5;
  double q = 0.5;
  double body_cut = 1.0;
};

/// Dimension plus increment law. `alpha`, `p` and `q` live in the law spec.
struct WalkParams {
  int k = 4;
  IncrementLawSpec law;

  double alpha() const { return law.alpha; }
  double p() const { return law.p; }
  double q() const { return law.q; }
};

enum class Side { Lower, Upper };

/// Point of the open Weyl chamber x_1 < ... < x_k.
class ChamberPoint {
 public:
  explicit ChamberPoint(std::vector<double> coords);

  std::size_t dim() const { return coords_.size(); }
  const std::vector<double>& coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  ChamberPoint translated(double c) const;
  /// Reverse-and-negate: (x_1..x_k) -> (-x_k..-x_1).
  ChamberPoint mirrored() const;

 private:
  std::vector<double> coords_;
};

enum class Frozen { None, TopPlusInfinity, BottomMinusInfinity };

/// Point of the partially compactified chamber: a chamber point, or k-1
/// ordered finite coordinates with the top (W1) or bottom (W2) one at infinity.
struct CompactPoint {
  Frozen frozen = Frozen::None;
  std::vector<double> finite;

  static CompactPoint in_chamber(std::vector<double> x);
  static CompactPoint top_frozen(std::vector<double> finite_lower);
  static CompactPoint bottom_frozen(std::vector<double> finite_upper);

  /// Total dimension k (finite coordinates plus a frozen one if any).
  std::size_t dim() const { return finite.size() + (frozen == Frozen::None ? 0 : 1); }
  bool valid() const;
};

void validate_params(const WalkParams& params);

bool in_chamber(std::span<const double> x);

/// Product over i<j of (x_j - x_i).
double vandermonde(std::span<const double> x);

/// Product over i<j of (1 + |x_j - x_i|) on coordinates 1..k-1 (Lower) or 2..k (Upper).
double delta1(std::span<const double> x, Side side);

/// Product over i<j of (1 + |x_j - x_i|) over all coordinates.
double delta1_all(std::span<const double> x);

/// alpha/2 + (k-1)(k-2)/4, the polynomial decay rate of P(tau_x > n).
double theory_exponent(const WalkParams& params);

/// Consecutive differences x_{i+1} - x_i.
std::vector<double> gaps_of(std::span<const double> x);

/// Positions (0, g_1, g_1+g_2, ...) reconstructed from gaps.
std::vector<double> positions_from_gaps(std::span<const double> gaps);

}  // namespace ordwalk
