#pragma once

#include <vector>

// A frequency bin is the rectangular window |omega - center| < half_width.
// Bin functions are indicator/sqrt(full width), so distinct non-intersecting
// bins are exactly orthonormal. Bin sets must be pairwise disjoint as
// intervals; that is the physically meaningful non-overlap contract.

namespace fbq {

struct FrequencyBin {
  double center = 0.0;      // rad/s, relative to degeneracy
  double half_width = 0.0;  // rad/s, > 0

  FrequencyBin() = default;
  FrequencyBin(double center_rad, double half_width_rad);

  double width() const { return 2.0 * half_width; }
  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
  bool contains(double omega) const { return omega >= lower() && omega < upper(); }
  // Value of the normalized bin function on its support, 1/sqrt(width).
  double amplitude() const;
  // Bin reflected about degeneracy (idler <-> signal partner).
  FrequencyBin mirrored() const { return FrequencyBin(-center, half_width); }
};

bool bins_disjoint(const std::vector<FrequencyBin>& bins);

// Throws std::invalid_argument when any two bins intersect.
void require_disjoint(const std::vector<FrequencyBin>& bins, const char* context);

std::vector<FrequencyBin> mirrored(const std::vector<FrequencyBin>& bins);

}  // namespace fbq
