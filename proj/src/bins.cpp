#include "fbq/bins.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fbq {

FrequencyBin::FrequencyBin(double center_rad, double half_width_rad)
    : center(center_rad), half_width(half_width_rad) {
  if (!std::isfinite(center) || !std::isfinite(half_width) || half_width <= 0.0) {
    throw std::invalid_argument("FrequencyBin: half_width must be finite and > 0");
  }
}

double FrequencyBin::amplitude() const { return 1.0 / std::sqrt(width()); }

bool bins_disjoint(const std::vector<FrequencyBin>& bins) {
  std::vector<FrequencyBin> sorted = bins;
  std::sort(sorted.begin(), sorted.end(),
            [](const FrequencyBin& a, const FrequencyBin& b) { return a.lower() < b.lower(); });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].lower() < sorted[i - 1].upper()) return false;
  }
  return true;
}

void require_disjoint(const std::vector<FrequencyBin>& bins, const char* context) {
  if (!bins_disjoint(bins)) {
    throw std::invalid_argument(std::string(context) + ": frequency bins overlap");
  }
}

std::vector<FrequencyBin> mirrored(const std::vector<FrequencyBin>& bins) {
  std::vector<FrequencyBin> out;
  out.reserve(bins.size());
  for (const auto& b : bins) out.push_back(b.mirrored());
  return out;
}

}  // namespace fbq
