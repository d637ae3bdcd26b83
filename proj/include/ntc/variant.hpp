#pragma once

#include <stdexcept>
#include <string>

namespace ntc {

/// The five technique switches. Versions 0-10 are the published rows;
/// custom combinations are allowed as long as they are consistent.
struct VariantConfig {
  bool sparse = false;
  bool nag = false;
  bool bpcg = false;
  bool index = false;
  bool pattern = false;
  int version = -1;  // -1 for custom combinations
};

inline void validate(const VariantConfig& v) {
  if (v.nag && v.bpcg) {
    throw std::invalid_argument("variant: NAG and BPCG are mutually exclusive");
  }
  if (v.pattern && !v.index) {
    throw std::invalid_argument("variant: Pattern requires Index");
  }
}

inline VariantConfig make_variant(int version) {
  if (version < 0 || version > 10) {
    throw std::invalid_argument("variant version must be in [0, 10], got " +
                                std::to_string(version));
  }
  VariantConfig v;
  v.version = version;
  switch (version) {
    case 0: break;
    case 1: v.index = v.pattern = true; break;
    case 2: v.sparse = true; break;
    case 3: v.nag = true; break;
    case 4: v.sparse = v.index = v.pattern = true; break;
    case 5: v.nag = v.index = v.pattern = true; break;
    case 6: v.sparse = v.nag = v.index = v.pattern = true; break;
    case 7: v.bpcg = true; break;
    case 8: v.bpcg = v.index = v.pattern = true; break;
    case 9: v.sparse = v.bpcg = true; break;
    case 10: v.sparse = v.bpcg = v.index = v.pattern = true; break;
    default: break;
  }
  return v;
}

}  // namespace ntc
