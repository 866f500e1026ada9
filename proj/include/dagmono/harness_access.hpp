#pragma once

#include <cstddef>

namespace dagmono {

class HardSample;
class GibbsModel;

/// Read access to hidden matching indices. Tester code paths receive only
/// query oracles, never a HardSample or GibbsModel, so this is the single
/// door; it is meant for the harness, verification and serialization.
class HarnessAccess {
 public:
  static std::size_t hidden_index(const HardSample& s);
  static std::size_t hidden_index(const GibbsModel& m);
};

}  // namespace dagmono
