#ifndef CSAG_TALLY_HPP
#define CSAG_TALLY_HPP

#include <cstdint>

namespace csag {

/// Exact counters of unit-cost oracle queries. One component evaluation
/// (an inner value, an inner Jacobian, or an outer gradient) costs one
/// query; counters only ever grow.
class OracleTally {
 public:
  void count_inner_value() { ++g_value_; }
  void count_inner_jacobian() { ++g_jacobian_; }
  void count_outer_gradient() { ++f_gradient_; }

  std::uint64_t g_value_queries() const { return g_value_; }
  std::uint64_t g_jacobian_queries() const { return g_jacobian_; }
  std::uint64_t f_gradient_queries() const { return f_gradient_; }
  std::uint64_t total() const { return g_value_ + g_jacobian_ + f_gradient_; }

 private:
  std::uint64_t g_value_ = 0;
  std::uint64_t g_jacobian_ = 0;
  std::uint64_t f_gradient_ = 0;
};

}  // namespace csag

#endif  // CSAG_TALLY_HPP
