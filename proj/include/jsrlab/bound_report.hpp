#ifndef JSRLAB_BOUND_REPORT_HPP
#define JSRLAB_BOUND_REPORT_HPP

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "jsrlab/error.hpp"

namespace jsrlab {

/// lower: value <= rho(Sigma) provably. certified_upper: value >= rho(Sigma) provably.
/// empirical: no guarantee either way.
enum class BoundKind { lower, certified_upper, empirical };

inline std::string_view to_string(BoundKind k) {
  switch (k) {
    case BoundKind::lower: return "lower";
    case BoundKind::certified_upper: return "certified-upper";
    case BoundKind::empirical: return "empirical";
  }
  return "?";
}

inline BoundKind bound_kind_from_string(std::string_view s) {
  if (s == "lower") return BoundKind::lower;
  if (s == "certified-upper") return BoundKind::certified_upper;
  if (s == "empirical") return BoundKind::empirical;
  throw ConfigError("unknown bound kind '" + std::string(s) + "'");
}

struct BoundReport {
  double value = 0.0;
  BoundKind kind = BoundKind::empirical;
  std::string method;
  double wall_time = 0.0;  // seconds
  nlohmann::json meta = nlohmann::json::object();
};

inline nlohmann::json to_json(const BoundReport& r) {
  return {{"value", r.value},
          {"kind", std::string(to_string(r.kind))},
          {"method", r.method},
          {"wall_time", r.wall_time},
          {"meta", r.meta}};
}

}  // namespace jsrlab

#endif  // JSRLAB_BOUND_REPORT_HPP
