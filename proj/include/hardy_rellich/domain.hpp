#pragma once

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <string>
#include <string_view>

#include "hardy_rellich/error.hpp"

namespace hardy_rellich {

enum class DomainKind { FullSphere, Hemisphere, Cap };

// A geodesic cap {θ < theta0} on S^{N-1}; the hemisphere is the cap of angle π/2
// but keeps its own tag so closed forms can be used.
struct SphericalDomain {
  DomainKind kind = DomainKind::FullSphere;
  double theta0 = boost::math::constants::pi<double>();

  static SphericalDomain sphere() { return {DomainKind::FullSphere, boost::math::constants::pi<double>()}; }
  static SphericalDomain hemisphere() { return {DomainKind::Hemisphere, boost::math::constants::half_pi<double>()}; }
  static SphericalDomain cap(double theta0) {
    if (!std::isfinite(theta0) || !(theta0 > 0.0) || !(theta0 < boost::math::constants::pi<double>()))
      throw InvalidAngle("cap angle must lie strictly inside (0, pi), got " + std::to_string(theta0));
    return {DomainKind::Cap, theta0};
  }

  bool is_full_sphere() const { return kind == DomainKind::FullSphere; }
  bool is_proper() const { return kind != DomainKind::FullSphere; }

  std::string name() const {
    switch (kind) {
      case DomainKind::FullSphere: return "sphere";
      case DomainKind::Hemisphere: return "hemisphere";
      case DomainKind::Cap: break;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "cap:%.17g", theta0);
    return buf;
  }
};

inline SphericalDomain parse_domain(std::string_view s) {
  if (s == "sphere") return SphericalDomain::sphere();
  if (s == "hemisphere") return SphericalDomain::hemisphere();
  if (s.rfind("cap:", 0) == 0) {
    std::string v(s.substr(4));
    char* end = nullptr;
    double th = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) throw InvalidArgument("bad cap angle: " + v);
    return SphericalDomain::cap(th);
  }
  throw InvalidArgument("unknown domain '" + std::string(s) + "' (expected sphere | hemisphere | cap:<theta0>)");
}

}  // namespace hardy_rellich
