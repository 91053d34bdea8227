#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hardy_rellich/cap_solver.hpp"
#include "hardy_rellich/constants.hpp"
#include "hardy_rellich/domain.hpp"
#include "hardy_rellich/error.hpp"
#include "hardy_rellich/scalar.hpp"
#include "hardy_rellich/spectra.hpp"

namespace hardy_rellich {

enum class SelectionKind { All, Tail, Explicit, ExcludePrincipal, Singleton };

template <class T>
struct LambdaSelection {
  SelectionKind kind = SelectionKind::All;
  int k = 0;
  std::vector<T> values;

  static LambdaSelection all() { return {}; }
  static LambdaSelection tail(int k) {
    if (k < 1) throw InvalidArgument("tail index must be positive");
    return {SelectionKind::Tail, k, {}};
  }
  static LambdaSelection explicit_set(std::vector<T> v) {
    if (v.empty()) throw EmptyLambda("explicit eigenvalue set is empty");
    for (const auto& x : v)
      if (x < T(0)) throw NegativeInput("eigenvalues must be nonnegative");
    return {SelectionKind::Explicit, 0, std::move(v)};
  }
  static LambdaSelection exclude_principal() { return {SelectionKind::ExcludePrincipal, 0, {}}; }
  static LambdaSelection singleton(T v) {
    if (v < T(0)) throw NegativeInput("eigenvalues must be nonnegative");
    return {SelectionKind::Singleton, 0, {v}};
  }

  bool finite() const { return kind == SelectionKind::Explicit || kind == SelectionKind::Singleton; }

  std::string describe() const {
    switch (kind) {
      case SelectionKind::All: return "all";
      case SelectionKind::Tail: return "tail:" + std::to_string(k);
      case SelectionKind::ExcludePrincipal: return "exclude-principal";
      default: break;
    }
    std::ostringstream os;
    os << (kind == SelectionKind::Singleton ? "only:" : "set:");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) os << ',';
      if constexpr (is_exact_v<T>) os << format_exact(values[i]);
      else os << values[i];
    }
    return os.str();
  }
};

template <class T>
T parse_scalar(std::string_view s) {
  if constexpr (is_exact_v<T>) {
    return parse_rational(s);
  } else {
    std::string str(s);
    char* end = nullptr;
    const double v = std::strtod(str.c_str(), &end);
    if (str.empty() || end != str.c_str() + str.size()) {
      // Fall back to "p/q".
      return to_double(parse_rational(s));
    }
    return v;
  }
}

template <class T>
LambdaSelection<T> parse_selection(std::string_view s) {
  if (s == "all") return LambdaSelection<T>::all();
  if (s == "exclude-principal") return LambdaSelection<T>::exclude_principal();
  if (s.rfind("tail:", 0) == 0) {
    std::string v(s.substr(5));
    char* end = nullptr;
    const long k = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) throw InvalidArgument("bad tail index: " + v);
    return LambdaSelection<T>::tail(static_cast<int>(k));
  }
  if (s.rfind("only:", 0) == 0) return LambdaSelection<T>::singleton(parse_scalar<T>(s.substr(5)));
  if (s.rfind("set:", 0) == 0) {
    std::vector<T> vals;
    std::string_view rest = s.substr(4);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      vals.push_back(parse_scalar<T>(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return LambdaSelection<T>::explicit_set(std::move(vals));
  }
  throw InvalidArgument("unknown selection '" + std::string(s) +
                        "' (expected all | tail:<k> | set:<v1,v2,...> | exclude-principal | only:<v>)");
}

// Distinct eigenvalues of `spec` picked by `sel`, ascending.
template <class T>
std::vector<T> resolve_selection(const Spectrum<T>& spec, const LambdaSelection<T>& sel) {
  std::vector<T> out;
  auto push_distinct = [&](const T& v) {
    if (out.empty() || !nearly_equal(out.back(), v)) out.push_back(v);
  };
  switch (sel.kind) {
    case SelectionKind::All:
      for (const auto& e : spec.entries) push_distinct(e.lambda);
      break;
    case SelectionKind::Tail:
      for (const auto& e : spec.entries)
        if (e.degree >= sel.k) push_distinct(e.lambda);
      break;
    case SelectionKind::ExcludePrincipal: {
      const T p = spec.principal();
      for (const auto& e : spec.entries)
        if (!nearly_equal(e.lambda, p)) push_distinct(e.lambda);
      break;
    }
    case SelectionKind::Explicit:
    case SelectionKind::Singleton: {
      std::vector<T> picked;
      for (const auto& v : sel.values) {
        auto it = std::find_if(spec.entries.begin(), spec.entries.end(),
                               [&](const auto& e) { return nearly_equal(e.lambda, v); });
        if (it == spec.entries.end()) {
          std::ostringstream os;
          if constexpr (is_exact_v<T>) os << format_exact(v);
          else os << v;
          throw NotInSpectrum("value " + os.str() + " is not an eigenvalue of the " + spec.domain.name() + " spectrum");
        }
        picked.push_back(it->lambda);
      }
      std::sort(picked.begin(), picked.end());
      for (const auto& v : picked) push_distinct(v);
      break;
    }
  }
  if (out.empty()) throw EmptyLambda("selection " + sel.describe() + " is empty on this spectrum");
  return out;
}

template <class T>
Spectrum<T> build_spectrum(int dim, const SphericalDomain& dom, int size, const CapSolverOptions& cap_opt = {}) {
  switch (dom.kind) {
    case DomainKind::FullSphere: return sphere_eigenvalues<T>(dim, size);
    case DomainKind::Hemisphere: return hemisphere_eigenvalues<T>(dim, std::max(size, 1));
    case DomainKind::Cap: break;
  }
  if constexpr (is_exact_v<T>) {
    throw InvalidArgument("cap spectra are floating point; use double arithmetic");
  } else {
    return cap_eigenvalues(dim, dom.theta0, size, std::nullopt, cap_opt);
  }
}

// Finite eigenvalue set on which minimizing the Hardy-Rellich term, and the
// Rellich term when `with_rellich` is set, for every exponent in `uses` is exact:
// all selected values up to the safe cutoff plus the next one.  Explicit
// selections are returned as given.
template <class T>
std::vector<T> resolved_lambdas(int dim, const SphericalDomain& dom, const LambdaSelection<T>& sel,
                                const std::vector<ConeParams<T>>& uses, const CapSolverOptions& cap_opt = {},
                                bool with_rellich = true) {
  int size = 8;
  for (int round = 0; round < 24; ++round, size *= 2) {
    const auto spec = build_spectrum<T>(dim, dom, size, cap_opt);
    const T top = spec.entries.back().lambda;
    if (sel.finite()) {
      const T vmax = *std::max_element(sel.values.begin(), sel.values.end());
      if (top < vmax && !nearly_equal(top, vmax)) continue;
      return resolve_selection(spec, sel);
    }
    if (sel.kind == SelectionKind::Tail && spec.entries.back().degree < sel.k + 1) continue;
    std::vector<T> res;
    try {
      res = resolve_selection(spec, sel);
    } catch (const EmptyLambda&) {
      continue;
    }
    T cut = res.front();
    for (const auto& p : uses)
      cut = std::max(cut, with_rellich ? minimization_cutoff(p, res.front()) : hardy_rellich_cutoff(p, res.front()));
    if (!(res.back() > cut)) continue;
    std::vector<T> out;
    for (const auto& v : res) {
      out.push_back(v);
      if (v > cut) break;
    }
    return out;
  }
  throw ConvergenceFailure("spectrum truncation did not reach the minimization cutoff");
}

}  // namespace hardy_rellich
