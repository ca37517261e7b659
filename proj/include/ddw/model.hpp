#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "ddw/expression.hpp"

namespace ddw {

enum class Symmetry { None, Symmetric, Antisymmetric };
enum class IndexPosition { Lower, Upper };

/// A declared field multiplet such as A_mu or P^{mu nu} (antisymmetric).
struct Multiplet {
  std::string name;
  std::vector<IndexPosition> positions;  // declared index positions
  Symmetry symmetry = Symmetry::None;

  std::size_t rank() const { return positions.size(); }

  /// Independent components: every index tuple for None, non-decreasing for
  /// Symmetric, strictly increasing for Antisymmetric.
  std::vector<std::vector<int>> components(int n) const {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(rank(), 0);
    auto accept = [&] {
      for (std::size_t i = 1; i < idx.size(); ++i) {
        if (symmetry == Symmetry::Antisymmetric && idx[i - 1] >= idx[i]) return false;
        if (symmetry == Symmetry::Symmetric && idx[i - 1] > idx[i]) return false;
      }
      return true;
    };
    while (true) {
      if (accept()) out.push_back(idx);
      std::size_t k = idx.size();
      while (k > 0) {
        --k;
        if (++idx[k] < n) break;
        idx[k] = 0;
        if (k == 0) return out;
      }
      if (idx.empty()) return out;
    }
  }

  /// Canonical component for an index tuple: sign and sorted indices.
  /// Sign 0 means the component vanishes identically.
  std::pair<int, std::vector<int>> canonical(std::vector<int> idx) const {
    if (symmetry == Symmetry::None) return {1, idx};
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j + 1 < idx.size() - i; ++j)
        if (idx[j] > idx[j + 1]) {
          std::swap(idx[j], idx[j + 1]);
          sign = -sign;
        }
    if (symmetry == Symmetry::Symmetric) return {1, idx};
    for (std::size_t i = 1; i < idx.size(); ++i)
      if (idx[i] == idx[i - 1]) return {0, idx};
    return {sign, idx};
  }

  friend bool operator==(const Multiplet&, const Multiplet&) = default;
};

/// A parsed first-order field theory: spacetime, multiplets and Lagrangian
/// over field components and their first jets.
struct FieldModel {
  Spacetime spacetime = Spacetime::minkowski(4);
  std::vector<Multiplet> multiplets;
  Expression lagrangian;

  const Multiplet* find(const std::string& name) const {
    for (const auto& m : multiplets)
      if (m.name == name) return &m;
    return nullptr;
  }

  /// All independent field components, in canonical Variable order.
  std::vector<Variable> field_components() const {
    std::vector<Variable> out;
    for (const auto& m : multiplets)
      for (auto& idx : m.components(spacetime.n)) out.push_back(Variable::field(m.name, idx));
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Every field component and polymomentum: the unconstrained phase space.
  std::vector<Variable> phase_space() const {
    std::vector<Variable> out;
    for (const auto& y : field_components()) {
      out.push_back(y);
      for (int a = 0; a < spacetime.n; ++a) out.push_back(Variable::momentum(y, a));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Throws if the Lagrangian mentions anything but declared field
  /// components and their jets.
  void validate() const {
    if (spacetime.n < 1 || spacetime.n > 16) throw Error("spacetime dimension out of range");
    if (static_cast<int>(spacetime.signature.size()) != spacetime.n) throw Error("signature length differs from dim");
    auto comps = field_components();
    for (const auto& v : lagrangian.variables()) {
      bool ok = false;
      if (v.kind == VarKind::Field || (v.kind == VarKind::Jet && v.slot < 0))
        ok = std::binary_search(comps.begin(), comps.end(), v.base_field()) && (v.kind == VarKind::Field || (v.deriv >= 0 && v.deriv < spacetime.n));
      if (!ok) throw Error("undeclared variable in Lagrangian: " + v.name);
    }
  }

  friend bool operator==(const FieldModel&, const FieldModel&) = default;
};

inline bool is_velocity(const Variable& v) { return v.kind == VarKind::Jet && v.slot < 0; }

}  // namespace ddw
