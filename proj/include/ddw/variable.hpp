#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddw {

/// Base class of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Spacetime dimension and the diagonal metric signature. Orientation is
/// always dx^0 ^ ... ^ dx^{n-1}.
struct Spacetime {
  int n = 4;
  std::vector<int> signature;  // entries +1 / -1, size n

  static Spacetime minkowski(int n) {
    Spacetime s;
    s.n = n;
    s.signature.assign(static_cast<std::size_t>(n), -1);
    if (n > 0) s.signature[0] = 1;
    return s;
  }
  static Spacetime euclidean(int n) {
    Spacetime s;
    s.n = n;
    s.signature.assign(static_cast<std::size_t>(n), 1);
    return s;
  }

  int eta(int mu) const { return signature.at(static_cast<std::size_t>(mu)); }
  int det_sign() const {
    int s = 1;
    for (int e : signature) s *= e;
    return s;
  }

  friend bool operator==(const Spacetime&, const Spacetime&) = default;
};

enum class VarKind : std::uint8_t {
  Coordinate,  // x^mu
  Field,       // y^a
  Momentum,    // p^slot_a
  Jet,         // d_deriv y^a, or d_deriv p^slot_a when slot >= 0
  SGradField,  // dS^slot / dy^a
  SGradX,      // dS^slot / dx^deriv
  Jet2,        // d_slot d_deriv y^a with slot <= deriv
};

/// A symbol of the phase space or of its jets.
///
/// `name` and `indices` identify the field component (canonical index order
/// for (anti)symmetric multiplets). `slot` is the polymomentum index, or the
/// component of S; `deriv` is a spacetime derivative index. Unused = -1.
struct Variable {
  VarKind kind = VarKind::Field;
  std::string name;
  std::vector<int> indices;
  int slot = -1;
  int deriv = -1;

  static Variable coordinate(int mu) { return {VarKind::Coordinate, "x", {}, -1, mu}; }
  static Variable field(std::string name, std::vector<int> idx) {
    return {VarKind::Field, std::move(name), std::move(idx), -1, -1};
  }
  static Variable momentum(const Variable& f, int alpha) {
    return {VarKind::Momentum, f.name, f.indices, alpha, -1};
  }
  static Variable jet(const Variable& base, int mu) {
    return {VarKind::Jet, base.name, base.indices, base.slot, mu};
  }
  static Variable jet2(const Variable& f, int mu, int nu) {
    return {VarKind::Jet2, f.name, f.indices, std::min(mu, nu), std::max(mu, nu)};
  }
  static Variable s_grad_field(const Variable& f, int alpha) {
    return {VarKind::SGradField, f.name, f.indices, alpha, -1};
  }
  static Variable s_grad_x(int alpha, int mu) { return {VarKind::SGradX, "S", {}, alpha, mu}; }

  bool is_field() const { return kind == VarKind::Field; }
  bool is_momentum() const { return kind == VarKind::Momentum; }
  /// Field and polymomentum directions: where the vertical differential acts.
  bool is_vertical() const { return is_field() || is_momentum(); }

  /// The field component a symbol refers to (drops slot/deriv).
  Variable base_field() const { return field(name, indices); }
  /// For a jet of a field or momentum: the undifferentiated symbol.
  Variable jet_base() const {
    return slot >= 0 ? Variable{VarKind::Momentum, name, indices, slot, -1} : base_field();
  }

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable& a, const Variable& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.name <=> b.name; c != 0) return c;
    if (auto c = a.indices <=> b.indices; c != 0) return c;
    if (auto c = a.slot <=> b.slot; c != 0) return c;
    return a.deriv <=> b.deriv;
  }
};

}  // namespace ddw
