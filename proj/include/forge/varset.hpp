#pragma once

#include <memory>
#include <string>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

/// Role of a formal variable. Log variables t_i carry the dt_i/t_i poles,
/// holomorphic variables t_k are ordinary base coordinates, unfolding
/// variables y_a are the extra parameters of an unfolding, and z is the
/// twistor coordinate (at most one).
enum class VarClass { log_, hol, unfold, z };

std::string var_class_name(VarClass c);
VarClass var_class_parse(const std::string &s);

class VariableSet {
  public:
    VariableSet() = default;
    VariableSet(std::vector<std::string> names, std::vector<VarClass> classes);

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string> &names() const { return names_; }
    const std::vector<VarClass> &classes() const { return classes_; }
    const std::string &name(std::size_t i) const { return names_.at(i); }
    VarClass var_class(std::size_t i) const { return classes_.at(i); }

    /// Index of a named variable; throws on unknown name.
    std::size_t index(const std::string &name) const;
    bool has(const std::string &name) const;

    /// Indices of all variables of one class, in declaration order.
    std::vector<std::size_t> indices_of(VarClass c) const;
    /// Index of the z variable; throws when absent.
    std::size_t z_index() const;
    bool has_z() const;

    friend bool operator==(const VariableSet &a, const VariableSet &b) {
        return a.names_ == b.names_ && a.classes_ == b.classes_;
    }
    friend bool operator!=(const VariableSet &a, const VariableSet &b) { return !(a == b); }

  private:
    std::vector<std::string> names_;
    std::vector<VarClass> classes_;
};

using VarSetPtr = std::shared_ptr<const VariableSet>;

inline VarSetPtr make_vars(std::vector<std::string> names, std::vector<VarClass> classes) {
    return std::make_shared<const VariableSet>(std::move(names), std::move(classes));
}

} // namespace forge
