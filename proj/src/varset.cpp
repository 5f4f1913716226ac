#include "forge/varset.hpp"

#include <set>

namespace forge {

std::string var_class_name(VarClass c) {
    switch (c) {
        case VarClass::log_: return "log";
        case VarClass::hol: return "hol";
        case VarClass::unfold: return "unfold";
        case VarClass::z: return "z";
    }
    return "?";
}

VarClass var_class_parse(const std::string &s) {
    if (s == "log") return VarClass::log_;
    if (s == "hol") return VarClass::hol;
    if (s == "unfold") return VarClass::unfold;
    if (s == "z") return VarClass::z;
    throw ParseError("unknown variable class '" + s + "'");
}

VariableSet::VariableSet(std::vector<std::string> names, std::vector<VarClass> classes)
    : names_(std::move(names)), classes_(std::move(classes)) {
    if (names_.size() != classes_.size()) throw StructuralError("variable names/classes length mismatch");
    std::set<std::string> seen;
    int zs = 0;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!seen.insert(names_[i]).second) throw StructuralError("duplicate variable name '" + names_[i] + "'");
        if (classes_[i] == VarClass::z) ++zs;
    }
    if (zs > 1) throw StructuralError("more than one z variable");
}

std::size_t VariableSet::index(const std::string &name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw StructuralError("unknown variable '" + name + "'");
}

bool VariableSet::has(const std::string &name) const {
    for (const auto &n : names_)
        if (n == name) return true;
    return false;
}

std::vector<std::size_t> VariableSet::indices_of(VarClass c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (classes_[i] == c) out.push_back(i);
    return out;
}

std::size_t VariableSet::z_index() const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (classes_[i] == VarClass::z) return i;
    throw StructuralError("variable set has no z variable");
}

bool VariableSet::has_z() const {
    for (auto c : classes_)
        if (c == VarClass::z) return true;
    return false;
}

} // namespace forge
