#pragma once

#include <string>
#include <vector>

namespace forge {

/// One named condition, its pass flag and the number of nonzero residual
/// terms (0 when pass). `note` carries context such as skipped checks.
struct Condition {
    std::string name;
    bool pass = false;
    std::size_t residual_nonzero_terms = 0;
    std::string note;
};

struct ConditionReport {
    std::vector<Condition> conditions;

    void add(std::string name, bool pass, std::size_t residual_terms = 0, std::string note = "") {
        conditions.push_back({std::move(name), pass, residual_terms, std::move(note)});
    }

    /// Records a residual that must vanish.
    template <class T> void residual(std::string name, const T &r) {
        add(std::move(name), r.is_zero(), r.nonzero_terms());
    }

    bool all_pass() const {
        for (const auto &c : conditions)
            if (!c.pass) return false;
        return true;
    }

    const Condition *find(const std::string &name) const {
        for (const auto &c : conditions)
            if (c.name == name) return &c;
        return nullptr;
    }
};

} // namespace forge
