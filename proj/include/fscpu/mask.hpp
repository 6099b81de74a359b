#pragma once

#include <cstdint>
#include <vector>

namespace fscpu {

// A binary feature-selection mask with its cost context. After repair() the
// mask is feasible (total cost <= budget) and maximal (no unselected feature
// still fits into the remaining budget).
struct FeatureMask {
    std::vector<std::uint8_t> bits;
    std::vector<double> costs;  // per-feature positive costs
    double budget = 0.0;

    std::size_t size() const { return bits.size(); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : bits) c += b;
        return c;
    }

    double total_cost() const {
        double c = 0.0;
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) c += costs[i];
        return c;
    }

    bool feasible() const { return total_cost() <= budget; }

    bool maximal() const {
        const double slack = budget - total_cost();
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (!bits[i] && costs[i] <= slack) return false;
        return true;
    }
};

inline std::vector<double> unit_costs(std::size_t d) { return std::vector<double>(d, 1.0); }

}  // namespace fscpu
