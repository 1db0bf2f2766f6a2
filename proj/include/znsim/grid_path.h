// Uniformly sampled trajectory: value k lives at time t_start + k*dt.
#pragma once

#include <cstddef>
#include <vector>

namespace znsim {

struct GridPath {
    double t_start = 0.0;
    double dt = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    double time_at(std::size_t k) const {
        return t_start + static_cast<double>(k) * dt;
    }

    double t_end() const { return time_at(values.empty() ? 0 : values.size() - 1); }
};

// Throws std::invalid_argument unless dt > 0, values is non-empty and every
// entry is finite.
void validate(const GridPath& path);

// Index of the grid point nearest to t, clamped to the valid range.
std::size_t nearest_index(const GridPath& path, double t);

// Value at the grid point nearest to t.
double value_near(const GridPath& path, double t);

} // namespace znsim
