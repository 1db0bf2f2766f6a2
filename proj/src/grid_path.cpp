#include "znsim/grid_path.h"

#include <cmath>
#include <stdexcept>

namespace znsim {

void validate(const GridPath& path) {
    if (!(path.dt > 0.0))
        throw std::invalid_argument("grid path: dt must be positive");
    if (path.values.empty())
        throw std::invalid_argument("grid path: values must be non-empty");
    for (double v : path.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("grid path: values must be finite");
}

std::size_t nearest_index(const GridPath& path, double t) {
    double k = std::round((t - path.t_start) / path.dt);
    if (k < 0.0) return 0;
    std::size_t last = path.values.empty() ? 0 : path.values.size() - 1;
    if (k > static_cast<double>(last)) return last;
    return static_cast<std::size_t>(k);
}

double value_near(const GridPath& path, double t) {
    return path.values[nearest_index(path, t)];
}

} // namespace znsim
