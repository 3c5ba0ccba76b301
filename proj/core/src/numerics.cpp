#include "dpikit/numerics.hpp"

#include <algorithm>

namespace dpikit {

FdResult finite_difference_check(const std::function<double()>& f, std::span<FdTensor> tensors,
                                 double h, int samples_per_tensor, uint64_t seed) {
    FdResult result;
    SplitMix64 rng(seed);
    for (const FdTensor& t : tensors) {
        Mat<double>& value = *t.value;
        const Mat<double>& grad = *t.analytic_grad;
        value.require_same_shape(grad, "finite_difference_check");
        if (value.size() == 0) continue;

        std::vector<size_t> coords;
        if (value.size() <= static_cast<size_t>(samples_per_tensor)) {
            coords.resize(value.size());
            for (size_t i = 0; i < coords.size(); ++i) coords[i] = i;
        } else {
            coords.reserve(static_cast<size_t>(samples_per_tensor));
            for (int i = 0; i < samples_per_tensor; ++i) {
                coords.push_back(static_cast<size_t>(rng.uniform(value.size())));
            }
        }

        for (size_t idx : coords) {
            const double saved = value.data()[idx];
            value.data()[idx] = saved + h;
            const double f_plus = f();
            value.data()[idx] = saved - h;
            const double f_minus = f();
            value.data()[idx] = saved;

            const double numeric = (f_plus - f_minus) / (2.0 * h);
            const double analytic = grad.data()[idx];
            const double rel = std::abs(numeric - analytic) /
                               std::max({1.0, std::abs(numeric), std::abs(analytic)});
            if (rel > result.max_rel_err) {
                result.max_rel_err = rel;
                result.worst_tensor = t.name;
                result.worst_index = idx;
            }
        }
    }
    return result;
}

} // namespace dpikit
