#pragma once

#include "dpikit/dataset.hpp"
#include "dpikit/metrics.hpp"
#include "dpikit/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dpikit {

struct EvalReport {
    std::string mode; // averaging mode actually used
    size_t n_samples = 0;
    ConfusionMatrix cm;
    Metrics metrics;
    std::vector<std::string> class_names;
    std::string checkpoint_digest;
    std::string dataset_digest;

    std::string to_json_string() const;
};

// Batched eval-mode classification of a labeled dataset. Predictions take the
// argmax with ties resolved toward the smaller class index; averaging is
// binary_positive_class for two labels and weighted otherwise (macro
// available via the override).
EvalReport evaluate(const Parameters<float>& params, const ModelConfig& config,
                    const std::vector<LabeledRecord>& dataset, int batch_size,
                    const std::vector<std::string>& class_names = {},
                    const Averaging* averaging_override = nullptr);

// Single-payload prediction: tokenize, eval-mode forward, softmax.
std::pair<int32_t, std::vector<double>> infer(const Parameters<float>& params,
                                              const ModelConfig& config,
                                              std::span<const uint8_t> payload);

} // namespace dpikit
