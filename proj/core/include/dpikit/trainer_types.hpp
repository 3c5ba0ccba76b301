#pragma once

#include "dpikit/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dpikit {

struct TrainConfig {
    double base_lr = 2e-5;
    int epochs = 5;
    int batch_size = 32;
    double warmup_fraction = 0.1;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::optional<double> grad_clip_norm = 1.0; // nullopt disables clipping
    uint64_t seed = 0;

    void validate() const;
    std::string to_json_string() const;
    static TrainConfig from_json_string(const std::string& text);
    static TrainConfig from_json_file(const std::filesystem::path& path);

    bool operator==(const TrainConfig&) const = default;
};

// AdamW first/second moment accumulators, same shapes as the parameters.
// step counts applied updates.
template <class T>
struct OptimizerState {
    Parameters<T> m;
    Parameters<T> v;
    int64_t step = 0;

    static OptimizerState shaped_like(const ModelConfig& config) {
        return OptimizerState{Parameters<T>::shaped_like(config), Parameters<T>::shaped_like(config), 0};
    }
};

struct EpochStats {
    int epoch = 0; // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double wall_seconds = 0.0; // excluded from serialized history (not reproducible)

    bool operator==(const EpochStats& o) const {
        return epoch == o.epoch && train_loss == o.train_loss && val_loss == o.val_loss &&
               val_accuracy == o.val_accuracy;
    }
};

struct TrainHistory {
    std::vector<EpochStats> epochs;

    // Deterministic serialization: wall_seconds is reported on the console
    // only, so identical runs produce identical history files.
    std::string to_json_string() const;

    bool operator==(const TrainHistory&) const = default;
};

} // namespace dpikit
