#pragma once

#include "dpikit/model.hpp"
#include "dpikit/trainer_types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dpikit {

// Checkpoint file layout: an 8-byte little-endian manifest length, the JSON
// manifest, then one little-endian raw blob holding every tensor in manifest
// order. The manifest records config, tensor names/shapes/offsets, precision
// and a format version; the loader validates shapes against ModelConfig and
// rejects anything inconsistent.
inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
    ModelConfig model_config;
    Parameters<float> params;
    std::optional<TrainConfig> train_config;
    std::optional<OptimizerState<float>> optimizer; // moments + step counter
    std::vector<std::string> class_names;
    int completed_epochs = 0;
    std::vector<EpochStats> history; // epochs finished so far
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace dpikit
