#pragma once

#include "dpikit/checkpoint.hpp"
#include "dpikit/dataset.hpp"
#include "dpikit/model.hpp"
#include "dpikit/trainer_types.hpp"

#include <filesystem>
#include <vector>

namespace dpikit {

// Piecewise-linear warmup/decay schedule: 0 -> base_lr over the warmup steps,
// then base_lr -> 0 over the remainder. Continuous at the knee.
double lr_at(int64_t step, int64_t total_steps, int64_t warmup_steps, double base_lr);

// Decoupled-weight-decay Adam. Decay applies to weight matrices only, never
// to biases or layer-norm parameters. The step counter increments once per
// call.
template <class T>
void adamw_step(Parameters<T>& params, const Parameters<T>& grads, OptimizerState<T>& state,
                double lr, const TrainConfig& config);

// Single-tensor update, exposed for oracle tests.
template <class T>
void adamw_update_tensor(Mat<T>& theta, const Mat<T>& grad, Mat<T>& m, Mat<T>& v, int64_t step,
                         double lr, const TrainConfig& config, bool decayed);

struct TrainOutputs {
    TrainHistory history;
    Checkpoint final_checkpoint;
    std::filesystem::path final_path;
    std::filesystem::path best_path;
    int64_t total_steps = 0;
};

// Full training loop: per-epoch seeded reshuffle, batched forward/backward,
// optional global-norm clipping, AdamW with the warmup/decay schedule, and
// per-epoch validation. Writes "final.ckpt" (end of run) and "best.ckpt"
// (highest validation accuracy) under out_dir, atomically.
//
// `resume` continues a run from a final.ckpt written earlier; the schedule
// still spans train_config.epochs in total. `run_epochs_limit` (when >= 0)
// stops the run early after that many additional epochs, which is how a
// mid-run checkpoint is produced deterministically.
TrainOutputs train(const ModelConfig& model_config, const TrainConfig& train_config,
                   const std::vector<LabeledRecord>& train_set,
                   const std::vector<LabeledRecord>& validation_set,
                   const std::filesystem::path& out_dir,
                   const std::vector<std::string>& class_names,
                   const Checkpoint* resume = nullptr, int run_epochs_limit = -1,
                   bool log_epochs = false);

} // namespace dpikit
