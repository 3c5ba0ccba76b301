#include "dpikit/trainer.hpp"

#include "dpikit/errors.hpp"
#include "dpikit/rng.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace dpikit {

namespace {

// Stream tags for deriving independent seeds from the train seed.
constexpr uint64_t kShuffleStream = 1;
constexpr uint64_t kDropoutStream = 2;

} // namespace

void TrainConfig::validate() const {
    if (base_lr <= 0) throw ConfigError("base_lr must be positive");
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (warmup_fraction < 0 || warmup_fraction >= 1) {
        throw ConfigError("warmup_fraction must be in [0, 1)");
    }
    if (weight_decay < 0) throw ConfigError("weight_decay must be nonnegative");
    if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1) {
        throw ConfigError("betas must be in [0, 1)");
    }
    if (adam_eps <= 0) throw ConfigError("adam_eps must be positive");
    if (grad_clip_norm && *grad_clip_norm <= 0) {
        throw ConfigError("grad_clip_norm must be positive when set");
    }
}

std::string TrainConfig::to_json_string() const {
    nlohmann::ordered_json j;
    j["base_lr"] = base_lr;
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["warmup_fraction"] = warmup_fraction;
    j["weight_decay"] = weight_decay;
    j["beta1"] = beta1;
    j["beta2"] = beta2;
    j["adam_eps"] = adam_eps;
    if (grad_clip_norm) {
        j["grad_clip_norm"] = *grad_clip_norm;
    } else {
        j["grad_clip_norm"] = nullptr;
    }
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

TrainConfig TrainConfig::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid train config JSON: ") + e.what());
    }
    static const char* known[] = {"base_lr",      "epochs",  "batch_size", "warmup_fraction",
                                  "weight_decay", "beta1",   "beta2",      "adam_eps",
                                  "grad_clip_norm", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown train config key: " + it.key());
    }
    TrainConfig c;
    try {
        if (j.contains("base_lr")) c.base_lr = j["base_lr"].get<double>();
        if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
        if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
        if (j.contains("warmup_fraction")) c.warmup_fraction = j["warmup_fraction"].get<double>();
        if (j.contains("weight_decay")) c.weight_decay = j["weight_decay"].get<double>();
        if (j.contains("beta1")) c.beta1 = j["beta1"].get<double>();
        if (j.contains("beta2")) c.beta2 = j["beta2"].get<double>();
        if (j.contains("adam_eps")) c.adam_eps = j["adam_eps"].get<double>();
        if (j.contains("grad_clip_norm")) {
            if (j["grad_clip_norm"].is_null()) {
                c.grad_clip_norm = std::nullopt;
            } else {
                c.grad_clip_norm = j["grad_clip_norm"].get<double>();
            }
        }
        if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid train config value: ") + e.what());
    }
    c.validate();
    return c;
}

TrainConfig TrainConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open train config: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

std::string TrainHistory::to_json_string() const {
    nlohmann::ordered_json j;
    auto arr = nlohmann::ordered_json::array();
    for (const EpochStats& s : epochs) {
        arr.push_back(nlohmann::ordered_json{{"epoch", s.epoch},
                                             {"train_loss", s.train_loss},
                                             {"val_loss", s.val_loss},
                                             {"val_accuracy", s.val_accuracy}});
    }
    j["epochs"] = arr;
    return j.dump(2) + "\n";
}

double lr_at(int64_t step, int64_t total_steps, int64_t warmup_steps, double base_lr) {
    if (total_steps <= 0 || step < 0 || step > total_steps || warmup_steps < 0 ||
        warmup_steps >= total_steps) {
        throw InvalidScheduleError("lr_at: need 0 <= step <= total_steps and 0 <= warmup < total");
    }
    if (step < warmup_steps) {
        return base_lr * static_cast<double>(step) / static_cast<double>(warmup_steps);
    }
    return base_lr * static_cast<double>(total_steps - step) /
           static_cast<double>(total_steps - warmup_steps);
}

template <class T>
void adamw_update_tensor(Mat<T>& theta, const Mat<T>& grad, Mat<T>& m, Mat<T>& v, int64_t step,
                         double lr, const TrainConfig& config, bool decayed) {
    theta.require_same_shape(grad, "adamw");
    theta.require_same_shape(m, "adamw");
    theta.require_same_shape(v, "adamw");
    const T b1 = static_cast<T>(config.beta1);
    const T b2 = static_cast<T>(config.beta2);
    const T bc1 = static_cast<T>(1.0 - std::pow(config.beta1, static_cast<double>(step)));
    const T bc2 = static_cast<T>(1.0 - std::pow(config.beta2, static_cast<double>(step)));
    const T eps = static_cast<T>(config.adam_eps);
    const T step_size = static_cast<T>(lr);
    const T decay = decayed ? static_cast<T>(lr * config.weight_decay) : T(0);

    for (size_t i = 0; i < theta.size(); ++i) {
        const T g = grad.data()[i];
        T& mi = m.data()[i];
        T& vi = v.data()[i];
        mi = b1 * mi + (T(1) - b1) * g;
        vi = b2 * vi + (T(1) - b2) * g * g;
        const T m_hat = mi / bc1;
        const T v_hat = vi / bc2;
        theta.data()[i] -= step_size * m_hat / (std::sqrt(v_hat) + eps) + decay * theta.data()[i];
    }
}

template <class T>
void adamw_step(Parameters<T>& params, const Parameters<T>& grads, OptimizerState<T>& state,
                double lr, const TrainConfig& config) {
    state.step += 1;
    const int64_t t = state.step;

    auto& mutable_grads = const_cast<Parameters<T>&>(grads);
    std::vector<Mat<T>*> gs, ms, vs;
    mutable_grads.for_each([&](const char*, const std::string&, Mat<T>& g, bool) { gs.push_back(&g); });
    state.m.for_each([&](const char*, const std::string&, Mat<T>& m, bool) { ms.push_back(&m); });
    state.v.for_each([&](const char*, const std::string&, Mat<T>& v, bool) { vs.push_back(&v); });

    size_t i = 0;
    params.for_each([&](const char*, const std::string&, Mat<T>& theta, bool decayed) {
        adamw_update_tensor(theta, *gs[i], *ms[i], *vs[i], t, lr, config, decayed);
        ++i;
    });
}

template void adamw_update_tensor<float>(Mat<float>&, const Mat<float>&, Mat<float>&, Mat<float>&,
                                         int64_t, double, const TrainConfig&, bool);
template void adamw_update_tensor<double>(Mat<double>&, const Mat<double>&, Mat<double>&,
                                          Mat<double>&, int64_t, double, const TrainConfig&, bool);
template void adamw_step<float>(Parameters<float>&, const Parameters<float>&,
                                OptimizerState<float>&, double, const TrainConfig&);
template void adamw_step<double>(Parameters<double>&, const Parameters<double>&,
                                 OptimizerState<double>&, double, const TrainConfig&);

namespace {

struct TokenizedSet {
    std::vector<TokenSequence> sequences;
    std::vector<int32_t> labels;
};

TokenizedSet tokenize_set(const std::vector<LabeledRecord>& records, int max_len) {
    TokenizedSet set;
    set.sequences.reserve(records.size());
    set.labels.reserve(records.size());
    for (const LabeledRecord& r : records) {
        set.sequences.push_back(encode(r.payload, max_len));
        set.labels.push_back(r.label);
    }
    return set;
}

TokenBatch gather_batch(const TokenizedSet& set, std::span<const size_t> indices,
                        std::vector<int32_t>& labels_out) {
    std::vector<TokenSequence> seqs;
    seqs.reserve(indices.size());
    labels_out.clear();
    for (size_t i : indices) {
        seqs.push_back(set.sequences[i]);
        labels_out.push_back(set.labels[i]);
    }
    return TokenBatch::from_sequences(seqs);
}

double global_grad_norm(Parameters<float>& grads) {
    double sum = 0.0;
    grads.for_each([&](const char*, const std::string&, Mat<float>& g, bool) {
        for (size_t i = 0; i < g.size(); ++i) {
            sum += static_cast<double>(g.data()[i]) * static_cast<double>(g.data()[i]);
        }
    });
    return std::sqrt(sum);
}

struct EvalStats {
    double loss = 0.0;
    double accuracy = 0.0;
};

EvalStats evaluate_split(const Parameters<float>& params, const ModelConfig& config,
                         const TokenizedSet& set, int batch_size) {
    EvalStats stats;
    if (set.sequences.empty()) return stats;
    const size_t n = set.sequences.size();
    double loss_sum = 0.0;
    size_t correct = 0;
    std::vector<size_t> indices;
    std::vector<int32_t> labels;
    for (size_t at = 0; at < n; at += static_cast<size_t>(batch_size)) {
        const size_t end = std::min(n, at + static_cast<size_t>(batch_size));
        indices.clear();
        for (size_t i = at; i < end; ++i) indices.push_back(i);
        TokenBatch batch = gather_batch(set, indices, labels);
        auto fr = forward(params, config, batch, RunMode::eval);
        auto ce = cross_entropy(fr.logits, labels);
        loss_sum += ce.loss * static_cast<double>(end - at);
        for (int r = 0; r < fr.logits.rows(); ++r) {
            int32_t arg = 0;
            const float* row = fr.logits.row(r);
            for (int c = 1; c < fr.logits.cols(); ++c) {
                if (row[c] > row[arg]) arg = c;
            }
            if (arg == labels[static_cast<size_t>(r)]) ++correct;
        }
    }
    stats.loss = loss_sum / static_cast<double>(n);
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return stats;
}

} // namespace

TrainOutputs train(const ModelConfig& model_config, const TrainConfig& train_config,
                   const std::vector<LabeledRecord>& train_set,
                   const std::vector<LabeledRecord>& validation_set,
                   const std::filesystem::path& out_dir,
                   const std::vector<std::string>& class_names, const Checkpoint* resume,
                   int run_epochs_limit, bool log_epochs) {
    model_config.validate();
    train_config.validate();
    if (train_set.empty()) throw Error("train: empty training set");

    std::filesystem::create_directories(out_dir);

    const TokenizedSet train_tokens = tokenize_set(train_set, model_config.max_positions);
    const TokenizedSet val_tokens = tokenize_set(validation_set, model_config.max_positions);

    const size_t n = train_set.size();
    const int64_t steps_per_epoch =
        static_cast<int64_t>((n + train_config.batch_size - 1) / train_config.batch_size);
    const int64_t total_steps = static_cast<int64_t>(train_config.epochs) * steps_per_epoch;
    const int64_t warmup_steps =
        static_cast<int64_t>(train_config.warmup_fraction * static_cast<double>(total_steps));

    Parameters<float> params =
        resume ? resume->params : init_parameters<float>(model_config);
    OptimizerState<float> state =
        resume && resume->optimizer ? *resume->optimizer
                                    : OptimizerState<float>::shaped_like(model_config);
    int start_epoch = resume ? resume->completed_epochs : 0;
    TrainHistory history;
    if (resume) history.epochs = resume->history;

    double best_accuracy = -1.0;
    for (const EpochStats& s : history.epochs) best_accuracy = std::max(best_accuracy, s.val_accuracy);

    const uint64_t shuffle_base = mix_seed(train_config.seed, kShuffleStream);
    const uint64_t dropout_base = mix_seed(train_config.seed, kDropoutStream);

    int end_epoch = train_config.epochs;
    if (run_epochs_limit >= 0) end_epoch = std::min(end_epoch, start_epoch + run_epochs_limit);

    const std::filesystem::path final_path = out_dir / "final.ckpt";
    const std::filesystem::path best_path = out_dir / "best.ckpt";

    auto make_checkpoint = [&](int completed) {
        Checkpoint ckpt;
        ckpt.model_config = model_config;
        ckpt.params = params;
        ckpt.train_config = train_config;
        ckpt.optimizer = state;
        ckpt.class_names = class_names;
        ckpt.completed_epochs = completed;
        ckpt.history = history.epochs;
        return ckpt;
    };

    std::vector<size_t> order(n);
    std::vector<size_t> batch_indices;
    std::vector<int32_t> batch_labels;

    for (int epoch = start_epoch; epoch < end_epoch; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();

        for (size_t i = 0; i < n; ++i) order[i] = i;
        SplitMix64 shuffle_rng(mix_seed(shuffle_base, static_cast<uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        for (int64_t b = 0; b < steps_per_epoch; ++b) {
            const int64_t step = static_cast<int64_t>(epoch) * steps_per_epoch + b;
            const size_t at = static_cast<size_t>(b) * train_config.batch_size;
            const size_t end = std::min(n, at + static_cast<size_t>(train_config.batch_size));
            batch_indices.assign(order.begin() + static_cast<ptrdiff_t>(at),
                                 order.begin() + static_cast<ptrdiff_t>(end));

            TokenBatch batch = gather_batch(train_tokens, batch_indices, batch_labels);
            auto fr = forward(params, model_config, batch, RunMode::train,
                              mix_seed(dropout_base, static_cast<uint64_t>(step)));
            auto ce = cross_entropy(fr.logits, batch_labels);
            if (!std::isfinite(ce.loss)) throw NonFiniteLossError(step);
            loss_sum += ce.loss * static_cast<double>(end - at);

            Parameters<float> grads = backward(params, model_config, fr.cache.get(), ce.dlogits);
            if (train_config.grad_clip_norm) {
                const double norm = global_grad_norm(grads);
                if (!std::isfinite(norm)) throw NonFiniteLossError(step);
                if (norm > *train_config.grad_clip_norm) {
                    const float scale = static_cast<float>(*train_config.grad_clip_norm / norm);
                    grads.for_each([&](const char*, const std::string&, Mat<float>& g, bool) {
                        g.scale_in_place(scale);
                    });
                }
            }
            const double lr = lr_at(step, total_steps, warmup_steps, train_config.base_lr);
            adamw_step(params, grads, state, lr, train_config);
        }

        const EvalStats val =
            evaluate_split(params, model_config, val_tokens, train_config.batch_size);

        EpochStats stats;
        stats.epoch = epoch + 1;
        stats.train_loss = loss_sum / static_cast<double>(n);
        stats.val_loss = val.loss;
        stats.val_accuracy = val.accuracy;
        stats.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
        history.epochs.push_back(stats);

        if (log_epochs) {
            std::fprintf(stderr,
                         "epoch %d/%d  train_loss %.6f  val_loss %.6f  val_acc %.4f  (%.1fs)\n",
                         stats.epoch, train_config.epochs, stats.train_loss, stats.val_loss,
                         stats.val_accuracy, stats.wall_seconds);
        }

        if (!validation_set.empty() && val.accuracy > best_accuracy) {
            best_accuracy = val.accuracy;
            save_checkpoint(make_checkpoint(epoch + 1), best_path);
        }
    }

    Checkpoint final_ckpt = make_checkpoint(end_epoch);
    save_checkpoint(final_ckpt, final_path);
    if (validation_set.empty() && !std::filesystem::exists(best_path)) {
        save_checkpoint(final_ckpt, best_path);
    }

    TrainOutputs out;
    out.history = std::move(history);
    out.final_checkpoint = std::move(final_ckpt);
    out.final_path = final_path;
    out.best_path = best_path;
    out.total_steps = total_steps;
    return out;
}

} // namespace dpikit
