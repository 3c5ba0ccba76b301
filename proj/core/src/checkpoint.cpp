#include "dpikit/checkpoint.hpp"

#include "dpikit/csv.hpp"
#include "dpikit/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace dpikit {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blob writer assumes a little-endian host");

struct TensorEntry {
    std::string name;
    int rows = 0;
    int cols = 0;
    uint64_t offset = 0;
};

void append_tensor(std::string& blob, const Mat<float>& m) {
    const size_t bytes = m.size() * sizeof(float);
    const size_t at = blob.size();
    blob.resize(at + bytes);
    std::memcpy(blob.data() + at, m.data(), bytes);
}

void read_tensor(const std::string& blob, const TensorEntry& e, Mat<float>& m) {
    if (m.rows() != e.rows || m.cols() != e.cols) {
        throw ShapeMismatchError("checkpoint tensor " + e.name + ": manifest says " +
                                 std::to_string(e.rows) + "x" + std::to_string(e.cols) +
                                 ", model expects " + std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols()));
    }
    const size_t bytes = m.size() * sizeof(float);
    if (e.offset + bytes > blob.size()) {
        throw FormatError("checkpoint blob too short for tensor " + e.name, 1);
    }
    std::memcpy(m.data(), blob.data() + e.offset, bytes);
}

nlohmann::ordered_json epoch_stats_json(const EpochStats& s) {
    return nlohmann::ordered_json{{"epoch", s.epoch},
                                  {"train_loss", s.train_loss},
                                  {"val_loss", s.val_loss},
                                  {"val_accuracy", s.val_accuracy}};
}

EpochStats epoch_stats_from_json(const nlohmann::json& j) {
    EpochStats s;
    s.epoch = j.at("epoch").get<int>();
    s.train_loss = j.at("train_loss").get<double>();
    s.val_loss = j.at("val_loss").get<double>();
    s.val_accuracy = j.at("val_accuracy").get<double>();
    return s;
}

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    std::string blob;
    nlohmann::ordered_json tensors = nlohmann::ordered_json::array();

    auto add = [&](const std::string& name, const Mat<float>& m) {
        tensors.push_back(nlohmann::ordered_json{
            {"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", blob.size()}});
        append_tensor(blob, m);
    };

    const_cast<Parameters<float>&>(ckpt.params)
        .for_each([&](const char*, const std::string& name, Mat<float>& m, bool) { add(name, m); });
    if (ckpt.optimizer) {
        auto& opt = const_cast<OptimizerState<float>&>(*ckpt.optimizer);
        opt.m.for_each(
            [&](const char*, const std::string& name, Mat<float>& m, bool) { add("adam_m." + name, m); });
        opt.v.for_each(
            [&](const char*, const std::string& name, Mat<float>& m, bool) { add("adam_v." + name, m); });
    }

    nlohmann::ordered_json manifest;
    manifest["kind"] = "dpikit-checkpoint";
    manifest["format_version"] = kCheckpointFormatVersion;
    manifest["precision"] = "f32";
    manifest["model_config"] = nlohmann::ordered_json::parse(ckpt.model_config.to_json_string());
    if (ckpt.train_config) {
        manifest["train_config"] = nlohmann::ordered_json::parse(ckpt.train_config->to_json_string());
    }
    manifest["class_names"] = ckpt.class_names;
    manifest["completed_epochs"] = ckpt.completed_epochs;
    auto hist = nlohmann::ordered_json::array();
    for (const EpochStats& s : ckpt.history) hist.push_back(epoch_stats_json(s));
    manifest["history"] = hist;
    if (ckpt.optimizer) manifest["optimizer_step"] = ckpt.optimizer->step;
    manifest["tensors"] = tensors;

    const std::string manifest_text = manifest.dump();
    std::string file;
    uint64_t len = manifest_text.size();
    file.resize(8);
    std::memcpy(file.data(), &len, 8);
    file += manifest_text;
    file += blob;
    atomic_write_file(path, file);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const std::string file = read_file(path);
    if (file.size() < 8) throw FormatError("checkpoint too short", 1);
    uint64_t len = 0;
    std::memcpy(&len, file.data(), 8);
    if (8 + len > file.size()) throw FormatError("checkpoint manifest length out of range", 1);

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(file.substr(8, len));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid checkpoint manifest: ") + e.what(), 1);
    }
    const std::string blob = file.substr(8 + len);

    try {
        if (manifest.at("kind").get<std::string>() != "dpikit-checkpoint") {
            throw FormatError("not a dpikit checkpoint", 1);
        }
        if (manifest.at("format_version").get<int>() != kCheckpointFormatVersion) {
            throw VersionMismatchError(
                "unsupported checkpoint format version " +
                std::to_string(manifest.at("format_version").get<int>()));
        }
        if (manifest.at("precision").get<std::string>() != "f32") {
            throw VersionMismatchError("unsupported checkpoint precision " +
                                       manifest.at("precision").get<std::string>());
        }

        Checkpoint ckpt;
        ckpt.model_config = ModelConfig::from_json_string(manifest.at("model_config").dump());
        if (manifest.contains("train_config")) {
            ckpt.train_config = TrainConfig::from_json_string(manifest.at("train_config").dump());
        }
        ckpt.class_names = manifest.at("class_names").get<std::vector<std::string>>();
        ckpt.completed_epochs = manifest.at("completed_epochs").get<int>();
        for (const auto& e : manifest.at("history")) ckpt.history.push_back(epoch_stats_from_json(e));

        std::vector<TensorEntry> entries;
        for (const auto& t : manifest.at("tensors")) {
            TensorEntry e;
            e.name = t.at("name").get<std::string>();
            e.rows = t.at("rows").get<int>();
            e.cols = t.at("cols").get<int>();
            e.offset = t.at("offset").get<uint64_t>();
            entries.push_back(std::move(e));
        }
        auto entry_for = [&](const std::string& name) -> const TensorEntry* {
            for (const TensorEntry& e : entries) {
                if (e.name == name) return &e;
            }
            return nullptr;
        };

        ckpt.params = Parameters<float>::shaped_like(ckpt.model_config);
        ckpt.params.for_each([&](const char*, const std::string& name, Mat<float>& m, bool) {
            const TensorEntry* e = entry_for(name);
            if (!e) throw FormatError("checkpoint missing tensor " + name, 1);
            read_tensor(blob, *e, m);
        });

        if (manifest.contains("optimizer_step")) {
            OptimizerState<float> opt = OptimizerState<float>::shaped_like(ckpt.model_config);
            opt.step = manifest.at("optimizer_step").get<int64_t>();
            opt.m.for_each([&](const char*, const std::string& name, Mat<float>& m, bool) {
                const TensorEntry* e = entry_for("adam_m." + name);
                if (!e) throw FormatError("checkpoint missing tensor adam_m." + name, 1);
                read_tensor(blob, *e, m);
            });
            opt.v.for_each([&](const char*, const std::string& name, Mat<float>& m, bool) {
                const TensorEntry* e = entry_for("adam_v." + name);
                if (!e) throw FormatError("checkpoint missing tensor adam_v." + name, 1);
                read_tensor(blob, *e, m);
            });
            ckpt.optimizer = std::move(opt);
        }
        return ckpt;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid checkpoint manifest: ") + e.what(), 1);
    }
}

} // namespace dpikit
