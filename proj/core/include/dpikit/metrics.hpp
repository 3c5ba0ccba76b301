#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dpikit {

struct ConfusionMatrix {
    int n_classes = 0;
    std::vector<int64_t> counts; // row-major, counts[true][predicted]

    explicit ConfusionMatrix(int classes = 0)
        : n_classes(classes), counts(static_cast<size_t>(classes) * classes, 0) {}

    int64_t& at(int truth, int predicted) {
        return counts[static_cast<size_t>(truth) * n_classes + predicted];
    }
    int64_t at(int truth, int predicted) const {
        return counts[static_cast<size_t>(truth) * n_classes + predicted];
    }
    int64_t total() const {
        int64_t t = 0;
        for (int64_t c : counts) t += c;
        return t;
    }

    bool operator==(const ConfusionMatrix&) const = default;
};

enum class Averaging {
    binary_positive_class, // label 1 (malicious) is the positive class
    weighted,              // one-vs-rest, support-weighted
    macro,                 // one-vs-rest, unweighted mean
};

const char* to_string(Averaging a);

struct PerClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int64_t support = 0;
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    Averaging averaging = Averaging::binary_positive_class;
    std::vector<PerClassMetrics> per_class;
};

ConfusionMatrix confusion(std::span<const int32_t> predictions, std::span<const int32_t> truth,
                          int n_classes);

// Zero denominators produce 0, never NaN. Support-weighted recall equals
// accuracy identically, which is the signature this mode is selected by.
Metrics metrics_from_confusion(const ConfusionMatrix& cm, Averaging averaging);

} // namespace dpikit
