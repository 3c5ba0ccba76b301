#include "dpikit/metrics.hpp"

#include "dpikit/errors.hpp"

namespace dpikit {

const char* to_string(Averaging a) {
    switch (a) {
    case Averaging::binary_positive_class: return "binary_positive_class";
    case Averaging::weighted: return "weighted";
    case Averaging::macro: return "macro";
    }
    return "?";
}

ConfusionMatrix confusion(std::span<const int32_t> predictions, std::span<const int32_t> truth,
                          int n_classes) {
    if (predictions.size() != truth.size()) {
        throw LengthMismatchError("confusion: " + std::to_string(predictions.size()) +
                                  " predictions vs " + std::to_string(truth.size()) + " labels");
    }
    ConfusionMatrix cm(n_classes);
    for (size_t i = 0; i < truth.size(); ++i) {
        const int32_t t = truth[i];
        const int32_t p = predictions[i];
        if (t < 0 || t >= n_classes) throw LabelOutOfRangeError(t, n_classes);
        if (p < 0 || p >= n_classes) throw LabelOutOfRangeError(p, n_classes);
        ++cm.at(t, p);
    }
    return cm;
}

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

PerClassMetrics one_vs_rest(const ConfusionMatrix& cm, int cls) {
    int64_t tp = cm.at(cls, cls);
    int64_t fp = 0, fn = 0, support = 0;
    for (int other = 0; other < cm.n_classes; ++other) {
        if (other != cls) {
            fp += cm.at(other, cls);
            fn += cm.at(cls, other);
        }
        support += cm.at(cls, other);
    }
    PerClassMetrics m;
    m.support = support;
    m.precision = ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
    m.recall = ratio(static_cast<double>(tp), static_cast<double>(tp + fn));
    m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

} // namespace

Metrics metrics_from_confusion(const ConfusionMatrix& cm, Averaging averaging) {
    const int64_t total = cm.total();
    if (cm.n_classes <= 0 || total == 0) throw EmptyMatrixError("metrics: empty confusion matrix");

    Metrics metrics;
    metrics.averaging = averaging;

    int64_t trace = 0;
    for (int c = 0; c < cm.n_classes; ++c) trace += cm.at(c, c);
    metrics.accuracy = static_cast<double>(trace) / static_cast<double>(total);

    metrics.per_class.reserve(static_cast<size_t>(cm.n_classes));
    for (int c = 0; c < cm.n_classes; ++c) metrics.per_class.push_back(one_vs_rest(cm, c));

    switch (averaging) {
    case Averaging::binary_positive_class: {
        if (cm.n_classes != 2) {
            throw ShapeMismatchError("binary averaging requires exactly 2 classes");
        }
        const PerClassMetrics& positive = metrics.per_class[1];
        metrics.precision = positive.precision;
        metrics.recall = positive.recall;
        metrics.f1 = positive.f1;
        break;
    }
    case Averaging::weighted: {
        double p = 0.0, r = 0.0, f = 0.0;
        for (const PerClassMetrics& m : metrics.per_class) {
            const double w = static_cast<double>(m.support) / static_cast<double>(total);
            p += w * m.precision;
            r += w * m.recall;
            f += w * m.f1;
        }
        metrics.precision = p;
        metrics.recall = r;
        metrics.f1 = f;
        break;
    }
    case Averaging::macro: {
        double p = 0.0, r = 0.0, f = 0.0;
        for (const PerClassMetrics& m : metrics.per_class) {
            p += m.precision;
            r += m.recall;
            f += m.f1;
        }
        const double k = static_cast<double>(cm.n_classes);
        metrics.precision = p / k;
        metrics.recall = r / k;
        metrics.f1 = f / k;
        break;
    }
    }
    return metrics;
}

} // namespace dpikit
