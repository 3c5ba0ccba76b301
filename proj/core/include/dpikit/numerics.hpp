#pragma once

#include "dpikit/errors.hpp"
#include "dpikit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace dpikit {

// Additive-mask entries use a large negative constant instead of -inf so that
// exp() underflows to exactly zero without producing NaNs.
inline constexpr double kMaskSentinel = -1e9;

// Row-major dense matrix. float for training, double for gradient checks;
// every kernel below is templated over both.
template <class T>
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, T(0)) {}
    Mat(int rows, int cols, std::vector<T> values) : rows_(rows), cols_(cols), data_(std::move(values)) {
        if (data_.size() != static_cast<size_t>(rows) * cols) {
            throw ShapeMismatchError("matrix data length does not match rows*cols");
        }
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    T* row(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }
    const T* row(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

    T& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    T operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool operator==(const Mat& o) const = default;

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    void add_in_place(const Mat& o) {
        require_same_shape(o, "add");
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    }

    void scale_in_place(T s) {
        for (auto& v : data_) v *= s;
    }

    template <class U>
    Mat<U> cast() const {
        Mat<U> out(rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
        return out;
    }

    void require_same_shape(const Mat& o, const char* op) const {
        if (!same_shape(o)) {
            throw ShapeMismatchError(std::string(op) + ": shapes (" + std::to_string(rows_) + "x" +
                                     std::to_string(cols_) + ") vs (" + std::to_string(o.rows_) + "x" +
                                     std::to_string(o.cols_) + ")");
        }
    }

    // NaN/Inf anywhere is a numeric-health failure.
    void assert_finite(const char* context) const {
        for (const T& v : data_) {
            if (!std::isfinite(static_cast<double>(v))) {
                throw NumericHealthError(std::string("non-finite value in ") + context);
            }
        }
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using MatF = Mat<float>;
using MatD = Mat<double>;

template <class T>
Mat<T> identity(int n) {
    Mat<T> m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
}

template <class T>
Mat<T> transpose(const Mat<T>& a) {
    Mat<T> t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

// C = A * B
template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
    if (a.cols() != b.rows()) {
        throw ShapeMismatchError("matmul: inner dimensions " + std::to_string(a.cols()) + " vs " +
                                 std::to_string(b.rows()));
    }
    Mat<T> c(a.rows(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < n; ++i) {
        const T* arow = a.row(i);
        T* crow = c.row(i);
        for (int p = 0; p < k; ++p) {
            const T av = arow[p];
            const T* brow = b.row(p);
            for (int j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

// C = A * B^T
template <class T>
Mat<T> matmul_nt(const Mat<T>& a, const Mat<T>& b) {
    if (a.cols() != b.cols()) {
        throw ShapeMismatchError("matmul_nt: inner dimensions " + std::to_string(a.cols()) + " vs " +
                                 std::to_string(b.cols()));
    }
    Mat<T> c(a.rows(), b.rows());
    const int n = a.rows(), k = a.cols(), m = b.rows();
    for (int i = 0; i < n; ++i) {
        const T* arow = a.row(i);
        T* crow = c.row(i);
        for (int j = 0; j < m; ++j) {
            const T* brow = b.row(j);
            T acc = T(0);
            for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] = acc;
        }
    }
    return c;
}

// C = A^T * B
template <class T>
Mat<T> matmul_tn(const Mat<T>& a, const Mat<T>& b) {
    if (a.rows() != b.rows()) {
        throw ShapeMismatchError("matmul_tn: inner dimensions " + std::to_string(a.rows()) + " vs " +
                                 std::to_string(b.rows()));
    }
    Mat<T> c(a.cols(), b.cols());
    const int n = a.rows(), k = a.cols(), m = b.cols();
    for (int i = 0; i < n; ++i) {
        const T* arow = a.row(i);
        const T* brow = b.row(i);
        for (int p = 0; p < k; ++p) {
            const T av = arow[p];
            T* crow = c.row(p);
            for (int j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

// dA = dC * B^T, dB = A^T * dC
template <class T>
void matmul_backward(const Mat<T>& a, const Mat<T>& b, const Mat<T>& dc, Mat<T>& da, Mat<T>& db) {
    da = matmul_nt(dc, b);
    db = matmul_tn(a, dc);
}

// Row-wise softmax with an optional additive mask (entries 0 or the negative
// sentinel). Rows whose every entry is masked come back all-zero.
template <class T>
Mat<T> softmax_rows(const Mat<T>& x, const Mat<T>* mask = nullptr) {
    if (mask) x.require_same_shape(*mask, "softmax mask");
    Mat<T> y(x.rows(), x.cols());
    const T sentinel_cut = T(kMaskSentinel / 2);
    for (int i = 0; i < x.rows(); ++i) {
        const T* xr = x.row(i);
        const T* mr = mask ? mask->row(i) : nullptr;
        T* yr = y.row(i);

        T max_v = -std::numeric_limits<T>::infinity();
        bool any_live = false;
        for (int j = 0; j < x.cols(); ++j) {
            const T v = xr[j] + (mr ? mr[j] : T(0));
            if (!mr || mr[j] > sentinel_cut) any_live = true;
            if (v > max_v) max_v = v;
        }
        if (!any_live) continue; // fully-masked row: all zeros

        T sum = T(0);
        for (int j = 0; j < x.cols(); ++j) {
            const T v = std::exp(xr[j] + (mr ? mr[j] : T(0)) - max_v);
            yr[j] = v;
            sum += v;
        }
        const T inv = T(1) / sum;
        for (int j = 0; j < x.cols(); ++j) yr[j] *= inv;
    }
    return y;
}

// dX from the softmax output y: dx_i = y_i * (dy_i - sum_j dy_j y_j), per row.
template <class T>
Mat<T> softmax_rows_backward(const Mat<T>& y, const Mat<T>& dy) {
    y.require_same_shape(dy, "softmax backward");
    Mat<T> dx(y.rows(), y.cols());
    for (int i = 0; i < y.rows(); ++i) {
        const T* yr = y.row(i);
        const T* dyr = dy.row(i);
        T* dxr = dx.row(i);
        T dot = T(0);
        for (int j = 0; j < y.cols(); ++j) dot += dyr[j] * yr[j];
        for (int j = 0; j < y.cols(); ++j) dxr[j] = yr[j] * (dyr[j] - dot);
    }
    return dx;
}

template <class T>
struct LayerNormCache {
    std::vector<T> mean;
    std::vector<T> rstd;
};

// Per-row normalization with 1/cols variance, then an affine map.
// gamma/beta are 1 x cols.
template <class T>
Mat<T> layer_norm(const Mat<T>& x, const Mat<T>& gamma, const Mat<T>& beta, T eps,
                  LayerNormCache<T>* cache = nullptr) {
    if (gamma.cols() != x.cols() || beta.cols() != x.cols() || gamma.rows() != 1 || beta.rows() != 1) {
        throw ShapeMismatchError("layer_norm: gamma/beta must be 1 x cols");
    }
    if (eps <= T(0)) throw Error("layer_norm: eps must be positive");
    Mat<T> y(x.rows(), x.cols());
    if (cache) {
        cache->mean.resize(static_cast<size_t>(x.rows()));
        cache->rstd.resize(static_cast<size_t>(x.rows()));
    }
    const T* g = gamma.row(0);
    const T* b = beta.row(0);
    const T inv_n = T(1) / T(x.cols());
    for (int i = 0; i < x.rows(); ++i) {
        const T* xr = x.row(i);
        T* yr = y.row(i);
        T mean = T(0);
        for (int j = 0; j < x.cols(); ++j) mean += xr[j];
        mean *= inv_n;
        T var = T(0);
        for (int j = 0; j < x.cols(); ++j) {
            const T d = xr[j] - mean;
            var += d * d;
        }
        var *= inv_n;
        const T rstd = T(1) / std::sqrt(var + eps);
        for (int j = 0; j < x.cols(); ++j) yr[j] = (xr[j] - mean) * rstd * g[j] + b[j];
        if (cache) {
            cache->mean[static_cast<size_t>(i)] = mean;
            cache->rstd[static_cast<size_t>(i)] = rstd;
        }
    }
    return y;
}

template <class T>
void layer_norm_backward(const Mat<T>& x, const Mat<T>& gamma, const LayerNormCache<T>& cache,
                         const Mat<T>& dy, Mat<T>& dx, Mat<T>& dgamma, Mat<T>& dbeta) {
    x.require_same_shape(dy, "layer_norm backward");
    dx = Mat<T>(x.rows(), x.cols());
    dgamma = Mat<T>(1, x.cols());
    dbeta = Mat<T>(1, x.cols());
    const T* g = gamma.row(0);
    const T inv_n = T(1) / T(x.cols());
    for (int i = 0; i < x.rows(); ++i) {
        const T* xr = x.row(i);
        const T* dyr = dy.row(i);
        T* dxr = dx.row(i);
        const T mean = cache.mean[static_cast<size_t>(i)];
        const T rstd = cache.rstd[static_cast<size_t>(i)];

        // xhat = (x - mean) * rstd; dxhat = dy * gamma
        T sum_dxhat = T(0);
        T sum_dxhat_xhat = T(0);
        for (int j = 0; j < x.cols(); ++j) {
            const T xhat = (xr[j] - mean) * rstd;
            const T dxhat = dyr[j] * g[j];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat;
            dgamma(0, j) += dyr[j] * xhat;
            dbeta(0, j) += dyr[j];
        }
        for (int j = 0; j < x.cols(); ++j) {
            const T xhat = (xr[j] - mean) * rstd;
            const T dxhat = dyr[j] * g[j];
            dxr[j] = rstd * (dxhat - inv_n * sum_dxhat - xhat * inv_n * sum_dxhat_xhat);
        }
    }
}

// Exact GELU, x * Phi(x) with the standard normal CDF.
template <class T>
Mat<T> gelu(const Mat<T>& x) {
    Mat<T> y(x.rows(), x.cols());
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    for (size_t i = 0; i < x.size(); ++i) {
        const double v = static_cast<double>(x.data()[i]);
        y.data()[i] = static_cast<T>(v * 0.5 * (1.0 + std::erf(v * inv_sqrt2)));
    }
    return y;
}

// d/dx gelu = Phi(x) + x * phi(x)
template <class T>
Mat<T> gelu_backward(const Mat<T>& x, const Mat<T>& dy) {
    x.require_same_shape(dy, "gelu backward");
    Mat<T> dx(x.rows(), x.cols());
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    constexpr double inv_sqrt2pi = 0.39894228040143267794;
    for (size_t i = 0; i < x.size(); ++i) {
        const double v = static_cast<double>(x.data()[i]);
        const double cdf = 0.5 * (1.0 + std::erf(v * inv_sqrt2));
        const double pdf = inv_sqrt2pi * std::exp(-0.5 * v * v);
        dx.data()[i] = static_cast<T>(static_cast<double>(dy.data()[i]) * (cdf + v * pdf));
    }
    return dx;
}

template <class T>
struct CrossEntropyResult {
    double loss = 0.0;
    Mat<T> dlogits;
};

// Mean negative log-likelihood over the batch, log-sum-exp stabilized;
// dlogits = (softmax - onehot) / batch.
template <class T>
CrossEntropyResult<T> cross_entropy(const Mat<T>& logits, std::span<const int32_t> labels) {
    if (static_cast<size_t>(logits.rows()) != labels.size()) {
        throw ShapeMismatchError("cross_entropy: batch " + std::to_string(logits.rows()) + " vs " +
                                 std::to_string(labels.size()) + " labels");
    }
    if (logits.rows() == 0) throw EmptyMatrixError("cross_entropy: empty batch");

    CrossEntropyResult<T> res;
    res.dlogits = Mat<T>(logits.rows(), logits.cols());
    const T inv_batch = T(1) / T(logits.rows());
    double total = 0.0;
    for (int i = 0; i < logits.rows(); ++i) {
        const int32_t label = labels[static_cast<size_t>(i)];
        if (label < 0 || label >= logits.cols()) throw LabelOutOfRangeError(label, logits.cols());
        const T* lr = logits.row(i);
        T* dr = res.dlogits.row(i);

        T max_v = lr[0];
        for (int j = 1; j < logits.cols(); ++j) max_v = std::max(max_v, lr[j]);
        double sum = 0.0;
        for (int j = 0; j < logits.cols(); ++j) sum += std::exp(static_cast<double>(lr[j] - max_v));
        const double lse = static_cast<double>(max_v) + std::log(sum);
        total += lse - static_cast<double>(lr[label]);

        for (int j = 0; j < logits.cols(); ++j) {
            const double p = std::exp(static_cast<double>(lr[j] - max_v)) / sum;
            dr[j] = static_cast<T>(p) * inv_batch;
        }
        dr[label] -= inv_batch;
    }
    res.loss = total / logits.rows();
    return res;
}

// ---- finite differences -----------------------------------------------------

struct FdTensor {
    std::string name;
    Mat<double>* value = nullptr;
    const Mat<double>* analytic_grad = nullptr;
};

struct FdResult {
    double max_rel_err = 0.0;
    std::string worst_tensor;
    size_t worst_index = 0;
};

// Central-difference check of analytic gradients, sampling coordinates for
// large tensors (at least min(size, samples_per_tensor) per tensor).
// Relative error is |a - b| / max(1, |a|, |b|). Evaluation must be at double
// precision and with all stochastic behavior (dropout) disabled.
FdResult finite_difference_check(const std::function<double()>& f, std::span<FdTensor> tensors,
                                 double h = 1e-5, int samples_per_tensor = 64, uint64_t seed = 0x5eed);

} // namespace dpikit
