#pragma once

#include "dpikit/numerics.hpp"
#include "dpikit/tokenizer.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dpikit {

// BERT-style encoder configuration. Defaults are the paper-scale values; the
// test suites run reduced configurations.
struct ModelConfig {
    int vocab_size = 258;
    int hidden_size = 768;
    int num_layers = 12;
    int num_heads = 12;
    int intermediate_size = 3072;
    int max_positions = 730;
    int type_vocab_size = 2;
    int num_labels = 2;
    double dropout = 0.1;
    double layer_norm_eps = 1e-12;
    double init_std = 0.02;
    uint64_t seed = 0;

    int head_dim() const { return hidden_size / num_heads; }
    void validate() const;

    std::string to_json_string() const;
    static ModelConfig from_json_string(const std::string& text);
    static ModelConfig from_json_file(const std::filesystem::path& path);

    bool operator==(const ModelConfig&) const = default;
};

template <class T>
struct LayerParams {
    Mat<T> wq, bq, wk, bk, wv, bv; // hidden x hidden, 1 x hidden
    Mat<T> wo, bo;
    Mat<T> ln1_gamma, ln1_beta;    // post-attention layer norm
    Mat<T> w1, b1;                 // hidden x intermediate
    Mat<T> w2, b2;                 // intermediate x hidden
    Mat<T> ln2_gamma, ln2_beta;    // post-FFN layer norm
};

// All learned tensors. The embedding layer norm is part of the embedding
// stage (summed embeddings are normalized before entering the first block).
template <class T>
struct Parameters {
    Mat<T> token_embeddings;    // vocab x hidden
    Mat<T> position_embeddings; // max_positions x hidden
    Mat<T> segment_embeddings;  // type_vocab x hidden
    Mat<T> emb_gamma, emb_beta; // 1 x hidden
    std::vector<LayerParams<T>> layers;
    Mat<T> cls_w; // hidden x num_labels
    Mat<T> cls_b; // 1 x num_labels

    static Parameters shaped_like(const ModelConfig& config);
    size_t parameter_count() const;

    template <class U>
    Parameters<U> cast() const {
        Parameters<U> out;
        out.token_embeddings = token_embeddings.template cast<U>();
        out.position_embeddings = position_embeddings.template cast<U>();
        out.segment_embeddings = segment_embeddings.template cast<U>();
        out.emb_gamma = emb_gamma.template cast<U>();
        out.emb_beta = emb_beta.template cast<U>();
        out.layers.resize(layers.size());
        for (size_t i = 0; i < layers.size(); ++i) {
            out.layers[i].wq = layers[i].wq.template cast<U>();
            out.layers[i].bq = layers[i].bq.template cast<U>();
            out.layers[i].wk = layers[i].wk.template cast<U>();
            out.layers[i].bk = layers[i].bk.template cast<U>();
            out.layers[i].wv = layers[i].wv.template cast<U>();
            out.layers[i].bv = layers[i].bv.template cast<U>();
            out.layers[i].wo = layers[i].wo.template cast<U>();
            out.layers[i].bo = layers[i].bo.template cast<U>();
            out.layers[i].ln1_gamma = layers[i].ln1_gamma.template cast<U>();
            out.layers[i].ln1_beta = layers[i].ln1_beta.template cast<U>();
            out.layers[i].w1 = layers[i].w1.template cast<U>();
            out.layers[i].b1 = layers[i].b1.template cast<U>();
            out.layers[i].w2 = layers[i].w2.template cast<U>();
            out.layers[i].b2 = layers[i].b2.template cast<U>();
            out.layers[i].ln2_gamma = layers[i].ln2_gamma.template cast<U>();
            out.layers[i].ln2_beta = layers[i].ln2_beta.template cast<U>();
        }
        out.cls_w = cls_w.template cast<U>();
        out.cls_b = cls_b.template cast<U>();
        return out;
    }

    // Visits every tensor in a fixed, documented order. `decayed` marks weight
    // matrices (embedding tables and projections); biases and layer-norm
    // parameters are excluded from weight decay.
    template <class F>
    void for_each(F&& f) {
        f("embeddings", std::string("embeddings.token"), token_embeddings, true);
        f("embeddings", std::string("embeddings.position"), position_embeddings, true);
        f("embeddings", std::string("embeddings.segment"), segment_embeddings, true);
        f("embeddings", std::string("embeddings.ln.gamma"), emb_gamma, false);
        f("embeddings", std::string("embeddings.ln.beta"), emb_beta, false);
        for (size_t i = 0; i < layers.size(); ++i) {
            const std::string prefix = "layer_" + std::to_string(i) + ".";
            LayerParams<T>& l = layers[i];
            f("attention", prefix + "attn.wq", l.wq, true);
            f("attention", prefix + "attn.bq", l.bq, false);
            f("attention", prefix + "attn.wk", l.wk, true);
            f("attention", prefix + "attn.bk", l.bk, false);
            f("attention", prefix + "attn.wv", l.wv, true);
            f("attention", prefix + "attn.bv", l.bv, false);
            f("attention", prefix + "attn.wo", l.wo, true);
            f("attention", prefix + "attn.bo", l.bo, false);
            f("layer_norm", prefix + "attn.ln.gamma", l.ln1_gamma, false);
            f("layer_norm", prefix + "attn.ln.beta", l.ln1_beta, false);
            f("ffn", prefix + "ffn.w1", l.w1, true);
            f("ffn", prefix + "ffn.b1", l.b1, false);
            f("ffn", prefix + "ffn.w2", l.w2, true);
            f("ffn", prefix + "ffn.b2", l.b2, false);
            f("layer_norm", prefix + "ffn.ln.gamma", l.ln2_gamma, false);
            f("layer_norm", prefix + "ffn.ln.beta", l.ln2_beta, false);
        }
        f("classifier", std::string("classifier.w"), cls_w, true);
        f("classifier", std::string("classifier.b"), cls_b, false);
    }

    Mat<T>* find(const std::string& name) {
        Mat<T>* found = nullptr;
        for_each([&](const char*, const std::string& n, Mat<T>& m, bool) {
            if (n == name) found = &m;
        });
        return found;
    }
};

using ParametersF = Parameters<float>;
using ParametersD = Parameters<double>;

// Truncated normal(0, init_std^2) clipped at two standard deviations for
// weights, zeros for biases and layer-norm beta, ones for gamma.
// Deterministic for a given (config, config.seed).
template <class T>
Parameters<T> init_parameters(const ModelConfig& config);

// A batch of fixed-length token sequences, row-major (batch x seq_len).
struct TokenBatch {
    int batch = 0;
    int seq_len = 0;
    std::vector<int32_t> ids;
    std::vector<uint8_t> mask; // 1 = real token

    static TokenBatch from_sequences(std::span<const TokenSequence> seqs);
};

enum class RunMode { train, eval };

template <class T>
struct LayerForwardCache {
    Mat<T> input; // block input X
    Mat<T> q, k, v;
    std::vector<Mat<T>> probs;          // per (example, head), seq x seq
    std::vector<Mat<T>> probs_dropmask; // empty when dropout off
    Mat<T> ctx;                         // concatenated heads, pre-projection
    Mat<T> attn_dropmask;
    Mat<T> attn_residual; // X + dropout(proj), the LN1 input
    LayerNormCache<T> ln1;
    Mat<T> ln1_out; // Y, the FFN input
    Mat<T> ffn_pre; // Y W1 + b1
    Mat<T> ffn_act; // gelu(ffn_pre)
    Mat<T> ffn_dropmask;
    Mat<T> ffn_residual; // Y + dropout(ffn_out), the LN2 input
    LayerNormCache<T> ln2;
};

template <class T>
struct ForwardCache {
    TokenBatch batch;
    Mat<T> embed_sum; // token + position + segment, the embedding LN input
    LayerNormCache<T> emb_ln;
    Mat<T> emb_dropmask;
    std::vector<LayerForwardCache<T>> layers;
    Mat<T> final_hidden;
    Mat<T> pooled; // first-token hidden states, batch x hidden
};

template <class T>
struct ForwardResult {
    Mat<T> logits; // batch x num_labels
    std::unique_ptr<ForwardCache<T>> cache; // present iff train mode
};

// Full forward pass: embeddings -> num_layers self-attention blocks ->
// first-token pooling -> linear classifier. Eval mode disables dropout,
// stores no cache and is deterministic. dropout_seed drives the dropout
// masks for train mode.
template <class T>
ForwardResult<T> forward(const Parameters<T>& params, const ModelConfig& config,
                         const TokenBatch& batch, RunMode mode, uint64_t dropout_seed = 0);

// Exact gradients for every parameter via the cached activations.
// Throws MissingCacheError when cache is null (eval-mode forward).
template <class T>
Parameters<T> backward(const Parameters<T>& params, const ModelConfig& config,
                       const ForwardCache<T>* cache, const Mat<T>& dlogits);

} // namespace dpikit
