#include "dpikit/model.hpp"

#include "dpikit/errors.hpp"
#include "dpikit/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace dpikit {

void ModelConfig::validate() const {
    if (vocab_size != 258) throw ConfigError("vocab_size must be 258");
    if (type_vocab_size != 2) throw ConfigError("type_vocab_size must be 2");
    if (hidden_size < 1 || num_layers < 1 || num_heads < 1 || intermediate_size < 1 ||
        max_positions < 1) {
        throw ConfigError("model dimensions must be positive");
    }
    if (hidden_size % num_heads != 0) {
        throw ConfigError("hidden_size must be divisible by num_heads");
    }
    if (num_labels < 2) throw ConfigError("num_labels must be at least 2");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
    if (layer_norm_eps <= 0.0) throw ConfigError("layer_norm_eps must be positive");
    if (init_std <= 0.0) throw ConfigError("init_std must be positive");
}

std::string ModelConfig::to_json_string() const {
    nlohmann::ordered_json j;
    j["vocab_size"] = vocab_size;
    j["hidden_size"] = hidden_size;
    j["num_layers"] = num_layers;
    j["num_heads"] = num_heads;
    j["intermediate_size"] = intermediate_size;
    j["max_positions"] = max_positions;
    j["type_vocab_size"] = type_vocab_size;
    j["num_labels"] = num_labels;
    j["dropout"] = dropout;
    j["layer_norm_eps"] = layer_norm_eps;
    j["init_std"] = init_std;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

ModelConfig ModelConfig::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid model config JSON: ") + e.what());
    }
    static const char* known[] = {"vocab_size",      "hidden_size",   "num_layers",
                                  "num_heads",       "intermediate_size", "max_positions",
                                  "type_vocab_size", "num_labels",    "dropout",
                                  "layer_norm_eps",  "init_std",      "seed"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown model config key: " + it.key());
    }
    ModelConfig c;
    try {
        if (j.contains("vocab_size")) c.vocab_size = j["vocab_size"].get<int>();
        if (j.contains("hidden_size")) c.hidden_size = j["hidden_size"].get<int>();
        if (j.contains("num_layers")) c.num_layers = j["num_layers"].get<int>();
        if (j.contains("num_heads")) c.num_heads = j["num_heads"].get<int>();
        if (j.contains("intermediate_size")) c.intermediate_size = j["intermediate_size"].get<int>();
        if (j.contains("max_positions")) c.max_positions = j["max_positions"].get<int>();
        if (j.contains("type_vocab_size")) c.type_vocab_size = j["type_vocab_size"].get<int>();
        if (j.contains("num_labels")) c.num_labels = j["num_labels"].get<int>();
        if (j.contains("dropout")) c.dropout = j["dropout"].get<double>();
        if (j.contains("layer_norm_eps")) c.layer_norm_eps = j["layer_norm_eps"].get<double>();
        if (j.contains("init_std")) c.init_std = j["init_std"].get<double>();
        if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid model config value: ") + e.what());
    }
    c.validate();
    return c;
}

ModelConfig ModelConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model config: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

template <class T>
Parameters<T> Parameters<T>::shaped_like(const ModelConfig& config) {
    Parameters<T> p;
    const int h = config.hidden_size;
    p.token_embeddings = Mat<T>(config.vocab_size, h);
    p.position_embeddings = Mat<T>(config.max_positions, h);
    p.segment_embeddings = Mat<T>(config.type_vocab_size, h);
    p.emb_gamma = Mat<T>(1, h);
    p.emb_beta = Mat<T>(1, h);
    p.layers.resize(static_cast<size_t>(config.num_layers));
    for (auto& l : p.layers) {
        l.wq = Mat<T>(h, h);
        l.bq = Mat<T>(1, h);
        l.wk = Mat<T>(h, h);
        l.bk = Mat<T>(1, h);
        l.wv = Mat<T>(h, h);
        l.bv = Mat<T>(1, h);
        l.wo = Mat<T>(h, h);
        l.bo = Mat<T>(1, h);
        l.ln1_gamma = Mat<T>(1, h);
        l.ln1_beta = Mat<T>(1, h);
        l.w1 = Mat<T>(h, config.intermediate_size);
        l.b1 = Mat<T>(1, config.intermediate_size);
        l.w2 = Mat<T>(config.intermediate_size, h);
        l.b2 = Mat<T>(1, h);
        l.ln2_gamma = Mat<T>(1, h);
        l.ln2_beta = Mat<T>(1, h);
    }
    p.cls_w = Mat<T>(h, config.num_labels);
    p.cls_b = Mat<T>(1, config.num_labels);
    return p;
}

template <class T>
size_t Parameters<T>::parameter_count() const {
    size_t total = 0;
    const_cast<Parameters<T>*>(this)->for_each(
        [&](const char*, const std::string&, Mat<T>& m, bool) { total += m.size(); });
    return total;
}

template <class T>
Parameters<T> init_parameters(const ModelConfig& config) {
    config.validate();
    Parameters<T> p = Parameters<T>::shaped_like(config);
    SplitMix64 rng(config.seed);
    p.for_each([&](const char*, const std::string& name, Mat<T>& m, bool decayed) {
        if (decayed) {
            for (size_t i = 0; i < m.size(); ++i) {
                m.data()[i] = static_cast<T>(rng.truncated_normal(config.init_std, 2.0));
            }
        } else if (name.ends_with("gamma")) {
            m.fill(T(1));
        } // biases and betas stay zero
    });
    return p;
}

TokenBatch TokenBatch::from_sequences(std::span<const TokenSequence> seqs) {
    TokenBatch b;
    if (seqs.empty()) return b;
    b.batch = static_cast<int>(seqs.size());
    b.seq_len = seqs[0].max_len();
    b.ids.reserve(static_cast<size_t>(b.batch) * b.seq_len);
    b.mask.reserve(b.ids.capacity());
    for (const TokenSequence& s : seqs) {
        if (s.max_len() != b.seq_len) {
            throw ShapeMismatchError("all sequences in a batch must share max_len");
        }
        b.ids.insert(b.ids.end(), s.ids.begin(), s.ids.end());
        b.mask.insert(b.mask.end(), s.mask.begin(), s.mask.end());
    }
    return b;
}

namespace {

// y = x * w + b, b broadcast over rows.
template <class T>
Mat<T> linear(const Mat<T>& x, const Mat<T>& w, const Mat<T>& b) {
    Mat<T> y = matmul(x, w);
    const T* br = b.row(0);
    for (int i = 0; i < y.rows(); ++i) {
        T* yr = y.row(i);
        for (int j = 0; j < y.cols(); ++j) yr[j] += br[j];
    }
    return y;
}

template <class T>
void linear_backward(const Mat<T>& x, const Mat<T>& w, const Mat<T>& dy, Mat<T>& dx, Mat<T>& dw,
                     Mat<T>& db) {
    dx = matmul_nt(dy, w);
    dw = matmul_tn(x, dy);
    db = Mat<T>(1, dy.cols());
    for (int i = 0; i < dy.rows(); ++i) {
        const T* dyr = dy.row(i);
        for (int j = 0; j < dy.cols(); ++j) db(0, j) += dyr[j];
    }
}

// Inverted dropout; keeps entries with probability 1-p scaled by 1/(1-p).
// An empty mask means identity (p == 0 or eval mode).
template <class T>
Mat<T> apply_dropout(Mat<T> x, double p, SplitMix64& rng, Mat<T>* mask_out) {
    if (p <= 0.0) {
        if (mask_out) *mask_out = Mat<T>();
        return x;
    }
    Mat<T> mask(x.rows(), x.cols());
    const T scale = static_cast<T>(1.0 / (1.0 - p));
    for (size_t i = 0; i < x.size(); ++i) {
        const bool keep = rng.next_double() >= p;
        mask.data()[i] = keep ? scale : T(0);
        x.data()[i] *= mask.data()[i];
    }
    if (mask_out) *mask_out = std::move(mask);
    return x;
}

template <class T>
Mat<T> dropout_backward(const Mat<T>& dy, const Mat<T>& mask) {
    if (mask.empty()) return dy;
    Mat<T> dx = dy;
    for (size_t i = 0; i < dx.size(); ++i) dx.data()[i] *= mask.data()[i];
    return dx;
}

template <class T>
Mat<T> col_slice(const Mat<T>& m, int c0, int width) {
    Mat<T> out(m.rows(), width);
    for (int i = 0; i < m.rows(); ++i) {
        const T* src = m.row(i) + c0;
        T* dst = out.row(i);
        for (int j = 0; j < width; ++j) dst[j] = src[j];
    }
    return out;
}

template <class T>
Mat<T> row_block(const Mat<T>& m, int r0, int count) {
    Mat<T> out(count, m.cols());
    for (int i = 0; i < count; ++i) {
        const T* src = m.row(r0 + i);
        T* dst = out.row(i);
        for (int j = 0; j < m.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

// Additive key mask for one example: 0 for real keys, the sentinel for
// padding, identical across query rows.
template <class T>
Mat<T> key_mask_for(const TokenBatch& batch, int example) {
    const int s = batch.seq_len;
    Mat<T> mask(s, s);
    const uint8_t* m = batch.mask.data() + static_cast<size_t>(example) * s;
    for (int k = 0; k < s; ++k) {
        if (m[k]) continue;
        for (int q = 0; q < s; ++q) mask(q, k) = static_cast<T>(kMaskSentinel);
    }
    return mask;
}

template <class T>
struct BlockResult {
    Mat<T> out;
};

template <class T>
Mat<T> attention_block_forward(const Mat<T>& x, const LayerParams<T>& lp, const ModelConfig& config,
                               const TokenBatch& batch, bool training, double p, SplitMix64& rng,
                               LayerForwardCache<T>* cache) {
    const int s = batch.seq_len;
    const int heads = config.num_heads;
    const int d = config.head_dim();
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(d)));
    const T eps = static_cast<T>(config.layer_norm_eps);

    Mat<T> q = linear(x, lp.wq, lp.bq);
    Mat<T> k = linear(x, lp.wk, lp.bk);
    Mat<T> v = linear(x, lp.wv, lp.bv);

    Mat<T> ctx(x.rows(), x.cols());
    if (cache) {
        cache->probs.resize(static_cast<size_t>(batch.batch) * heads);
        cache->probs_dropmask.resize(cache->probs.size());
    }
    for (int e = 0; e < batch.batch; ++e) {
        const Mat<T> kmask = key_mask_for<T>(batch, e);
        const int r0 = e * s;
        for (int h = 0; h < heads; ++h) {
            const int c0 = h * d;
            Mat<T> qh = col_slice(row_block(q, r0, s), c0, d);
            Mat<T> kh = col_slice(row_block(k, r0, s), c0, d);
            Mat<T> vh = col_slice(row_block(v, r0, s), c0, d);

            Mat<T> scores = matmul_nt(qh, kh);
            scores.scale_in_place(scale);
            Mat<T> probs = softmax_rows(scores, &kmask);

            Mat<T> dropmask;
            Mat<T> probs_used =
                training ? apply_dropout(probs, p, rng, &dropmask) : probs;
            Mat<T> ctx_h = matmul(probs_used, vh);

            for (int i = 0; i < s; ++i) {
                T* dst = ctx.row(r0 + i) + c0;
                const T* src = ctx_h.row(i);
                for (int j = 0; j < d; ++j) dst[j] = src[j];
            }
            if (cache) {
                cache->probs[static_cast<size_t>(e) * heads + h] = std::move(probs);
                cache->probs_dropmask[static_cast<size_t>(e) * heads + h] = std::move(dropmask);
            }
        }
    }

    Mat<T> proj = linear(ctx, lp.wo, lp.bo);
    Mat<T> attn_dropmask;
    Mat<T> proj_d = training ? apply_dropout(std::move(proj), p, rng, &attn_dropmask)
                             : std::move(proj);
    Mat<T> residual1 = x;
    residual1.add_in_place(proj_d);

    LayerNormCache<T> ln1;
    Mat<T> y = layer_norm(residual1, lp.ln1_gamma, lp.ln1_beta, eps, &ln1);

    Mat<T> ffn_pre = linear(y, lp.w1, lp.b1);
    Mat<T> ffn_act = gelu(ffn_pre);
    Mat<T> ffn_out = linear(ffn_act, lp.w2, lp.b2);
    Mat<T> ffn_dropmask;
    Mat<T> ffn_d = training ? apply_dropout(std::move(ffn_out), p, rng, &ffn_dropmask)
                            : std::move(ffn_out);
    Mat<T> residual2 = y;
    residual2.add_in_place(ffn_d);

    LayerNormCache<T> ln2;
    Mat<T> out = layer_norm(residual2, lp.ln2_gamma, lp.ln2_beta, eps, &ln2);

    if (cache) {
        cache->input = x;
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
        cache->ctx = std::move(ctx);
        cache->attn_dropmask = std::move(attn_dropmask);
        cache->attn_residual = std::move(residual1);
        cache->ln1 = std::move(ln1);
        cache->ln1_out = std::move(y);
        cache->ffn_pre = std::move(ffn_pre);
        cache->ffn_act = std::move(ffn_act);
        cache->ffn_dropmask = std::move(ffn_dropmask);
        cache->ffn_residual = std::move(residual2);
        cache->ln2 = std::move(ln2);
    }
    return out;
}

template <class T>
Mat<T> attention_block_backward(const LayerParams<T>& lp, const ModelConfig& config,
                                const TokenBatch& batch, const LayerForwardCache<T>& cache,
                                const Mat<T>& dout, LayerParams<T>& grad) {
    const int s = batch.seq_len;
    const int heads = config.num_heads;
    const int d = config.head_dim();
    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(d)));

    // LN2 -> FFN residual
    Mat<T> d_res2, dg2, db2_ln;
    layer_norm_backward(cache.ffn_residual, lp.ln2_gamma, cache.ln2, dout, d_res2, dg2, db2_ln);
    grad.ln2_gamma.add_in_place(dg2);
    grad.ln2_beta.add_in_place(db2_ln);

    Mat<T> dy = d_res2; // residual branch
    Mat<T> d_ffn_out = dropout_backward(d_res2, cache.ffn_dropmask);

    Mat<T> d_ffn_act, dw2, db2;
    linear_backward(cache.ffn_act, lp.w2, d_ffn_out, d_ffn_act, dw2, db2);
    grad.w2.add_in_place(dw2);
    grad.b2.add_in_place(db2);

    Mat<T> d_ffn_pre = gelu_backward(cache.ffn_pre, d_ffn_act);

    Mat<T> dy_ffn, dw1, db1;
    linear_backward(cache.ln1_out, lp.w1, d_ffn_pre, dy_ffn, dw1, db1);
    grad.w1.add_in_place(dw1);
    grad.b1.add_in_place(db1);
    dy.add_in_place(dy_ffn);

    // LN1 -> attention residual
    Mat<T> d_res1, dg1, db1_ln;
    layer_norm_backward(cache.attn_residual, lp.ln1_gamma, cache.ln1, dy, d_res1, dg1, db1_ln);
    grad.ln1_gamma.add_in_place(dg1);
    grad.ln1_beta.add_in_place(db1_ln);

    Mat<T> dx = d_res1; // residual branch
    Mat<T> d_proj = dropout_backward(d_res1, cache.attn_dropmask);

    Mat<T> d_ctx, dwo, dbo;
    linear_backward(cache.ctx, lp.wo, d_proj, d_ctx, dwo, dbo);
    grad.wo.add_in_place(dwo);
    grad.bo.add_in_place(dbo);

    Mat<T> dq(cache.q.rows(), cache.q.cols());
    Mat<T> dk(cache.k.rows(), cache.k.cols());
    Mat<T> dv(cache.v.rows(), cache.v.cols());
    for (int e = 0; e < batch.batch; ++e) {
        const int r0 = e * s;
        for (int h = 0; h < heads; ++h) {
            const int c0 = h * d;
            const Mat<T>& probs = cache.probs[static_cast<size_t>(e) * heads + h];
            const Mat<T>& dropmask = cache.probs_dropmask[static_cast<size_t>(e) * heads + h];

            Mat<T> qh = col_slice(row_block(cache.q, r0, s), c0, d);
            Mat<T> kh = col_slice(row_block(cache.k, r0, s), c0, d);
            Mat<T> vh = col_slice(row_block(cache.v, r0, s), c0, d);
            Mat<T> d_ctx_h = col_slice(row_block(d_ctx, r0, s), c0, d);

            Mat<T> probs_used = probs;
            if (!dropmask.empty()) {
                for (size_t i = 0; i < probs_used.size(); ++i) {
                    probs_used.data()[i] *= dropmask.data()[i];
                }
            }

            Mat<T> d_probs_used = matmul_nt(d_ctx_h, vh);
            Mat<T> dvh = matmul_tn(probs_used, d_ctx_h);
            Mat<T> d_probs = dropout_backward(d_probs_used, dropmask);
            Mat<T> d_scores = softmax_rows_backward(probs, d_probs);
            d_scores.scale_in_place(scale);

            Mat<T> dqh = matmul(d_scores, kh);
            Mat<T> dkh = matmul_tn(d_scores, qh);

            for (int i = 0; i < s; ++i) {
                T* dq_row = dq.row(r0 + i);
                T* dk_row = dk.row(r0 + i);
                T* dv_row = dv.row(r0 + i);
                const T* dqh_row = dqh.row(i);
                const T* dkh_row = dkh.row(i);
                const T* dvh_row = dvh.row(i);
                for (int j = 0; j < d; ++j) {
                    dq_row[c0 + j] += dqh_row[j];
                    dk_row[c0 + j] += dkh_row[j];
                    dv_row[c0 + j] += dvh_row[j];
                }
            }
        }
    }

    Mat<T> dx_q, dwq, dbq;
    linear_backward(cache.input, lp.wq, dq, dx_q, dwq, dbq);
    grad.wq.add_in_place(dwq);
    grad.bq.add_in_place(dbq);
    dx.add_in_place(dx_q);

    Mat<T> dx_k, dwk, dbk;
    linear_backward(cache.input, lp.wk, dk, dx_k, dwk, dbk);
    grad.wk.add_in_place(dwk);
    grad.bk.add_in_place(dbk);
    dx.add_in_place(dx_k);

    Mat<T> dx_v, dwv, dbv;
    linear_backward(cache.input, lp.wv, dv, dx_v, dwv, dbv);
    grad.wv.add_in_place(dwv);
    grad.bv.add_in_place(dbv);
    dx.add_in_place(dx_v);

    return dx;
}

} // namespace

template <class T>
ForwardResult<T> forward(const Parameters<T>& params, const ModelConfig& config,
                         const TokenBatch& batch, RunMode mode, uint64_t dropout_seed) {
    if (batch.batch == 0) throw EmptyMatrixError("forward: empty batch");
    if (batch.seq_len > config.max_positions) {
        throw SequenceTooLongError(static_cast<size_t>(batch.seq_len),
                                   static_cast<size_t>(config.max_positions));
    }

    const bool training = mode == RunMode::train;
    const double p = training ? config.dropout : 0.0;
    SplitMix64 rng(dropout_seed);

    const int h = config.hidden_size;
    const int s = batch.seq_len;
    const int rows = batch.batch * s;

    // Embedding stage: token + position + segment(0), layer norm, dropout.
    Mat<T> embed_sum(rows, h);
    for (int r = 0; r < rows; ++r) {
        const int32_t id = batch.ids[static_cast<size_t>(r)];
        if (id < 0 || id >= config.vocab_size) {
            throw TokenOutOfRangeError(id, static_cast<size_t>(r));
        }
        const int pos = r % s;
        const T* tok = params.token_embeddings.row(id);
        const T* pe = params.position_embeddings.row(pos);
        const T* se = params.segment_embeddings.row(0);
        T* dst = embed_sum.row(r);
        for (int j = 0; j < h; ++j) dst[j] = tok[j] + pe[j] + se[j];
    }

    auto cache = training ? std::make_unique<ForwardCache<T>>() : nullptr;

    LayerNormCache<T> emb_ln;
    Mat<T> emb_norm = layer_norm(embed_sum, params.emb_gamma, params.emb_beta,
                                 static_cast<T>(config.layer_norm_eps), &emb_ln);
    Mat<T> emb_dropmask;
    Mat<T> hidden = training ? apply_dropout(std::move(emb_norm), p, rng, &emb_dropmask)
                             : std::move(emb_norm);

    if (cache) {
        cache->batch = batch;
        cache->embed_sum = std::move(embed_sum);
        cache->emb_ln = std::move(emb_ln);
        cache->emb_dropmask = std::move(emb_dropmask);
        cache->layers.resize(params.layers.size());
    }

    for (size_t l = 0; l < params.layers.size(); ++l) {
        hidden = attention_block_forward(hidden, params.layers[l], config, batch, training, p, rng,
                                         cache ? &cache->layers[l] : nullptr);
    }

    // First-token pooling straight into the linear head.
    Mat<T> pooled(batch.batch, h);
    for (int e = 0; e < batch.batch; ++e) {
        const T* src = hidden.row(e * s);
        T* dst = pooled.row(e);
        for (int j = 0; j < h; ++j) dst[j] = src[j];
    }
    Mat<T> logits = linear(pooled, params.cls_w, params.cls_b);

    if (cache) {
        cache->final_hidden = std::move(hidden);
        cache->pooled = std::move(pooled);
    }
    return ForwardResult<T>{std::move(logits), std::move(cache)};
}

template <class T>
Parameters<T> backward(const Parameters<T>& params, const ModelConfig& config,
                       const ForwardCache<T>* cache, const Mat<T>& dlogits) {
    if (!cache) throw MissingCacheError();
    const TokenBatch& batch = cache->batch;
    const int h = config.hidden_size;
    const int s = batch.seq_len;

    Parameters<T> grad = Parameters<T>::shaped_like(config);

    // Classifier and pooling.
    Mat<T> dpooled, dcls_w, dcls_b;
    linear_backward(cache->pooled, params.cls_w, dlogits, dpooled, dcls_w, dcls_b);
    grad.cls_w.add_in_place(dcls_w);
    grad.cls_b.add_in_place(dcls_b);

    Mat<T> dhidden(batch.batch * s, h);
    for (int e = 0; e < batch.batch; ++e) {
        T* dst = dhidden.row(e * s);
        const T* src = dpooled.row(e);
        for (int j = 0; j < h; ++j) dst[j] = src[j];
    }

    for (size_t l = params.layers.size(); l-- > 0;) {
        dhidden = attention_block_backward(params.layers[l], config, batch, cache->layers[l],
                                           dhidden, grad.layers[l]);
    }

    // Embedding stage.
    Mat<T> d_emb_norm = dropout_backward(dhidden, cache->emb_dropmask);
    Mat<T> d_embed_sum, dg, db;
    layer_norm_backward(cache->embed_sum, params.emb_gamma, cache->emb_ln, d_emb_norm, d_embed_sum,
                        dg, db);
    grad.emb_gamma.add_in_place(dg);
    grad.emb_beta.add_in_place(db);

    for (int r = 0; r < d_embed_sum.rows(); ++r) {
        const int32_t id = batch.ids[static_cast<size_t>(r)];
        const int pos = r % s;
        const T* src = d_embed_sum.row(r);
        T* dtok = grad.token_embeddings.row(id);
        T* dpos = grad.position_embeddings.row(pos);
        T* dseg = grad.segment_embeddings.row(0);
        for (int j = 0; j < h; ++j) {
            dtok[j] += src[j];
            dpos[j] += src[j];
            dseg[j] += src[j];
        }
    }
    return grad;
}

template struct Parameters<float>;
template struct Parameters<double>;
template Parameters<float> init_parameters<float>(const ModelConfig&);
template Parameters<double> init_parameters<double>(const ModelConfig&);
template ForwardResult<float> forward<float>(const Parameters<float>&, const ModelConfig&,
                                             const TokenBatch&, RunMode, uint64_t);
template ForwardResult<double> forward<double>(const Parameters<double>&, const ModelConfig&,
                                               const TokenBatch&, RunMode, uint64_t);
template Parameters<float> backward<float>(const Parameters<float>&, const ModelConfig&,
                                           const ForwardCache<float>*, const Mat<float>&);
template Parameters<double> backward<double>(const Parameters<double>&, const ModelConfig&,
                                             const ForwardCache<double>*, const Mat<double>&);

} // namespace dpikit
