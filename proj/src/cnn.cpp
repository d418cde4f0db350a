#include "mseg/cnn.hpp"

#include <algorithm>
#include <cmath>

#include "mseg/errors.hpp"
#include "mseg/rng.hpp"

namespace mseg {

namespace {

void softmax(std::array<double, kNumEventClasses>& logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logits) v /= sum;
}

struct ForwardCache {
    std::vector<double> pooled;       // filters
    std::vector<std::size_t> argmax;  // filters; position of pooled max
    std::vector<double> pre_act;      // filters; conv output at argmax (pre-ReLU)
    std::array<double, kNumEventClasses> probs{};
};

ForwardCache forward_cached(const Cnn1dModel& m, const FeatureVector& x) {
    const std::size_t out_len = m.conv_out_len();
    ForwardCache c;
    c.pooled.resize(m.filters);
    c.argmax.resize(m.filters);
    c.pre_act.resize(m.filters);
    for (std::size_t f = 0; f < m.filters; ++f) {
        double best = -1e300;
        std::size_t best_i = 0;
        double best_z = 0.0;
        const double* w = &m.conv_w[f * m.kernel_size];
        for (std::size_t i = 0; i < out_len; ++i) {
            double z = m.conv_b[f];
            for (std::size_t j = 0; j < m.kernel_size; ++j) z += w[j] * x.values[i + j];
            double a = z > 0.0 ? z : 0.0;
            if (a > best) {
                best = a;
                best_i = i;
                best_z = z;
            }
        }
        c.pooled[f] = best;
        c.argmax[f] = best_i;
        c.pre_act[f] = best_z;
    }
    std::array<double, kNumEventClasses> logits{};
    for (std::size_t k = 0; k < m.classes; ++k) {
        double s = m.dense_b[k];
        const double* w = &m.dense_w[k * m.filters];
        for (std::size_t f = 0; f < m.filters; ++f) s += w[f] * c.pooled[f];
        logits[k] = s;
    }
    softmax(logits);
    c.probs = logits;
    return c;
}

}  // namespace

Cnn1dModel cnn_init(const CnnHyperparams& hp, std::uint64_t seed) {
    Cnn1dModel m;
    m.filters = hp.filters;
    m.kernel_size = hp.kernel_size;
    m.conv_w.resize(m.filters * m.kernel_size);
    m.conv_b.assign(m.filters, 0.0);
    m.dense_w.resize(m.classes * m.filters);
    m.dense_b.assign(m.classes, 0.0);

    Rng rng(seed);
    double conv_lim = std::sqrt(6.0 / static_cast<double>(m.kernel_size + 1));
    for (double& w : m.conv_w) w = rng.uniform(-conv_lim, conv_lim);
    double dense_lim = std::sqrt(6.0 / static_cast<double>(m.filters + m.classes));
    for (double& w : m.dense_w) w = rng.uniform(-dense_lim, dense_lim);
    return m;
}

std::array<double, kNumEventClasses> cnn_forward(const Cnn1dModel& m, const FeatureVector& x) {
    if (m.input_len != kFeatureLen || m.conv_w.size() != m.filters * m.kernel_size ||
        m.dense_w.size() != m.classes * m.filters) {
        throw ShapeMismatch("cnn_forward: inconsistent model shapes");
    }
    return forward_cached(m, x).probs;
}

std::pair<CnnGradients, double> cnn_gradients(const Cnn1dModel& m, const TrainingSet& batch) {
    if (batch.empty()) throw EmptyDataset("cnn_gradients: empty batch");
    CnnGradients g;
    g.conv_w.assign(m.conv_w.size(), 0.0);
    g.conv_b.assign(m.conv_b.size(), 0.0);
    g.dense_w.assign(m.dense_w.size(), 0.0);
    g.dense_b.assign(m.dense_b.size(), 0.0);

    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const auto& [x, label] : batch) {
        ForwardCache c = forward_cached(m, x);
        loss -= std::log(std::max(c.probs[static_cast<std::size_t>(label)], 1e-300));

        std::array<double, kNumEventClasses> dlogits = c.probs;
        dlogits[static_cast<std::size_t>(label)] -= 1.0;

        std::vector<double> dpooled(m.filters, 0.0);
        for (std::size_t k = 0; k < m.classes; ++k) {
            double dl = dlogits[k] * inv_n;
            g.dense_b[k] += dl;
            double* gw = &g.dense_w[k * m.filters];
            const double* w = &m.dense_w[k * m.filters];
            for (std::size_t f = 0; f < m.filters; ++f) {
                gw[f] += dl * c.pooled[f];
                dpooled[f] += dlogits[k] * w[f];
            }
        }
        // Max-pool routes the gradient to the argmax position; ReLU gates it.
        for (std::size_t f = 0; f < m.filters; ++f) {
            if (c.pre_act[f] <= 0.0) continue;
            double dz = dpooled[f] * inv_n;
            std::size_t i = c.argmax[f];
            double* gw = &g.conv_w[f * m.kernel_size];
            for (std::size_t j = 0; j < m.kernel_size; ++j) gw[j] += dz * x.values[i + j];
            g.conv_b[f] += dz;
        }
    }
    return {std::move(g), loss * inv_n};
}

std::pair<Cnn1dModel, TrainReport> cnn_train(const TrainingSet& dataset, std::uint64_t seed,
                                             const CnnHyperparams& hp) {
    if (dataset.empty()) throw EmptyDataset("cnn_train: empty dataset");
    std::array<bool, kNumEventClasses> present{};
    for (const auto& [x, label] : dataset) {
        if (label < 0 || label >= kNumEventClasses) {
            throw MissingClass("cnn_train: class index out of range");
        }
        present[static_cast<std::size_t>(label)] = true;
    }
    for (std::size_t c = 0; c < kNumEventClasses; ++c) {
        if (!present[c]) {
            throw MissingClass("cnn_train: no examples for class " +
                               std::string(to_string(static_cast<ManeuverLabel>(c))));
        }
    }

    Rng rng(seed);
    Cnn1dModel model = cnn_init(hp, rng.fork_seed());

    struct AdamState {
        std::vector<double> m, v;
    };
    auto make_state = [](std::size_t n) { return AdamState{std::vector<double>(n, 0.0),
                                                           std::vector<double>(n, 0.0)}; };
    AdamState s_cw = make_state(model.conv_w.size());
    AdamState s_cb = make_state(model.conv_b.size());
    AdamState s_dw = make_state(model.dense_w.size());
    AdamState s_db = make_state(model.dense_b.size());
    std::uint64_t step = 0;

    auto adam_update = [&](std::vector<double>& params, const std::vector<double>& grad,
                           AdamState& st) {
        double b1t = 1.0 - std::pow(hp.adam_beta1, static_cast<double>(step));
        double b2t = 1.0 - std::pow(hp.adam_beta2, static_cast<double>(step));
        for (std::size_t i = 0; i < params.size(); ++i) {
            st.m[i] = hp.adam_beta1 * st.m[i] + (1.0 - hp.adam_beta1) * grad[i];
            st.v[i] = hp.adam_beta2 * st.v[i] + (1.0 - hp.adam_beta2) * grad[i] * grad[i];
            double mhat = st.m[i] / b1t;
            double vhat = st.v[i] / b2t;
            params[i] -= hp.learning_rate * mhat / (std::sqrt(vhat) + hp.adam_eps);
        }
    };

    TrainReport report;
    report.seed = seed;
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t off = 0; off < order.size(); off += hp.batch_size) {
            TrainingSet batch;
            for (std::size_t i = off; i < std::min(order.size(), off + hp.batch_size); ++i) {
                batch.push_back(dataset[order[i]]);
            }
            auto [grad, loss] = cnn_gradients(model, batch);
            ++step;
            adam_update(model.conv_w, grad.conv_w, s_cw);
            adam_update(model.conv_b, grad.conv_b, s_cb);
            adam_update(model.dense_w, grad.dense_w, s_dw);
            adam_update(model.dense_b, grad.dense_b, s_db);
            epoch_loss += loss;
            ++batches;
        }
        report.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
    }

    std::size_t correct = 0;
    for (const auto& [x, label] : dataset) {
        auto probs = cnn_forward(model, x);
        auto pred = std::max_element(probs.begin(), probs.end()) - probs.begin();
        if (pred == label) ++correct;
    }
    report.final_train_accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
    return {std::move(model), std::move(report)};
}

}  // namespace mseg
