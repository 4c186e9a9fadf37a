#include <cmath>

#include "model_impls.hpp"

namespace hicl {

namespace {

// per-row softmax scores into `probs`, returns log(sum exp) shifted back
double row_softmax(std::span<const double> scores, std::span<double> probs) {
    double top = scores[0];
    for (double s : scores) top = std::max(top, s);
    double sum = 0.0;
    for (size_t c = 0; c < scores.size(); ++c) {
        probs[c] = std::exp(scores[c] - top);
        sum += probs[c];
    }
    for (size_t c = 0; c < scores.size(); ++c) probs[c] /= sum;
    return top + std::log(sum);
}

void row_scores(const FeatureMatrix& X, size_t r, int n_classes, std::span<const double> W,
                std::span<const double> b, std::span<double> scores) {
    const auto x = X.row(r);
    const size_t d = X.cols;
    for (int c = 0; c < n_classes; ++c) {
        const double* w = W.data() + static_cast<size_t>(c) * d;
        double s = b[static_cast<size_t>(c)];
        for (size_t j = 0; j < d; ++j) s += w[j] * x[j];
        scores[static_cast<size_t>(c)] = s;
    }
}

double l2_penalty(std::span<const double> W, double l2) {
    double sq = 0.0;
    for (double w : W) sq += w * w;
    return 0.5 * l2 * sq;
}

}  // namespace

double lr_loss(const FeatureMatrix& X, std::span<const int> y, int n_classes,
               std::span<const double> W, std::span<const double> b, double l2) {
    const size_t n = X.rows;
    std::vector<double> scores(static_cast<size_t>(n_classes));
    std::vector<double> probs(static_cast<size_t>(n_classes));
    double loss = 0.0;
    for (size_t r = 0; r < n; ++r) {
        row_scores(X, r, n_classes, W, b, scores);
        const double log_z = row_softmax(scores, probs);
        loss += log_z - scores[static_cast<size_t>(y[r])];
    }
    return loss / static_cast<double>(n) + l2_penalty(W, l2);
}

void lr_gradient(const FeatureMatrix& X, std::span<const int> y, int n_classes,
                 std::span<const double> W, std::span<const double> b, double l2,
                 std::span<double> gW, std::span<double> gb) {
    const size_t n = X.rows;
    const size_t d = X.cols;
    std::fill(gW.begin(), gW.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    std::vector<double> scores(static_cast<size_t>(n_classes));
    std::vector<double> probs(static_cast<size_t>(n_classes));
    for (size_t r = 0; r < n; ++r) {
        row_scores(X, r, n_classes, W, b, scores);
        row_softmax(scores, probs);
        const auto x = X.row(r);
        for (int c = 0; c < n_classes; ++c) {
            const double residual = probs[static_cast<size_t>(c)] - (y[r] == c ? 1.0 : 0.0);
            double* gw = gW.data() + static_cast<size_t>(c) * d;
            for (size_t j = 0; j < d; ++j) gw[j] += residual * x[j];
            gb[static_cast<size_t>(c)] += residual;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < gW.size(); ++i) gW[i] = gW[i] * inv_n + l2 * W[i];
    for (auto& g : gb) g *= inv_n;
}

}  // namespace hicl

namespace hicl::detail {

LinearModel::LinearModel(std::vector<std::string> classes, std::vector<double> weights,
                         std::vector<double> bias, size_t d)
    : weights_(std::move(weights)), bias_(std::move(bias)), d_(d) {
    classes_ = std::move(classes);
}

std::vector<int> LinearModel::predict_ids(const FeatureMatrix& X, int threads) const {
    const int n_classes = static_cast<int>(classes_.size());
    std::vector<int> out(X.rows);
    parallel_for(X.rows, threads, [&](size_t r) {
        if (n_classes == 1) {
            out[r] = 0;
            return;
        }
        const auto x = X.row(r);
        int winner = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < n_classes; ++c) {
            const double* w = weights_.data() + static_cast<size_t>(c) * d_;
            double s = bias_[static_cast<size_t>(c)];
            for (size_t j = 0; j < d_; ++j) s += w[j] * x[j];
            if (s > best) {
                best = s;
                winner = c;
            }
        }
        out[r] = winner;
    });
    return out;
}

nlohmann::ordered_json LinearModel::params_to_json() const {
    return {{"d", d_}, {"weights", weights_}, {"bias", bias_}};
}

std::shared_ptr<Model> LinearModel::from_params(std::vector<std::string> classes,
                                                const nlohmann::ordered_json& params) {
    return std::make_shared<LinearModel>(std::move(classes),
                                         params.at("weights").get<std::vector<double>>(),
                                         params.at("bias").get<std::vector<double>>(),
                                         params.at("d").get<size_t>());
}

ModelPtr lr_fit(const FeatureMatrix& X, std::span<const std::string> y, const LearnerSpec& spec) {
    auto enc = encode_labels(y);
    const size_t d = X.cols;
    const auto n_classes = static_cast<int>(enc.classes.size());
    std::vector<double> W(static_cast<size_t>(n_classes) * d, 0.0);
    std::vector<double> b(static_cast<size_t>(n_classes), 0.0);
    if (n_classes > 1) {
        const size_t n = X.rows;
        std::vector<double> gW(W.size());
        std::vector<double> gb(b.size());
        std::vector<double> scores(static_cast<size_t>(n_classes));
        std::vector<double> probs(static_cast<size_t>(n_classes));
        for (int epoch = 0; epoch < spec.lr_epochs; ++epoch) {
            // fused loss + gradient pass
            std::fill(gW.begin(), gW.end(), 0.0);
            std::fill(gb.begin(), gb.end(), 0.0);
            double loss = 0.0;
            for (size_t r = 0; r < n; ++r) {
                row_scores(X, r, n_classes, W, b, scores);
                const double log_z = row_softmax(scores, probs);
                loss += log_z - scores[static_cast<size_t>(enc.ids[r])];
                const auto x = X.row(r);
                for (int c = 0; c < n_classes; ++c) {
                    const double residual =
                        probs[static_cast<size_t>(c)] - (enc.ids[r] == c ? 1.0 : 0.0);
                    double* gw = gW.data() + static_cast<size_t>(c) * d;
                    for (size_t j = 0; j < d; ++j) gw[j] += residual * x[j];
                    gb[static_cast<size_t>(c)] += residual;
                }
            }
            loss = loss / static_cast<double>(n) + l2_penalty(W, spec.lr_l2);
            if (!std::isfinite(loss))
                throw PipelineError("logistic regression diverged at epoch " +
                                    std::to_string(epoch) + "; lower lr_rate");
            const double inv_n = 1.0 / static_cast<double>(n);
            for (size_t i = 0; i < W.size(); ++i)
                W[i] -= spec.lr_rate * (gW[i] * inv_n + spec.lr_l2 * W[i]);
            for (size_t i = 0; i < b.size(); ++i) b[i] -= spec.lr_rate * gb[i] * inv_n;
        }
        for (double w : W) {
            if (!std::isfinite(w))
                throw PipelineError("logistic regression diverged; lower lr_rate");
        }
    }
    return std::make_shared<LinearModel>(std::move(enc.classes), std::move(W), std::move(b), d);
}

}  // namespace hicl::detail
