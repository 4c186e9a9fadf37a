#include <cmath>

#include "model_impls.hpp"

namespace hicl::detail {

GnbModel::GnbModel(std::vector<std::string> classes, std::vector<double> log_prior,
                   std::vector<double> means, std::vector<double> variances, size_t d)
    : log_prior_(std::move(log_prior)),
      means_(std::move(means)),
      variances_(std::move(variances)),
      d_(d) {
    classes_ = std::move(classes);
}

std::vector<int> GnbModel::predict_ids(const FeatureMatrix& X, int threads) const {
    const int n_classes = static_cast<int>(classes_.size());
    std::vector<int> out(X.rows);
    parallel_for(X.rows, threads, [&](size_t r) {
        const auto x = X.row(r);
        int winner = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < n_classes; ++c) {
            const double* mu = means_.data() + static_cast<size_t>(c) * d_;
            const double* var = variances_.data() + static_cast<size_t>(c) * d_;
            double score = log_prior_[static_cast<size_t>(c)];
            for (size_t j = 0; j < d_; ++j) {
                const double diff = x[j] - mu[j];
                score += -0.5 * std::log(2.0 * M_PI * var[j]) - diff * diff / (2.0 * var[j]);
            }
            if (score > best) {
                best = score;
                winner = c;
            }
        }
        out[r] = winner;
    });
    return out;
}

nlohmann::ordered_json GnbModel::params_to_json() const {
    return {{"d", d_}, {"log_prior", log_prior_}, {"means", means_}, {"variances", variances_}};
}

std::shared_ptr<Model> GnbModel::from_params(std::vector<std::string> classes,
                                             const nlohmann::ordered_json& params) {
    return std::make_shared<GnbModel>(std::move(classes),
                                      params.at("log_prior").get<std::vector<double>>(),
                                      params.at("means").get<std::vector<double>>(),
                                      params.at("variances").get<std::vector<double>>(),
                                      params.at("d").get<size_t>());
}

ModelPtr gnb_fit(const FeatureMatrix& X, std::span<const std::string> y) {
    auto enc = encode_labels(y);
    const size_t n = X.rows;
    const size_t d = X.cols;
    const size_t n_classes = enc.classes.size();

    std::vector<size_t> counts(n_classes, 0);
    for (int id : enc.ids) ++counts[static_cast<size_t>(id)];

    std::vector<double> means(n_classes * d, 0.0);
    std::vector<double> variances(n_classes * d, 0.0);
    for (size_t r = 0; r < n; ++r) {
        const auto row = X.row(r);
        double* mu = means.data() + static_cast<size_t>(enc.ids[r]) * d;
        for (size_t j = 0; j < d; ++j) mu[j] += row[j];
    }
    for (size_t c = 0; c < n_classes; ++c) {
        double* mu = means.data() + c * d;
        for (size_t j = 0; j < d; ++j) mu[j] /= static_cast<double>(counts[c]);
    }
    for (size_t r = 0; r < n; ++r) {
        const auto row = X.row(r);
        const double* mu = means.data() + static_cast<size_t>(enc.ids[r]) * d;
        double* var = variances.data() + static_cast<size_t>(enc.ids[r]) * d;
        for (size_t j = 0; j < d; ++j) {
            const double diff = row[j] - mu[j];
            var[j] += diff * diff;
        }
    }
    for (size_t c = 0; c < n_classes; ++c) {
        double* var = variances.data() + c * d;
        for (size_t j = 0; j < d; ++j) var[j] /= static_cast<double>(counts[c]);
    }

    // smoothing keeps every variance strictly positive: 1e-9 times the
    // largest overall feature variance, with an absolute floor for
    // all-constant data
    double max_var = 0.0;
    for (size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (size_t r = 0; r < n; ++r) mean += X(r, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (size_t r = 0; r < n; ++r) {
            const double diff = X(r, j) - mean;
            var += diff * diff;
        }
        max_var = std::max(max_var, var / static_cast<double>(n));
    }
    double eps = 1e-9 * max_var;
    if (!(eps > 0.0)) eps = 1e-9;
    for (auto& v : variances) v += eps;

    std::vector<double> log_prior(n_classes);
    for (size_t c = 0; c < n_classes; ++c)
        log_prior[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(n));

    return std::make_shared<GnbModel>(std::move(enc.classes), std::move(log_prior),
                                      std::move(means), std::move(variances), d);
}

}  // namespace hicl::detail
