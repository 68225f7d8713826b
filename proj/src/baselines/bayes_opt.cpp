#include "adaptix/baselines/bayes_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptix/errors.hpp"

namespace adaptix {

double GpSurrogate::kernel(std::span<const double> a, std::span<const double> b) const {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return hyper_.signal_sd * hyper_.signal_sd *
           std::exp(-sq / (2.0 * hyper_.length_scale * hyper_.length_scale));
}

void GpSurrogate::fit(std::vector<std::vector<double>> inputs, std::vector<double> targets) {
    if (inputs.empty() || inputs.size() != targets.size())
        throw InvalidArgument("gp_fit: need |X| == |y| >= 1");
    const std::size_t dim = inputs.front().size();
    for (const auto& row : inputs)
        if (row.size() != dim) throw InvalidArgument("gp_fit: ragged input rows");

    const auto n = static_cast<Eigen::Index>(inputs.size());
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = kernel(inputs[i], inputs[j]);
    gram.diagonal().array() += hyper_.noise;

    double jitter = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    while (llt.info() != Eigen::Success) {
        jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
        if (jitter > 1e-6 * 1.0000001) throw NumericFailure("gp_fit: kernel matrix not positive definite");
        Eigen::MatrixXd jittered = gram;
        jittered.diagonal().array() += jitter;
        llt.compute(jittered);
    }

    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), n);
    chol_ = llt.matrixL();
    alpha_ = llt.solve(y);
    jitter_ = jitter;
    inputs_ = std::move(inputs);
    targets_ = std::move(targets);
}

GpPosterior GpSurrogate::posterior(std::span<const double> x) const {
    const double prior = hyper_.signal_sd * hyper_.signal_sd;
    if (!fitted()) return {0.0, prior};
    const auto n = static_cast<Eigen::Index>(inputs_.size());
    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) k_star(i) = kernel(inputs_[i], x);
    const double mean = k_star.dot(alpha_);
    const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k_star);
    return {mean, std::max(0.0, prior - v.squaredNorm())};
}

double expected_improvement(double mean, double variance, double best_y) {
    const double sd = std::sqrt(std::max(0.0, variance));
    if (sd <= 1e-12) return 0.0;
    const double z = (mean - best_y) / sd;
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    return (mean - best_y) * cdf + sd * pdf;
}

int ei_acquire(const GpSurrogate& gp, const std::vector<std::vector<double>>& candidates, double best_y) {
    if (candidates.empty()) throw InvalidArgument("ei_acquire: no candidates");
    int best = 0;
    double best_ei = -INFINITY;
    for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
        const auto post = gp.posterior(candidates[i]);
        const double ei = expected_improvement(post.mean, post.variance, best_y);
        if (ei > best_ei) {
            best_ei = ei;
            best = i;
        }
    }
    return best;
}

LayoutState decode_genotype(std::span<const double> x, const LayoutState& canonical) {
    const int k = canonical.size();
    if (static_cast<int>(x.size()) != 3 * k) throw InvalidArgument("decode_genotype: expected 3K genes");
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });

    LayoutState s;
    s.components.reserve(k);
    for (int j : order) {
        Component c = canonical.components[j];
        c.size = static_cast<SizeClass>(std::clamp(static_cast<int>(std::floor(3.0 * x[k + j])), 0, 2));
        c.color = std::clamp(static_cast<int>(std::floor(8.0 * x[2 * k + j])), 0, kColorCount - 1);
        s.components.push_back(c);
    }
    return s;
}

}  // namespace adaptix
