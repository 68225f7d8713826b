#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "adaptix/layout.hpp"

namespace adaptix {

struct GpHyper {
    double signal_sd = 1.0;     // sigma_f
    double length_scale = 0.5;  // l
    double noise = 1e-2;        // sigma_n^2
};

struct GpPosterior {
    double mean = 0.0;
    double variance = 0.0;
};

// Zero-mean GP regression with an RBF kernel, solved through a Cholesky
// factor of K(X,X) + noise * I.
class GpSurrogate {
public:
    explicit GpSurrogate(GpHyper hyper = {}) : hyper_(hyper) {}

    // Throws InvalidArgument on shape problems and NumericFailure when the
    // kernel matrix stays indefinite after jitter escalation up to 1e-6.
    void fit(std::vector<std::vector<double>> inputs, std::vector<double> targets);
    GpPosterior posterior(std::span<const double> x) const;

    double kernel(std::span<const double> a, std::span<const double> b) const;

    const GpHyper& hyper() const { return hyper_; }
    bool fitted() const { return !inputs_.empty(); }
    const std::vector<std::vector<double>>& inputs() const { return inputs_; }
    const std::vector<double>& targets() const { return targets_; }
    double jitter() const { return jitter_; }

private:
    GpHyper hyper_;
    std::vector<std::vector<double>> inputs_;
    std::vector<double> targets_;
    Eigen::MatrixXd chol_;  // lower-triangular factor
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

// (mu - best) * Phi(z) + sigma * phi(z); 0 when sigma is 0.
double expected_improvement(double mean, double variance, double best_y);

// Index of the candidate with maximal EI (lowest index on ties).
int ei_acquire(const GpSurrogate& gp, const std::vector<std::vector<double>>& candidates, double best_y);

// x has 3K entries in [0,1]: K order keys, K size genes, K color genes, each
// gene referring to the canonical component at the same position.
LayoutState decode_genotype(std::span<const double> x, const LayoutState& canonical);

}  // namespace adaptix
