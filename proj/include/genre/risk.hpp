#pragma once

#include <cstdint>
#include <vector>

#include "genre/uwt.hpp"

namespace genre {

// Normal equations of the subband shrinkage problem. Q = Psi^T Psi where
// column i of Psi is the vectorized psi_i; the right-hand side is
// c = Psi^T y - q with q_i = sigma^2 * Trace(H_i).
struct GramSystem {
    int nbands = 0;
    std::vector<double> Q;          // nbands x nbands, row-major, symmetric
    std::vector<double> psi_dot_y;  // Psi^T y
    std::vector<double> q;          // sigma^2 * Trace(H_i)
    double sigma2 = 0.0;
    std::size_t n_pixels = 0;
    std::uint64_t pixels_touched = 0;  // accumulation work; equals n_pixels for one pass

    double qq(int i, int j) const { return Q[static_cast<std::size_t>(i) * nbands + j]; }
    std::vector<double> c() const;
};

// sigma^2 * Trace(H_i) per band, in band order. Trace(H_i) = N * 4^-j for a
// level-j detail band and N * 4^-J for LL; the values are exact dyadics and
// sum to N * sigma^2.
std::vector<double> trace_terms(int levels, int width, int height, double sigma2);

// Single streaming pass over the pixels: accumulates the upper triangle of Q
// and Psi^T y, then mirrors. q/sigma2 are filled from trace_terms by the
// caller or by denoise().
GramSystem accumulate_gram(const std::vector<Image>& psis, const Image& y);

// Unbiased estimate of the output MSE for shrinkage vector alpha:
//   (||sum_i alpha_i psi_i - y||^2 + 2 alpha.q - N sigma^2) / N
double genre_risk(const std::vector<Image>& psis, const Image& y,
                  const std::vector<double>& alpha, double sigma2,
                  const std::vector<double>& q);

enum class SolverMethod { ClosedForm, GradientDescent };

struct SolverConfig {
    SolverMethod method = SolverMethod::ClosedForm;
    double mu = 1.0 / 8192.0;  // 2^-13 fixed step, applied to the normalized system
    int max_iterations = 20000;
    double tolerance = 1e-6;  // infinity norm of the normalized residual
    // Scale the system by 1/(4N) before iterating. The tight frame bounds
    // lambda_max(Q) by ||y||^2, so lambda_max of the scaled system stays below
    // max(y)^2/4 = 16256 < 2/mu for 8-bit data and the fixed step always
    // converges. Disable only for hand-built systems in tests.
    bool normalize = true;
};

struct SolverReport {
    SolverMethod method = SolverMethod::ClosedForm;
    int iterations = 0;
    double residual_inf = 0.0;   // ||c - Q alpha||_inf of the system it solved
    double mu_lambda_max = 0.0;  // gradient-descent stability margin (< 2 required)
    double condition = 0.0;      // lambda_max / lambda_min estimate of Q
    bool converged = true;       // false when GD stopped at the iteration cap
    bool rank_deficient = false;
};

// Direct solve of Q alpha = c by LDL^T with iterative refinement. Throws
// std::runtime_error when the condition estimate exceeds 1e12.
std::vector<double> solve_closed_form(const GramSystem& sys, SolverReport* report = nullptr);

// Fixed-step gradient descent from alpha0 = all-ones. Throws
// std::runtime_error if the residual diverges (grows 10x above its start).
std::vector<double> solve_gradient_descent(const GramSystem& sys, const SolverConfig& cfg,
                                           SolverReport* report = nullptr);

struct DenoiseConfig {
    int levels = 5;
    Realization realization = Realization::Uwt2d;
    SolverConfig solver;
};

struct DenoiseResult {
    Image image;
    std::vector<double> alpha;
    double risk = 0.0;  // estimated MSE of the output
    SolverReport solver;
};

// Full pipeline: analysis, per-band synthesis, Gram accumulation, shrinkage
// solve, recombination. sigma is the noise standard deviation. With sigma = 0
// the all-ones vector already solves the normal equations, so the pipeline
// runs gradient descent from alpha0 = 1 (its fixed point) and returns the
// input unchanged, flagging rank deficiency in the report instead of failing.
DenoiseResult denoise(const Image& y, double sigma, const DenoiseConfig& cfg = {});

}  // namespace genre
