#include "genre/risk.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace genre {

namespace {

void check_system(const GramSystem& sys) {
    const int K = sys.nbands;
    if (K <= 0) throw std::invalid_argument("gram system has no bands");
    if (sys.Q.size() != static_cast<std::size_t>(K) * K)
        throw std::invalid_argument("gram matrix size does not match band count");
    if (sys.psi_dot_y.size() != static_cast<std::size_t>(K) ||
        sys.q.size() != static_cast<std::size_t>(K))
        throw std::invalid_argument("gram right-hand side size does not match band count");
}

// Eigenvalue range of a symmetric matrix by cyclic Jacobi sweeps. n is small
// (3J+1, at most ~50), so this is cheap and robust.
std::pair<double, double> symmetric_eigen_range(std::vector<double> m, int n) {
    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                (i == j ? diag : off) += m[static_cast<std::size_t>(i) * n + j] *
                                         m[static_cast<std::size_t>(i) * n + j];
        if (off <= 1e-28 * (diag + 1e-300)) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    double lmin = at(0, 0), lmax = at(0, 0);
    for (int i = 1; i < n; ++i) {
        lmin = std::min(lmin, at(i, i));
        lmax = std::max(lmax, at(i, i));
    }
    return {lmin, lmax};
}

// LDL^T factorization without pivoting; fine for the SPD systems we feed it
// (conditioning is guarded by the caller).
std::optional<std::vector<double>> ldlt_solve(const std::vector<double>& Q,
                                              const std::vector<double>& b, int n) {
    std::vector<double> L(static_cast<std::size_t>(n) * n, 0.0), d(n, 0.0);
    auto q = [&](int i, int j) { return Q[static_cast<std::size_t>(i) * n + j]; };
    auto l = [&](int i, int j) -> double& { return L[static_cast<std::size_t>(i) * n + j]; };
    for (int j = 0; j < n; ++j) {
        double dj = q(j, j);
        for (int k = 0; k < j; ++k) dj -= l(j, k) * l(j, k) * d[k];
        if (!(std::abs(dj) > 0.0) || !std::isfinite(dj)) return std::nullopt;
        d[j] = dj;
        l(j, j) = 1.0;
        for (int i = j + 1; i < n; ++i) {
            double v = q(i, j);
            for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k) * d[k];
            l(i, j) = v / dj;
        }
    }
    std::vector<double> x = b;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < i; ++k) x[i] -= l(i, k) * x[k];
    for (int i = 0; i < n; ++i) x[i] /= d[i];
    for (int i = n - 1; i >= 0; --i)
        for (int k = i + 1; k < n; ++k) x[i] -= l(k, i) * x[k];
    return x;
}

std::vector<double> mat_vec(const std::vector<double>& Q, const std::vector<double>& x, int n) {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += Q[static_cast<std::size_t>(i) * n + j] * x[j];
        y[i] = acc;
    }
    return y;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::vector<double> GramSystem::c() const {
    std::vector<double> rhs(psi_dot_y.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = psi_dot_y[i] - q[i];
    return rhs;
}

std::vector<double> trace_terms(int levels, int width, int height, double sigma2) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("trace_terms: empty image");
    if (levels < 1 || levels > 15) throw std::invalid_argument("trace_terms: levels out of range");
    if (sigma2 < 0.0) throw std::invalid_argument("trace_terms: negative variance");
    const double N = static_cast<double>(width) * height;
    const int K = band_count(levels);
    std::vector<double> q(K);
    for (int i = 0; i < K; ++i) q[i] = sigma2 * N * kernel_energy(band_id(i, levels));
    return q;
}

GramSystem accumulate_gram(const std::vector<Image>& psis, const Image& y) {
    if (psis.empty()) throw std::invalid_argument("accumulate_gram: no bands");
    for (const Image& p : psis)
        if (!p.same_shape(y)) throw std::invalid_argument("accumulate_gram: shape mismatch");
    const int K = static_cast<int>(psis.size());
    const std::size_t N = y.size();
    GramSystem sys;
    sys.nbands = K;
    sys.n_pixels = N;
    sys.Q.assign(static_cast<std::size_t>(K) * K, 0.0);
    sys.psi_dot_y.assign(K, 0.0);
    sys.q.assign(K, 0.0);
    std::vector<double> v(K);
    for (std::size_t p = 0; p < N; ++p) {
        for (int k = 0; k < K; ++k) v[k] = psis[k].samples[p];
        const double yp = y.samples[p];
        for (int i = 0; i < K; ++i) {
            sys.psi_dot_y[i] += v[i] * yp;
            double* row = &sys.Q[static_cast<std::size_t>(i) * K];
            const double vi = v[i];
            for (int j = i; j < K; ++j) row[j] += vi * v[j];
        }
        ++sys.pixels_touched;
    }
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < i; ++j)
            sys.Q[static_cast<std::size_t>(i) * K + j] = sys.Q[static_cast<std::size_t>(j) * K + i];
    return sys;
}

double genre_risk(const std::vector<Image>& psis, const Image& y,
                  const std::vector<double>& alpha, double sigma2,
                  const std::vector<double>& q) {
    if (psis.empty()) throw std::invalid_argument("genre_risk: no bands");
    if (alpha.size() != psis.size() || q.size() != psis.size())
        throw std::invalid_argument("genre_risk: vector sizes do not match band count");
    for (const Image& p : psis)
        if (!p.same_shape(y)) throw std::invalid_argument("genre_risk: shape mismatch");
    const std::size_t N = y.size();
    double resid2 = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
        double s = 0.0;
        for (std::size_t k = 0; k < psis.size(); ++k) s += alpha[k] * psis[k].samples[p];
        const double e = s - y.samples[p];
        resid2 += e * e;
    }
    double aq = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) aq += alpha[k] * q[k];
    return (resid2 + 2.0 * aq - static_cast<double>(N) * sigma2) / static_cast<double>(N);
}

std::vector<double> solve_closed_form(const GramSystem& sys, SolverReport* report) {
    check_system(sys);
    const int K = sys.nbands;
    const std::vector<double> rhs = sys.c();
    const auto [lmin, lmax] = symmetric_eigen_range(sys.Q, K);
    const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12))
        throw std::runtime_error("closed-form solve: gram system is singular or ill-conditioned"
                                 " (condition estimate " + std::to_string(cond) + ")");
    auto x = ldlt_solve(sys.Q, rhs, K);
    if (!x) throw std::runtime_error("closed-form solve: factorization failed");
    // A couple of refinement rounds keep the residual at machine level even
    // when the band energies are badly scaled.
    const double cnorm = inf_norm(rhs);
    int rounds = 0;
    double rinf = 0.0;
    for (; rounds < 4; ++rounds) {
        std::vector<double> r = rhs;
        const std::vector<double> qx = mat_vec(sys.Q, *x, K);
        for (int i = 0; i < K; ++i) r[i] -= qx[i];
        rinf = inf_norm(r);
        if (rinf <= 1e-12 * (cnorm + 1.0)) break;
        auto dx = ldlt_solve(sys.Q, r, K);
        if (!dx) break;
        for (int i = 0; i < K; ++i) (*x)[i] += (*dx)[i];
    }
    if (report) {
        report->method = SolverMethod::ClosedForm;
        report->iterations = rounds;
        report->residual_inf = rinf;
        report->mu_lambda_max = 0.0;
        report->condition = cond;
        report->rank_deficient = false;
    }
    return *x;
}

std::vector<double> solve_gradient_descent(const GramSystem& sys, const SolverConfig& cfg,
                                           SolverReport* report) {
    check_system(sys);
    if (cfg.mu <= 0.0) throw std::invalid_argument("gradient descent: mu must be positive");
    if (cfg.max_iterations < 0) throw std::invalid_argument("gradient descent: bad iteration cap");
    const int K = sys.nbands;
    const double scale =
        cfg.normalize ? 1.0 / (4.0 * static_cast<double>(sys.n_pixels ? sys.n_pixels : 1)) : 1.0;
    std::vector<double> Qs = sys.Q;
    for (double& v : Qs) v *= scale;
    std::vector<double> cs = sys.c();
    for (double& v : cs) v *= scale;

    const auto [lmin, lmax] = symmetric_eigen_range(Qs, K);
    const double mu_lmax = cfg.mu * lmax;

    std::vector<double> alpha(K, 1.0);
    auto residual = [&]() {
        std::vector<double> r = cs;
        const std::vector<double> qa = mat_vec(Qs, alpha, K);
        for (int i = 0; i < K; ++i) r[i] -= qa[i];
        return r;
    };
    std::vector<double> r = residual();
    const double r0 = inf_norm(r);
    double rinf = r0;
    int it = 0;
    bool converged = rinf <= cfg.tolerance;
    while (!converged && it < cfg.max_iterations) {
        for (int i = 0; i < K; ++i) alpha[i] += cfg.mu * r[i];
        r = residual();
        rinf = inf_norm(r);
        ++it;
        if (rinf <= cfg.tolerance) {
            converged = true;
            break;
        }
        if (rinf > 10.0 * r0 && rinf > cfg.tolerance)
            throw std::runtime_error(
                "gradient descent diverged (mu*lambda_max = " + std::to_string(mu_lmax) + ")");
    }
    if (report) {
        report->method = SolverMethod::GradientDescent;
        report->iterations = it;
        report->residual_inf = rinf;
        report->mu_lambda_max = mu_lmax;
        report->condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
        report->converged = converged;
        report->rank_deficient = !(lmin > lmax * 1e-12);
    }
    return alpha;
}

DenoiseResult denoise(const Image& y, double sigma, const DenoiseConfig& cfg) {
    if (sigma < 0.0) throw std::invalid_argument("denoise: sigma must be nonnegative");
    const SubbandSet bands = decompose(y, cfg.levels, cfg.realization);
    const std::vector<Image> psis = recompose(bands, cfg.realization);
    GramSystem sys = accumulate_gram(psis, y);
    sys.sigma2 = sigma * sigma;
    sys.q = trace_terms(cfg.levels, y.width, y.height, sys.sigma2);

    DenoiseResult res;
    if (sigma == 0.0) {
        // alpha = 1 solves the normal equations exactly (Q*1 = Psi^T y); run
        // the descent from its fixed point instead of inverting a possibly
        // singular Q, and report rank deficiency in the diagnostics.
        SolverConfig gd = cfg.solver;
        gd.method = SolverMethod::GradientDescent;
        res.alpha = solve_gradient_descent(sys, gd, &res.solver);
    } else if (cfg.solver.method == SolverMethod::ClosedForm) {
        res.alpha = solve_closed_form(sys, &res.solver);
    } else {
        res.alpha = solve_gradient_descent(sys, cfg.solver, &res.solver);
    }
    res.image = shrink_and_combine(psis, res.alpha);
    res.risk = genre_risk(psis, y, res.alpha, sys.sigma2, sys.q);
    return res;
}

}  // namespace genre
