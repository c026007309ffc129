#include "oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace oracle {

namespace {

int wrap(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

// y(r,c) = t0*x(r,c) + td*x(r, c-d)   (circular along columns)
Mat hstage(int width, int height, double t0, double td, int d) {
    Mat m(width * height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            int row = r * width + c;
            m.at(row, r * width + c) += t0;
            m.at(row, r * width + wrap(c - d, width)) += td;
        }
    }
    return m;
}

// y(r,c) = t0*x(r,c) + td*x(r-d, c)   (circular along rows)
Mat vstage(int width, int height, double t0, double td, int d) {
    Mat m(width * height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            int row = r * width + c;
            m.at(row, r * width + c) += t0;
            m.at(row, wrap(r - d, height) * width + c) += td;
        }
    }
    return m;
}

Mat hlow(int w, int h, int d) { return hstage(w, h, 0.5, 0.5, d); }
Mat hwave(int w, int h, int d) { return hstage(w, h, -0.5, 0.5, d); }
Mat vlow(int w, int h, int d) { return vstage(w, h, 0.5, 0.5, d); }
Mat vwave(int w, int h, int d) { return vstage(w, h, -0.5, 0.5, d); }

}  // namespace

Mat identity(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Mat multiply(const Mat& x, const Mat& y) {
    if (x.n != y.n) throw std::invalid_argument("oracle: size mismatch");
    Mat out(x.n);
    for (int i = 0; i < x.n; ++i) {
        for (int k = 0; k < x.n; ++k) {
            double xv = x.at(i, k);
            if (xv == 0.0) continue;
            for (int j = 0; j < x.n; ++j) out.at(i, j) += xv * y.at(k, j);
        }
    }
    return out;
}

std::vector<double> apply(const Mat& m, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != m.n) throw std::invalid_argument("oracle: size mismatch");
    std::vector<double> out(v.size(), 0.0);
    for (int i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.n; ++j) s += m.at(i, j) * v[j];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

std::vector<double> apply_transpose(const Mat& m, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != m.n) throw std::invalid_argument("oracle: size mismatch");
    std::vector<double> out(v.size(), 0.0);
    for (int i = 0; i < m.n; ++i) {
        double vi = v[static_cast<std::size_t>(i)];
        if (vi == 0.0) continue;
        for (int j = 0; j < m.n; ++j) out[static_cast<std::size_t>(j)] += m.at(i, j) * vi;
    }
    return out;
}

Mat band_matrix(const genre::BandId& id, int levels, int width, int height) {
    Mat p = identity(width * height);
    for (int k = 1; k < id.level; ++k) {
        int d = 1 << (k - 1);
        p = multiply(hlow(width, height, d), multiply(vlow(width, height, d), p));
    }
    int d = 1 << (id.level - 1);
    switch (id.kind) {
        case genre::BandKind::LH:
            return multiply(hwave(width, height, d), multiply(vlow(width, height, d), p));
        case genre::BandKind::HL:
            return multiply(hlow(width, height, d), multiply(vwave(width, height, d), p));
        case genre::BandKind::HH:
            return multiply(hwave(width, height, d), multiply(vwave(width, height, d), p));
        case genre::BandKind::LL:
            if (id.level != levels) throw std::invalid_argument("oracle: LL only at the last level");
            return multiply(hlow(width, height, d), multiply(vlow(width, height, d), p));
    }
    throw std::invalid_argument("oracle: bad band kind");
}

std::vector<Mat> analysis_matrices(int levels, int width, int height) {
    std::vector<Mat> out;
    int nb = genre::band_count(levels);
    out.reserve(static_cast<std::size_t>(nb));
    for (int i = 0; i < nb; ++i) out.push_back(band_matrix(genre::band_id(i, levels), levels, width, height));
    return out;
}

genre::SubbandSet decompose(const genre::Image& img, int levels) {
    genre::SubbandSet out;
    out.levels = levels;
    std::vector<double> y = genre::row_vectorize(img);
    int nb = genre::band_count(levels);
    for (int i = 0; i < nb; ++i) {
        Mat d = band_matrix(genre::band_id(i, levels), levels, img.width, img.height);
        out.bands.push_back(genre::devectorize(oracle::apply(d, y), img.width, img.height));
    }
    return out;
}

std::vector<genre::Image> equivalent_images(const genre::Image& img, int levels) {
    std::vector<genre::Image> out;
    std::vector<double> y = genre::row_vectorize(img);
    int nb = genre::band_count(levels);
    for (int i = 0; i < nb; ++i) {
        Mat d = band_matrix(genre::band_id(i, levels), levels, img.width, img.height);
        out.push_back(genre::devectorize(apply_transpose(d, oracle::apply(d, y)), img.width, img.height));
    }
    return out;
}

double trace_h(const Mat& d) {
    double s = 0.0;
    for (double v : d.a) s += v * v;
    return s;
}

std::vector<double> solve_gepp(std::vector<double> a, std::vector<double> b, int n) {
    if (a.size() != static_cast<std::size_t>(n) * n || b.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("oracle: bad system size");
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(at(i, k)) > std::abs(at(piv, k))) piv = i;
        if (std::abs(at(piv, k)) < 1e-300) throw std::runtime_error("oracle: singular system");
        if (piv != k) {
            for (int j = k; j < n; ++j) std::swap(at(k, j), at(piv, j));
            std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(piv)]);
        }
        for (int i = k + 1; i < n; ++i) {
            double f = at(i, k) / at(k, k);
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) at(i, j) -= f * at(k, j);
            b[static_cast<std::size_t>(i)] -= f * b[static_cast<std::size_t>(k)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / at(i, i);
    }
    return x;
}

DenoiseOut denoise(const genre::Image& y, double sigma, int levels) {
    int nb = genre::band_count(levels);
    std::size_t n = y.size();
    std::vector<double> yv = genre::row_vectorize(y);
    std::vector<std::vector<double>> psis;
    std::vector<double> q(static_cast<std::size_t>(nb), 0.0);
    for (int i = 0; i < nb; ++i) {
        Mat d = band_matrix(genre::band_id(i, levels), levels, y.width, y.height);
        psis.push_back(apply_transpose(d, oracle::apply(d, yv)));
        q[static_cast<std::size_t>(i)] = sigma * sigma * trace_h(d);
    }
    std::vector<double> qmat(static_cast<std::size_t>(nb) * nb, 0.0);
    std::vector<double> c(static_cast<std::size_t>(nb), 0.0);
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < n; ++p) s += psis[static_cast<std::size_t>(i)][p] * psis[static_cast<std::size_t>(j)][p];
            qmat[static_cast<std::size_t>(i) * nb + j] = s;
        }
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p) s += psis[static_cast<std::size_t>(i)][p] * yv[p];
        c[static_cast<std::size_t>(i)] = s - q[static_cast<std::size_t>(i)];
    }
    DenoiseOut out;
    out.alpha = solve_gepp(qmat, c, nb);
    std::vector<double> xhat(n, 0.0);
    for (int i = 0; i < nb; ++i)
        for (std::size_t p = 0; p < n; ++p) xhat[p] += out.alpha[static_cast<std::size_t>(i)] * psis[static_cast<std::size_t>(i)][p];
    double resid = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        double e = xhat[p] - yv[p];
        resid += e * e;
    }
    double aq = 0.0;
    for (int i = 0; i < nb; ++i) aq += out.alpha[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(i)];
    out.risk = (resid + 2.0 * aq - static_cast<double>(n) * sigma * sigma) / static_cast<double>(n);
    out.image = genre::devectorize(xhat, y.width, y.height);
    return out;
}

}  // namespace oracle
