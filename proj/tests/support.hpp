#pragma once

// Random generators and brute-force oracles shared by the tests. The oracles
// deliberately avoid the library's LP, projection and hull code.

#include "cbar/constructions.hpp"
#include "cbar/geometry.hpp"
#include "cbar/network.hpp"
#include "cbar/relaxations.hpp"

#include <algorithm>
#include <optional>
#include <random>

namespace support {

using cbar::Mat;
using cbar::Rational;
using cbar::Vec;
using cbar::geometry::HPolytope;
using cbar::network::Network;

inline Rational random_rational(std::mt19937& rng, int lo, int hi, const std::vector<int>& dens = {1, 2})
{
    std::uniform_int_distribution<int> num(lo, hi);
    std::uniform_int_distribution<std::size_t> den(0, dens.size() - 1);
    return cbar::frac(num(rng), dens[den(rng)]);
}

inline Vec random_vec(std::mt19937& rng, std::size_t n, int lo, int hi, const std::vector<int>& dens = {1, 2})
{
    Vec v;
    for (std::size_t i = 0; i < n; ++i)
        v.push_back(random_rational(rng, lo, hi, dens));
    return v;
}

inline std::size_t pick(std::mt19937& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// affine, relu, ..., affine with `relu_layers` hidden layers of width in
/// [1, max_width]; weights have numerators in [-3, 3] and denominators 1 or 2.
inline Network random_network(std::mt19937& rng, std::size_t in_dim, std::size_t relu_layers, std::size_t max_width,
                              std::size_t out_dim = 1)
{
    Network net(in_dim);
    std::size_t width = in_dim;
    for (std::size_t l = 0; l < relu_layers; ++l) {
        const std::size_t w = pick(rng, 1, max_width);
        Mat A;
        for (std::size_t i = 0; i < w; ++i)
            A.push_back(random_vec(rng, width, -3, 3));
        net.add_affine(std::move(A), random_vec(rng, w, -3, 3));
        net.add_relu();
        width = w;
    }
    Mat A;
    for (std::size_t i = 0; i < out_dim; ++i)
        A.push_back(random_vec(rng, width, -3, 3));
    net.add_affine(std::move(A), random_vec(rng, out_dim, -3, 3));
    return net;
}

/// Box with corners of small denominators and positive widths.
inline HPolytope random_box(std::mt19937& rng, std::size_t dim)
{
    Vec lo, hi;
    for (std::size_t i = 0; i < dim; ++i) {
        Rational l = random_rational(rng, -2, 1);
        lo.push_back(l);
        hi.push_back(l + random_rational(rng, 1, 3));
    }
    return HPolytope::box(lo, hi);
}

/// Box plus random cuts that keep the box centre strictly inside.
inline HPolytope random_polytope(std::mt19937& rng, std::size_t dim, std::size_t cuts)
{
    HPolytope p = random_box(rng, dim);
    Vec centre(dim);
    for (std::size_t i = 0; i < dim; ++i)
        centre[i] = (p.b[2 * i] - p.b[2 * i + 1]) / 2;
    for (std::size_t k = 0; k < cuts; ++k) {
        Vec a = random_vec(rng, dim, -3, 3, {1});
        if (std::all_of(a.begin(), a.end(), [](const Rational& v) { return sgn(v) == 0; }))
            continue;
        p.add_inequality(a, cbar::dot(a, centre) + random_rational(rng, 1, 3));
    }
    return p;
}

/// Unique solution of a square system by Gaussian elimination.
inline std::optional<Vec> solve_square(Mat A, Vec b)
{
    const std::size_t n = A.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && sgn(A[p][c]) == 0)
            ++p;
        if (p == n)
            return std::nullopt;
        std::swap(A[p], A[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || sgn(A[r][c]) == 0)
                continue;
            Rational f = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k)
                A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = b[i] / A[i][i];
    return x;
}

inline bool satisfies(const HPolytope& p, const Vec& x)
{
    for (std::size_t i = 0; i < p.rows(); ++i)
        if (cbar::dot(p.A[i], x) > p.b[i])
            return false;
    return true;
}

/// Vertices of a bounded full-dimensional-or-not polytope by trying every
/// choice of dim tight rows.
inline std::vector<Vec> brute_vertices(const HPolytope& p)
{
    const std::size_t n = p.dim, m = p.rows();
    std::vector<Vec> out;
    if (n == 0 || m < n)
        return out;
    std::vector<bool> chosen(m, false);
    std::fill(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(n), true);
    do {
        Mat A;
        Vec b;
        for (std::size_t i = 0; i < m; ++i)
            if (chosen[i]) {
                A.push_back(p.A[i]);
                b.push_back(p.b[i]);
            }
        auto x = solve_square(A, b);
        if (x && satisfies(p, *x) && std::find(out.begin(), out.end(), *x) == out.end())
            out.push_back(*x);
    } while (std::prev_permutation(chosen.begin(), chosen.end()));
    std::sort(out.begin(), out.end());
    return out;
}

/// max c.x over a bounded polytope via its brute-force vertices.
inline std::optional<Rational> brute_max(const HPolytope& p, const Vec& c)
{
    std::optional<Rational> best;
    for (const auto& v : brute_vertices(p)) {
        Rational val = cbar::dot(c, v);
        if (!best || val > *best)
            best = val;
    }
    return best;
}

/// Exact output bounds by trying every activation pattern: each pattern's
/// region is cut out of X by sign rows, and f is evaluated at its vertices.
inline std::pair<Vec, Vec> brute_exact_bounds(const Network& net, const HPolytope& X)
{
    const std::size_t k = net.relu_count();
    const std::size_t d = X.dim;
    std::optional<std::pair<Vec, Vec>> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        HPolytope region = X;
        // affine map from x to the current block under this pattern
        Mat M = cbar::identity(d);
        Vec c = cbar::zeros(d);
        std::size_t neuron = 0;
        for (const auto& layer : net.layers()) {
            if (auto* a = std::get_if<cbar::network::AffineLayer>(&layer)) {
                Vec shift = cbar::mat_vec(a->A, c);
                M = cbar::mat_mul(a->A, M);
                c = a->b;
                for (std::size_t i = 0; i < c.size(); ++i)
                    c[i] += shift[i];
                continue;
            }
            for (std::size_t i = 0; i < M.size(); ++i, ++neuron) {
                const bool active = (mask >> neuron) & 1;
                Vec row = M[i];
                if (active) {
                    for (auto& v : row)
                        v = -v;
                    region.add_inequality(row, c[i]);
                } else {
                    region.add_inequality(row, -c[i]);
                    M[i] = cbar::zeros(d);
                    c[i] = 0;
                }
            }
        }
        for (const auto& v : brute_vertices(region)) {
            Vec y = cbar::network::eval(net, v);
            if (!out) {
                out.emplace(y, y);
                continue;
            }
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (y[i] < out->first[i])
                    out->first[i] = y[i];
                if (y[i] > out->second[i])
                    out->second[i] = y[i];
            }
        }
    }
    return *out;
}

inline HPolytope unit_box(std::size_t d)
{
    return HPolytope::box(cbar::zeros(d), Vec(d, Rational(1)));
}

inline std::vector<Vec> sorted(std::vector<Vec> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace support
