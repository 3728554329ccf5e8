#include "grabucb/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace grabucb {

KernelCoefficients diffusion_poly_coefficients(double tau, int degree_count) {
    if (degree_count < 1) {
        throw std::invalid_argument("diffusion_poly_coefficients: degree count must be >= 1");
    }
    Vector alpha(degree_count);
    double term = 1.0;
    alpha(0) = term;
    for (int k = 1; k < degree_count; ++k) {
        term *= -tau / static_cast<double>(k);
        alpha(k) = term;
    }
    return KernelCoefficients{std::move(alpha)};
}

Vector Mask::indicator() const {
    Vector m(size());
    for (int i = 0; i < size(); ++i) m(i) = selected(i) ? 1.0 : 0.0;
    return m;
}

Mask Mask::full(int n) {
    return Mask{std::vector<std::uint8_t>(static_cast<std::size_t>(n), 1), n};
}

Mask Mask::from_bits(std::vector<std::uint8_t> bits) {
    const int q = static_cast<int>(std::count_if(bits.begin(), bits.end(),
                                                 [](std::uint8_t b) { return b != 0; }));
    if (q < 1) {
        throw std::invalid_argument("mask must select at least one node");
    }
    return Mask{std::move(bits), q};
}

Mask random_mask(int n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw std::invalid_argument("random_mask: fraction must be in (0, 1]");
    }
    const int q = static_cast<int>(std::lround(fraction * n));
    if (q < 1) {
        throw std::invalid_argument("random_mask: fraction too small, rounds to zero nodes");
    }
    // Fisher-Yates prefix of a node permutation
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (int i = 0; i < q; ++i) {
        const int j = i + rng.uniform_int(n - i);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < q; ++i) bits[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = 1;
    return Mask{std::move(bits), q};
}

ActionSignal ActionSignal::from_values(Vector v) {
    std::vector<int> support;
    for (int i = 0; i < v.size(); ++i) {
        const double x = v(i);
        if (x < 0.0 || x > 1.0 || !std::isfinite(x)) {
            throw std::invalid_argument("action signal entries must lie in [0, 1]");
        }
        if (x != 0.0) support.push_back(i);
    }
    return ActionSignal{std::move(v), std::move(support)};
}

ActionSignal ActionSignal::from_support(int n, std::span<const int> ones) {
    Vector v = Vector::Zero(n);
    std::vector<int> support(ones.begin(), ones.end());
    std::sort(support.begin(), support.end());
    for (int i : support) {
        if (i < 0 || i >= n) throw std::invalid_argument("action support index out of range");
        if (v(i) != 0.0) throw std::invalid_argument("action support index repeated");
        v(i) = 1.0;
    }
    return ActionSignal{std::move(v), std::move(support)};
}

Environment make_environment(Graph graph, int degree_count, TrueKernel kernel,
                             Mask mask, double sigma_e, std::uint64_t noise_seed) {
    const int n = graph.size();
    if (mask.size() != n) {
        throw std::invalid_argument("environment: mask size differs from node count");
    }
    if (sigma_e < 0.0) {
        throw std::invalid_argument("environment: sigma_e must be nonnegative");
    }
    if (const auto* poly = std::get_if<PolynomialKernel>(&kernel)) {
        if (poly->coeffs.size() != degree_count) {
            throw std::invalid_argument("environment: polynomial kernel length differs from K");
        }
        if (!poly->coeffs.alpha.allFinite()) {
            throw std::invalid_argument("environment: polynomial kernel has non-finite entries");
        }
    } else if (const auto* diff = std::get_if<DiffusionKernel>(&kernel)) {
        if (!(diff->tau > 0.0)) {
            throw std::invalid_argument("environment: diffusion tau must be positive");
        }
    }
    Matrix lap = laplacian(graph);
    DictionaryBasis basis = dictionary_basis(lap, degree_count);
    Spectrum spec = spectrum(lap);
    return Environment{std::move(graph), std::move(lap),    std::move(basis),
                       std::move(spec),  std::move(kernel), std::move(mask),
                       sigma_e,          Rng(noise_seed)};
}

Vector apply_poly_kernel(const DictionaryBasis& basis, const KernelCoefficients& coeffs,
                         const Vector& h) {
    if (coeffs.size() != basis.degree_count()) {
        throw std::invalid_argument("apply_poly_kernel: coefficient count differs from basis");
    }
    if (h.size() != basis.nodes()) {
        throw std::invalid_argument("apply_poly_kernel: signal length differs from node count");
    }
    Vector out = Vector::Zero(h.size());
    for (int k = 0; k < basis.degree_count(); ++k) {
        if (coeffs.alpha(k) != 0.0) {
            out.noalias() += coeffs.alpha(k) * (basis.powers[static_cast<std::size_t>(k)] * h);
        }
    }
    return out;
}

Vector apply_diffusion(const Spectrum& s, double tau, const Vector& h) {
    if (h.size() != s.size()) {
        throw std::invalid_argument("apply_diffusion: signal length differs from node count");
    }
    const Vector coords = s.eigenvectors.transpose() * h;
    const Vector scaled = (-tau * s.eigenvalues.array()).exp() * coords.array();
    return s.eigenvectors * scaled;
}

Vector apply_true_kernel(const Environment& env, const Vector& h) {
    if (const auto* poly = std::get_if<PolynomialKernel>(&env.kernel)) {
        return apply_poly_kernel(env.basis, poly->coeffs, h);
    }
    return apply_diffusion(env.spec, std::get<DiffusionKernel>(env.kernel).tau, h);
}

Observation observe(Environment& env, const ActionSignal& h) {
    Vector y = apply_true_kernel(env, h.values);
    if (env.sigma_e > 0.0) {
        for (int i = 0; i < y.size(); ++i) y(i) += env.sigma_e * env.noise.gaussian();
    }
    Vector w = Vector::Zero(y.size());
    for (int i = 0; i < y.size(); ++i) {
        if (env.mask.selected(i)) w(i) = y(i);
    }
    return Observation{h, std::move(y), std::move(w), mean_reward(env, h)};
}

double mean_reward(const Environment& env, const ActionSignal& h) {
    const Vector y = apply_true_kernel(env, h.values);
    double r = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        if (env.mask.selected(i)) r += y(i);
    }
    return r;
}

Matrix feature_matrix(const DictionaryBasis& basis, const Mask& mask, const ActionSignal& h) {
    const int n = basis.nodes();
    if (mask.size() != n || h.size() != n) {
        throw std::invalid_argument("feature_matrix: inconsistent dimensions");
    }
    Matrix z(n, basis.degree_count());
    for (int k = 0; k < basis.degree_count(); ++k) {
        z.col(k).noalias() = basis.powers[static_cast<std::size_t>(k)] * h.values;
    }
    for (int i = 0; i < n; ++i) {
        if (!mask.selected(i)) z.row(i).setZero();
    }
    return z;
}

Vector aggregated_feature(const Matrix& z) {
    return z.colwise().sum().transpose();
}

} // namespace grabucb
