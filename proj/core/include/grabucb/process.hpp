#pragma once

#include "grabucb/graph.hpp"
#include "grabucb/rng.hpp"

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace grabucb {

/// The K polynomial coefficients alpha_0 ... alpha_{K-1} of a generating
/// kernel sum_k alpha_k L^k.
struct KernelCoefficients {
    Vector alpha;

    int size() const { return static_cast<int>(alpha.size()); }
};

/// Taylor truncation of exp(-tau L): alpha_k = (-tau)^k / k!.
KernelCoefficients diffusion_poly_coefficients(double tau, int degree_count);

/// Diagonal 0/1 reward mask. q counts the selected nodes.
struct Mask {
    std::vector<std::uint8_t> bits;
    int q = 0;

    int size() const { return static_cast<int>(bits.size()); }
    bool selected(int i) const { return bits[static_cast<std::size_t>(i)] != 0; }

    /// 0/1 indicator vector (the diagonal of M).
    Vector indicator() const;

    static Mask full(int n);
    static Mask from_bits(std::vector<std::uint8_t> bits);
};

/// Exactly round(fraction * n) selected nodes, uniform without replacement.
Mask random_mask(int n, double fraction, std::uint64_t seed);

/// Excitation signal: entries in [0, 1], support lists the nonzero indices
/// in increasing order.
struct ActionSignal {
    Vector values;
    std::vector<int> support;

    int size() const { return static_cast<int>(values.size()); }

    static ActionSignal from_values(Vector v);
    /// Binary signal with ones exactly at the given (sorted or unsorted)
    /// indices.
    static ActionSignal from_support(int n, std::span<const int> ones);
};

struct PolynomialKernel {
    KernelCoefficients coeffs;
};
struct DiffusionKernel {
    double tau = 1.0;
};
using TrueKernel = std::variant<PolynomialKernel, DiffusionKernel>;

/// Ground-truth process: graph spectral data, the generating kernel, the
/// reward mask and the noise stream. One instance drives one simulation.
struct Environment {
    Graph graph;
    Matrix lap;
    DictionaryBasis basis;
    Spectrum spec;
    TrueKernel kernel;
    Mask mask;
    double sigma_e = 0.0;
    Rng noise;

    int nodes() const { return graph.size(); }
};

/// Validates cross-component consistency (same node count everywhere,
/// sigma_e >= 0, kernel parameters in range).
Environment make_environment(Graph graph, int degree_count, TrueKernel kernel,
                             Mask mask, double sigma_e, std::uint64_t noise_seed);

/// One interaction: the action, the resultant signal y, the masked noisy
/// signal w = M y, and the noiseless mean reward.
struct Observation {
    ActionSignal action;
    Vector resultant;
    Vector masked;
    double mean_reward = 0.0;
};

/// sum_k alpha_k L^k h.
Vector apply_poly_kernel(const DictionaryBasis& basis, const KernelCoefficients& coeffs,
                         const Vector& h);

/// U diag(exp(-tau lambda)) U^T h.
Vector apply_diffusion(const Spectrum& s, double tau, const Vector& h);

/// Noiseless resultant signal of the environment's true kernel.
Vector apply_true_kernel(const Environment& env, const Vector& h);

/// Draws y = g_L(h) + eps with iid Gaussian(0, sigma_e^2) noise per node,
/// masks it, and records the mean reward. Advances env's noise stream.
Observation observe(Environment& env, const ActionSignal& h);

/// Scalar mean reward: the noiseless resultant summed over masked-in nodes.
double mean_reward(const Environment& env, const ActionSignal& h);

/// n-by-K feature matrix Z with column k = M (L^k h).
Matrix feature_matrix(const DictionaryBasis& basis, const Mask& mask, const ActionSignal& h);

/// Column sums of Z; the K-dimensional feature of an action under the
/// scalar reward, satisfying xbar . alpha = 1^T (Z alpha).
Vector aggregated_feature(const Matrix& z);

} // namespace grabucb
