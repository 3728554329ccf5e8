#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace grabucb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when building a dictionary whose dense power stack would exceed
/// the configured memory budget.
struct MemoryBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Weighted undirected graph: symmetric nonnegative weight matrix with a
/// zero diagonal.
struct Graph {
    Matrix weights;

    int size() const { return static_cast<int>(weights.rows()); }

    /// Validates the Graph invariants and takes ownership of the matrix.
    static Graph from_weights(Matrix w);
};

/// Full eigendecomposition of a symmetric matrix. eigenvalues are sorted
/// ascending; eigenvector k is the k-th column.
struct Spectrum {
    Vector eigenvalues;
    Matrix eigenvectors;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Stack of Laplacian powers [L^0, L^1, ..., L^{K-1}].
struct DictionaryBasis {
    std::vector<Matrix> powers;

    int degree_count() const { return static_cast<int>(powers.size()); }
    int nodes() const {
        return powers.empty() ? 0 : static_cast<int>(powers.front().rows());
    }
};

/// Combinatorial Laplacian L = D - W with D the diagonal of row sums.
Matrix laplacian(const Graph& g);

/// Preferential-attachment graph: a ring core of m0 nodes, then each new
/// node links to m distinct existing nodes with probability proportional
/// to current degree. Unweighted (all edge weights 1), connected.
Graph generate_ba(int n, int m0, int m, std::uint64_t seed);

/// Random geometric graph: node coordinates uniform in the unit square,
/// W(i,j) = exp(-dist^2 / (2 sigma)) when dist <= threshold, else 0.
Graph generate_rbf(int n, double sigma, double threshold, std::uint64_t seed);

/// Symmetric eigendecomposition. Eigenvalues in (-1e-10, 0) are clamped to
/// zero so that Laplacian spectra come out exactly PSD. Throws
/// std::runtime_error if the solver fails to converge.
Spectrum spectrum(const Matrix& symmetric);

/// d = sum_{k=0}^{K-1} sum_l lambda_l^k, with lambda^0 = 1 for lambda = 0.
/// This is the spectral power sum entering the confidence and regret bounds.
double power_sum(const Spectrum& s, int degree_count);

/// Builds [I, L, L^2, ..., L^{K-1}] by repeated multiplication. Throws
/// MemoryBudgetError when n*n*K doubles would exceed the budget.
DictionaryBasis dictionary_basis(const Matrix& lap, int degree_count,
                                 std::size_t memory_budget_bytes = std::size_t{2} << 30);

// Edge-list text format: header "n=<int>", then one "<i> <j> <w>" line per
// edge with i < j. Weights are printed with enough digits to round-trip.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);
void save_edge_list(const std::string& path, const Graph& g);
Graph load_edge_list(const std::string& path);

} // namespace grabucb
