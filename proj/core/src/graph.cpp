#include "grabucb/graph.hpp"

#include "grabucb/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace grabucb {

Graph Graph::from_weights(Matrix w) {
    if (w.rows() != w.cols()) {
        throw std::invalid_argument("graph weights must be square");
    }
    const int n = static_cast<int>(w.rows());
    for (int i = 0; i < n; ++i) {
        if (w(i, i) != 0.0) {
            throw std::invalid_argument("graph weights must have a zero diagonal");
        }
        for (int j = i + 1; j < n; ++j) {
            if (w(i, j) != w(j, i)) {
                throw std::invalid_argument("graph weights must be symmetric");
            }
            if (w(i, j) < 0.0 || !std::isfinite(w(i, j))) {
                throw std::invalid_argument("graph weights must be finite and nonnegative");
            }
        }
    }
    return Graph{std::move(w)};
}

Matrix laplacian(const Graph& g) {
    const Vector degrees = g.weights.rowwise().sum();
    Matrix lap = -g.weights;
    lap.diagonal() = degrees;
    return lap;
}

Graph generate_ba(int n, int m0, int m, std::uint64_t seed) {
    if (m < 1 || m > m0) {
        throw std::invalid_argument("generate_ba: need 1 <= m <= m0");
    }
    if (m0 > n) {
        throw std::invalid_argument("generate_ba: need m0 <= n");
    }
    Matrix w = Matrix::Zero(n, n);
    std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
    auto add_edge = [&](int a, int b) {
        w(a, b) = 1.0;
        w(b, a) = 1.0;
        degree[static_cast<std::size_t>(a)] += 1.0;
        degree[static_cast<std::size_t>(b)] += 1.0;
    };

    // connected seed core: a ring (a single edge when m0 == 2)
    if (m0 >= 2) {
        for (int i = 0; i < m0; ++i) {
            const int j = (i + 1) % m0;
            if (w(i, j) == 0.0) add_edge(i, j);
        }
    }

    Rng rng(seed);
    std::vector<int> targets;
    targets.reserve(static_cast<std::size_t>(m));
    for (int v = m0; v < n; ++v) {
        targets.clear();
        // sample m distinct targets, degree-proportional, without
        // replacement (weights renormalized after each pick)
        std::vector<double> avail(degree.begin(), degree.begin() + v);
        std::vector<bool> taken(static_cast<std::size_t>(v), false);
        for (int pick = 0; pick < m; ++pick) {
            const double total = std::accumulate(avail.begin(), avail.end(), 0.0);
            int chosen = -1;
            if (total <= 0.0) {
                // all remaining candidates have zero degree (tiny cores);
                // fall back to a uniform pick among them
                int free_count = 0;
                for (int cand = 0; cand < v; ++cand) {
                    if (!taken[static_cast<std::size_t>(cand)]) ++free_count;
                }
                int skip = rng.uniform_int(free_count);
                for (int cand = 0; cand < v; ++cand) {
                    if (taken[static_cast<std::size_t>(cand)]) continue;
                    if (skip-- == 0) {
                        chosen = cand;
                        break;
                    }
                }
            } else {
                double u = rng.uniform01() * total;
                for (int cand = 0; cand < v; ++cand) {
                    if (avail[static_cast<std::size_t>(cand)] <= 0.0) continue;
                    u -= avail[static_cast<std::size_t>(cand)];
                    if (u < 0.0) {
                        chosen = cand;
                        break;
                    }
                }
            }
            if (chosen < 0) {
                // rounding pushed u past the end; take the last available
                for (int cand = v - 1; cand >= 0; --cand) {
                    if (avail[static_cast<std::size_t>(cand)] > 0.0) {
                        chosen = cand;
                        break;
                    }
                }
            }
            targets.push_back(chosen);
            avail[static_cast<std::size_t>(chosen)] = 0.0;
            taken[static_cast<std::size_t>(chosen)] = true;
        }
        for (int t : targets) add_edge(v, t);
    }
    return Graph{std::move(w)};
}

Graph generate_rbf(int n, double sigma, double threshold, std::uint64_t seed) {
    if (sigma <= 0.0) {
        throw std::invalid_argument("generate_rbf: sigma must be positive");
    }
    if (threshold <= 0.0) {
        throw std::invalid_argument("generate_rbf: threshold must be positive");
    }
    Rng rng(seed);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = rng.uniform01();
        y[static_cast<std::size_t>(i)] = rng.uniform01();
    }
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
            const double dy = y[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)];
            const double dist2 = dx * dx + dy * dy;
            if (dist2 <= threshold * threshold) {
                const double weight = std::exp(-dist2 / (2.0 * sigma));
                w(i, j) = weight;
                w(j, i) = weight;
            }
        }
    }
    return Graph{std::move(w)};
}

Spectrum spectrum(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectrum: symmetric eigensolver did not converge");
    }
    Vector values = solver.eigenvalues();
    for (int i = 0; i < values.size(); ++i) {
        if (values(i) > -1e-10 && values(i) < 0.0) values(i) = 0.0;
    }
    return Spectrum{std::move(values), solver.eigenvectors()};
}

double power_sum(const Spectrum& s, int degree_count) {
    if (degree_count < 1) {
        throw std::invalid_argument("power_sum: degree count must be >= 1");
    }
    const int n = s.size();
    double d = static_cast<double>(n); // k = 0 term: lambda^0 = 1, also at 0
    Vector term = Vector::Ones(n);
    for (int k = 1; k < degree_count; ++k) {
        term = term.cwiseProduct(s.eigenvalues);
        d += term.sum();
    }
    return d;
}

DictionaryBasis dictionary_basis(const Matrix& lap, int degree_count,
                                 std::size_t memory_budget_bytes) {
    if (degree_count < 1) {
        throw std::invalid_argument("dictionary_basis: degree count must be >= 1");
    }
    const std::size_t n = static_cast<std::size_t>(lap.rows());
    const std::size_t bytes = n * n * static_cast<std::size_t>(degree_count) * sizeof(double);
    if (bytes > memory_budget_bytes) {
        std::ostringstream msg;
        msg << "dictionary_basis: " << bytes << " bytes for " << degree_count
            << " powers of a " << n << "x" << n << " matrix exceeds the budget of "
            << memory_budget_bytes << " bytes";
        throw MemoryBudgetError(msg.str());
    }
    DictionaryBasis basis;
    basis.powers.reserve(static_cast<std::size_t>(degree_count));
    basis.powers.push_back(Matrix::Identity(lap.rows(), lap.cols()));
    for (int k = 1; k < degree_count; ++k) {
        basis.powers.push_back(basis.powers.back() * lap);
    }
    return basis;
}

void write_edge_list(std::ostream& os, const Graph& g) {
    const int n = g.size();
    os << "n=" << n << "\n";
    std::ostringstream line;
    line.precision(std::numeric_limits<double>::max_digits10);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (g.weights(i, j) != 0.0) {
                line.str("");
                line << i << " " << j << " " << g.weights(i, j);
                os << line.str() << "\n";
            }
        }
    }
}

Graph read_edge_list(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("n=", 0) != 0) {
        throw std::invalid_argument("edge list: expected header line \"n=<int>\"");
    }
    const int n = std::stoi(header.substr(2));
    if (n < 0) {
        throw std::invalid_argument("edge list: negative node count");
    }
    Matrix w = Matrix::Zero(n, n);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        int i = 0, j = 0;
        double weight = 0.0;
        if (!(row >> i >> j >> weight)) {
            throw std::invalid_argument("edge list: malformed line: " + line);
        }
        if (i < 0 || j < 0 || i >= n || j >= n || i >= j) {
            throw std::invalid_argument("edge list: bad endpoints in line: " + line);
        }
        w(i, j) = weight;
        w(j, i) = weight;
    }
    return Graph::from_weights(std::move(w));
}

void save_edge_list(const std::string& path, const Graph& g) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_edge_list(os, g);
}

Graph load_edge_list(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return read_edge_list(is);
}

} // namespace grabucb
