#include "robustnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

namespace robustnet {

Graph::Graph(int n, const std::vector<std::pair<int, int>>& edge_list) : node_count(n) {
    if (n <= 0) throw std::invalid_argument("Graph: node_count must be positive");
    for (auto [i, j] : edge_list) {
        if (i == j) throw std::invalid_argument("Graph: self-loop at node " + std::to_string(i));
        if (i < 1 || i > n || j < 1 || j > n) {
            throw std::invalid_argument("Graph: edge (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") out of range 1.." + std::to_string(n));
        }
        edges.emplace(std::min(i, j), std::max(i, j));
    }
}

bool Graph::has_edge(int i, int j) const {
    return edges.count({std::min(i, j), std::max(i, j)}) > 0;
}

int Graph::degree(int i) const {
    int d = 0;
    for (const auto& [a, b] : edges) {
        if (a == i || b == i) ++d;
    }
    return d;
}

bool Graph::connected() const {
    if (node_count <= 1) return true;
    std::vector<char> seen(static_cast<size_t>(node_count) + 1, 0);
    std::queue<int> frontier;
    frontier.push(1);
    seen[1] = 1;
    int visited = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (const auto& [a, b] : edges) {
            const int v = (a == u) ? b : (b == u ? a : 0);
            if (v != 0 && !seen[static_cast<size_t>(v)]) {
                seen[static_cast<size_t>(v)] = 1;
                ++visited;
                frontier.push(v);
            }
        }
    }
    return visited == node_count;
}

PinSet::PinSet(std::vector<double> w) : weights(std::move(w)) {
    for (double d : weights) {
        if (!(d >= 0.0) || !std::isfinite(d)) {
            throw std::invalid_argument("PinSet: weights must be finite and nonnegative");
        }
    }
}

bool PinSet::any_positive() const {
    return std::any_of(weights.begin(), weights.end(), [](double d) { return d > 0.0; });
}

Matrix PinSet::as_diagonal() const {
    Matrix d = Matrix::Zero(size(), size());
    for (int i = 0; i < size(); ++i) d(i, i) = weights[static_cast<size_t>(i)];
    return d;
}

namespace {

void check_pattern(const Matrix& m, const Graph& g) {
    const int n = g.node_count;
    if (m.rows() != n || m.cols() != n) {
        throw std::invalid_argument("StochasticMatrix: size does not match graph");
    }
    require_finite(m, "StochasticMatrix");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("StochasticMatrix: matrix must be symmetric");
    }
    for (int i = 0; i < n; ++i) {
        if (!(m(i, i) > 0.0)) {
            throw std::invalid_argument("StochasticMatrix: diagonal entry " + std::to_string(i + 1) +
                                        " must be strictly positive");
        }
        for (int j = i + 1; j < n; ++j) {
            const bool edge = g.has_edge(i + 1, j + 1);
            if (edge && !(m(i, j) > 0.0)) {
                throw std::invalid_argument("StochasticMatrix: entry (" + std::to_string(i + 1) + "," +
                                            std::to_string(j + 1) + ") must be positive on an edge");
            }
            if (!edge && m(i, j) != 0.0) {
                throw std::invalid_argument("StochasticMatrix: entry (" + std::to_string(i + 1) + "," +
                                            std::to_string(j + 1) + ") must be zero off the edge set");
            }
        }
    }
}

}  // namespace

StochasticMatrix StochasticMatrix::checked(Matrix m, const Graph& g) {
    check_pattern(m, g);
    StochasticMatrix out{std::move(m)};
    if (out.max_row_sum_error() > 1e-12) {
        throw std::invalid_argument("StochasticMatrix: rows must sum to 1 (max error " +
                                    std::to_string(out.max_row_sum_error()) + ")");
    }
    return out;
}

StochasticMatrix StochasticMatrix::from_explicit(Matrix m, const Graph& g) {
    check_pattern(m, g);
    return StochasticMatrix{std::move(m)};
}

double StochasticMatrix::max_row_sum_error() const {
    return (entries.rowwise().sum() - Vector::Ones(entries.rows())).cwiseAbs().maxCoeff();
}

Matrix laplacian(const Graph& g) {
    const int n = g.node_count;
    Matrix l = Matrix::Zero(n, n);
    for (const auto& [i, j] : g.edges) {
        l(i - 1, j - 1) -= 1.0;
        l(j - 1, i - 1) -= 1.0;
        l(i - 1, i - 1) += 1.0;
        l(j - 1, j - 1) += 1.0;
    }
    return l;
}

Matrix pinned_laplacian(const Graph& g, const PinSet& pins) {
    if (pins.size() != g.node_count) {
        throw std::invalid_argument("pinned_laplacian: pin count must match node count");
    }
    return laplacian(g) + pins.as_diagonal();
}

StochasticMatrix stochastic_weights(const Graph& g) {
    const int n = g.node_count;
    Matrix d = Matrix::Zero(n, n);
    for (const auto& [i, j] : g.edges) {
        const double w = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
        d(i - 1, j - 1) = w;
        d(j - 1, i - 1) = w;
    }
    for (int i = 0; i < n; ++i) d(i, i) = 1.0 - d.row(i).sum();
    return StochasticMatrix::checked(std::move(d), g);
}

Matrix pinned_stochastic(const StochasticMatrix& dmat, const PinSet& pins) {
    const int n = static_cast<int>(dmat.entries.rows());
    if (pins.size() != n) {
        throw std::invalid_argument("pinned_stochastic: pin count must match matrix size");
    }
    for (int i = 0; i < n; ++i) {
        const double di = pins.weights[static_cast<size_t>(i)];
        if (di > 0.0 && di >= dmat.entries(i, i)) {
            throw std::invalid_argument("pinned_stochastic: pin weight at node " + std::to_string(i + 1) +
                                        " must be below the diagonal entry " +
                                        std::to_string(dmat.entries(i, i)));
        }
    }
    return dmat.entries - pins.as_diagonal();
}

bool check_assumption1(const Graph& g, const PinSet& pins) {
    if (pins.size() != g.node_count) return false;
    return g.connected() && pins.any_positive();
}

Network::Network(Graph g, PinSet p, std::optional<StochasticMatrix> dmat)
    : graph(std::move(g)), pins(std::move(p)), stochastic(std::move(dmat)) {
    if (pins.size() != graph.node_count) {
        throw std::invalid_argument("Network: pin count must match node count");
    }
    if (stochastic && stochastic->entries.rows() != graph.node_count) {
        throw std::invalid_argument("Network: stochastic matrix size must match node count");
    }
}

Matrix Network::pinned_laplacian_matrix() const { return pinned_laplacian(graph, pins); }

StochasticMatrix Network::stochastic_matrix() const {
    return stochastic ? *stochastic : stochastic_weights(graph);
}

Matrix Network::pinned_stochastic_matrix() const {
    return pinned_stochastic(stochastic_matrix(), pins);
}

double Network::lambda_min() const { return laplacian_eigenvalues()(0); }

Vector Network::laplacian_eigenvalues() const {
    return eig_symmetric(pinned_laplacian_matrix()).first;
}

Vector Network::pinned_stochastic_eigenvalues() const {
    return eig_symmetric(pinned_stochastic_matrix()).first;
}

double Network::kappa() const {
    const Vector ev = pinned_stochastic_eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace robustnet
