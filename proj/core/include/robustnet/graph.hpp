#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "robustnet/matrix_ops.hpp"

namespace robustnet {

// Undirected graph on nodes 1..N, no self-loops.
struct Graph {
    int node_count = 0;
    std::set<std::pair<int, int>> edges;  // stored with first < second

    Graph() = default;
    Graph(int n, const std::vector<std::pair<int, int>>& edge_list);

    bool has_edge(int i, int j) const;
    int degree(int i) const;
    bool connected() const;  // BFS; empty and single-node graphs count as connected
};

// Pinning weights d_i >= 0, one per node. Zero means the node does not know
// its own state.
struct PinSet {
    std::vector<double> weights;

    explicit PinSet(std::vector<double> w);
    static PinSet none(int n) { return PinSet(std::vector<double>(static_cast<size_t>(n), 0.0)); }
    int size() const { return static_cast<int>(weights.size()); }
    bool any_positive() const;
    Matrix as_diagonal() const;
};

// Symmetric row-stochastic averaging matrix with positive diagonal whose
// off-diagonal positivity pattern matches the graph's edges.
struct StochasticMatrix {
    Matrix entries;

    // Strict validation; used for constructed (Metropolis) matrices.
    static StochasticMatrix checked(Matrix m, const Graph& g);
    // Lenient on row sums (symmetry, pattern and sign checks still apply);
    // needed for externally supplied weights. max_row_sum_error reports the
    // worst deviation from unit row sums.
    static StochasticMatrix from_explicit(Matrix m, const Graph& g);

    double max_row_sum_error() const;
};

Matrix laplacian(const Graph& g);

// L + diag(pins); positive definite whenever Assumption 1 holds.
Matrix pinned_laplacian(const Graph& g, const PinSet& pins);

// Metropolis-Hastings weights: d_ij = 1/(1 + max(deg_i, deg_j)) on edges,
// diagonal fills each row to 1.
StochasticMatrix stochastic_weights(const Graph& g);

// D - diag(pins); requires e_ii > d_i > 0 for every pinned node.
Matrix pinned_stochastic(const StochasticMatrix& dmat, const PinSet& pins);

// Connected graph and at least one positive pin weight.
bool check_assumption1(const Graph& g, const PinSet& pins);

// Agent communication topology as consumed by synthesis/verification: the
// graph, the pin weights, and (optionally) an explicitly supplied stochastic
// matrix for the discrete-time constructions.
struct Network {
    Graph graph;
    PinSet pins;
    std::optional<StochasticMatrix> stochastic;  // Metropolis weights when absent

    Network(Graph g, PinSet p, std::optional<StochasticMatrix> dmat = std::nullopt);

    Matrix pinned_laplacian_matrix() const;
    StochasticMatrix stochastic_matrix() const;
    Matrix pinned_stochastic_matrix() const;

    double lambda_min() const;                 // smallest eigenvalue of the pinned Laplacian
    Vector laplacian_eigenvalues() const;      // ascending
    Vector pinned_stochastic_eigenvalues() const;  // ascending (matrix is symmetric)
    double kappa() const;                      // max |eigenvalue| of the pinned stochastic matrix
    bool assumption1() const { return check_assumption1(graph, pins); }
};

}  // namespace robustnet
