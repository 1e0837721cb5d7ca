#ifndef SREHM_RANKING_HPP
#define SREHM_RANKING_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace srehm {

/// Dense n x n row-major matrix of doubles.
struct Matrix {
    std::size_t n = 0;
    std::vector<double> data;

    Matrix() = default;
    explicit Matrix(std::size_t size, double fill = 0.0) : n(size), data(size * size, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
};

/// Weighted directed invocation graph of one VHAN. fq(a,b) counts invocations a -> b
/// (a invokes b); `weights` is the row-stochastic edge-weight matrix derived from it.
struct InvocationGraph {
    std::size_t n = 0;
    Matrix fq;
    std::vector<bool> critical;
    Matrix weights;
    std::vector<int> node_ids;  // external ids (VM ids); defaults to 0..n-1

    std::size_t critical_count() const;
};

/// Builds the row-stochastic weight matrix. Rows of non-critical sources and rows with
/// no outgoing invocations become uniform 1/n. Throws InvalidArgument on a negative
/// count, a nonzero diagonal, size mismatch or n == 0.
InvocationGraph build_wdg(const Matrix& fq, const std::vector<bool>& critical, std::vector<int> node_ids = {});

inline constexpr double kDefaultDamping = 0.85;
inline constexpr double kDefaultPsiFloor = 0.8;

struct SignificanceOptions {
    double damping = kDefaultDamping;
    std::optional<double> psi;  // default max(0.8, |C|/n)
    double tol = 1e-9;
    int max_iter = 1000;
};

struct SignificanceVector {
    std::vector<double> values;
    std::vector<int> node_ids;
    double damping = kDefaultDamping;
    double psi = 1.0;
    int iterations = 0;
    bool converged = false;
};

/// Default critical-class weight for a graph: max(0.8, |C|/n).
double default_psi(const InvocationGraph& graph);

/// Teleport share of each node: psi/|C| for critical nodes and (1-psi)/|NC| otherwise.
/// An empty class hands its whole mass to the other one.
std::vector<double> teleport_vector(const InvocationGraph& graph, double psi);

/// Power iteration of the criticality-aware weighted PageRank, starting from 1/n.
/// Throws InvalidArgument for psi outside [|C|/n, 1] or damping outside [0,1], and
/// ConvergenceError (carrying the last iterate) when max_iter is exhausted.
SignificanceVector significance(const InvocationGraph& graph, const SignificanceOptions& options = {});

/// Node ids in descending significance; ties by ascending id.
std::vector<int> rank(const SignificanceVector& sig);

inline constexpr int kDefaultCriticalThreshold = 3;

/// Critical iff the node receives strictly more than `threshold` invocations.
std::vector<bool> classify_critical(std::span<const int> invocations_in, int threshold = kDefaultCriticalThreshold);

/// Total invocations received by each node (column sums of fq).
std::vector<int> in_invocations(const Matrix& fq);

/// Edge-list text: optional "critical: id,id,..." header followed by "src dst count" lines.
/// '#' starts a comment. Node count is one past the largest id mentioned. Without a
/// critical header, criticality is derived from in-invocation counts. Throws
/// InvalidArgument on malformed input or an empty graph.
InvocationGraph parse_graph(std::istream& in, int critical_threshold = kDefaultCriticalThreshold);
InvocationGraph load_graph(const std::string& path, int critical_threshold = kDefaultCriticalThreshold);
void write_graph(std::ostream& out, const InvocationGraph& graph);

}  // namespace srehm

#endif  // SREHM_RANKING_HPP
