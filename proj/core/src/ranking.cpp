#include "srehm/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "srehm/error.hpp"

namespace srehm {

std::size_t InvocationGraph::critical_count() const {
    return static_cast<std::size_t>(std::count(critical.begin(), critical.end(), true));
}

InvocationGraph build_wdg(const Matrix& fq, const std::vector<bool>& critical, std::vector<int> node_ids) {
    const std::size_t n = fq.n;
    if (n == 0) throw InvalidArgument("invocation graph needs at least one node");
    if (fq.data.size() != n * n) throw InvalidArgument("invocation matrix is not square");
    if (critical.size() != n) throw InvalidArgument("criticality flags do not match node count");
    if (node_ids.empty()) {
        node_ids.resize(n);
        std::iota(node_ids.begin(), node_ids.end(), 0);
    } else if (node_ids.size() != n) {
        throw InvalidArgument("node id list does not match node count");
    }

    InvocationGraph g;
    g.n = n;
    g.fq = fq;
    g.critical = critical;
    g.node_ids = std::move(node_ids);
    g.weights = Matrix(n);

    for (std::size_t a = 0; a < n; ++a) {
        double row_sum = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            const double c = fq(a, b);
            if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("invocation counts must be non-negative");
            if (a == b && c != 0.0) throw InvalidArgument("invocation matrix must have a zero diagonal");
            row_sum += c;
        }
        // The criticality factor either keeps the normalized row or zeroes it; a zeroed or
        // empty row falls back to the uniform row so every row still sums to one.
        if (row_sum > 0.0 && critical[a]) {
            for (std::size_t b = 0; b < n; ++b) g.weights(a, b) = fq(a, b) / row_sum;
        } else {
            for (std::size_t b = 0; b < n; ++b) g.weights(a, b) = 1.0 / static_cast<double>(n);
        }
    }
    return g;
}

double default_psi(const InvocationGraph& graph) {
    const double share = static_cast<double>(graph.critical_count()) / static_cast<double>(graph.n);
    return std::max(kDefaultPsiFloor, share);
}

std::vector<double> teleport_vector(const InvocationGraph& graph, double psi) {
    const std::size_t n = graph.n;
    const auto nc = static_cast<double>(graph.critical_count());
    const double nn = static_cast<double>(n) - nc;
    std::vector<double> t(n);
    for (std::size_t a = 0; a < n; ++a) {
        if (graph.critical[a]) {
            t[a] = nn == 0.0 ? 1.0 / nc : psi / nc;
        } else {
            t[a] = nc == 0.0 ? 1.0 / nn : (1.0 - psi) / nn;
        }
    }
    return t;
}

SignificanceVector significance(const InvocationGraph& graph, const SignificanceOptions& options) {
    const std::size_t n = graph.n;
    if (n == 0 || graph.weights.n != n) throw InvalidArgument("significance needs a built, non-empty graph");
    const double d = options.damping;
    if (!(d >= 0.0 && d <= 1.0)) throw InvalidArgument("damping must lie in [0,1]");
    const double psi = options.psi.value_or(default_psi(graph));
    const double floor = static_cast<double>(graph.critical_count()) / static_cast<double>(n);
    if (!(psi >= floor - 1e-12 && psi <= 1.0)) {
        throw InvalidArgument("psi must lie in [|C|/n, 1]");
    }
    if (!(options.tol > 0.0) || options.max_iter < 1) throw InvalidArgument("invalid tolerance or iteration cap");

    const std::vector<double> teleport = teleport_vector(graph, psi);
    SignificanceVector out;
    out.node_ids = graph.node_ids;
    out.damping = d;
    out.psi = psi;
    std::vector<double> s(n, 1.0 / static_cast<double>(n)), next(n);

    for (int it = 1; it <= options.max_iter; ++it) {
        for (std::size_t a = 0; a < n; ++a) {
            double inflow = 0.0;
            for (std::size_t g = 0; g < n; ++g) inflow += s[g] * graph.weights(g, a);
            next[a] = (1.0 - d) * teleport[a] + d * inflow;
        }
        double change = 0.0;
        for (std::size_t a = 0; a < n; ++a) change = std::max(change, std::abs(next[a] - s[a]));
        s.swap(next);
        if (change < options.tol) {
            out.values = std::move(s);
            out.iterations = it;
            out.converged = true;
            return out;
        }
    }
    throw ConvergenceError("significance did not converge within " + std::to_string(options.max_iter) +
                               " iterations",
                           s);
}

std::vector<int> rank(const SignificanceVector& sig) {
    std::vector<std::size_t> order(sig.values.size());
    std::iota(order.begin(), order.end(), 0);
    auto id = [&](std::size_t i) { return sig.node_ids.empty() ? static_cast<int>(i) : sig.node_ids[i]; };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sig.values[a] != sig.values[b]) return sig.values[a] > sig.values[b];
        return id(a) < id(b);
    });
    std::vector<int> ids;
    ids.reserve(order.size());
    for (std::size_t i : order) ids.push_back(id(i));
    return ids;
}

std::vector<bool> classify_critical(std::span<const int> invocations_in, int threshold) {
    std::vector<bool> flags;
    flags.reserve(invocations_in.size());
    for (int c : invocations_in) flags.push_back(c > threshold);
    return flags;
}

std::vector<int> in_invocations(const Matrix& fq) {
    std::vector<int> in(fq.n, 0);
    for (std::size_t a = 0; a < fq.n; ++a) {
        for (std::size_t b = 0; b < fq.n; ++b) in[b] += static_cast<int>(std::lround(fq(a, b)));
    }
    return in;
}

namespace {

struct Edge {
    long src;
    long dst;
    double count;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

long parse_id(const std::string& tok, std::size_t line) {
    std::size_t used = 0;
    long v = -1;
    try {
        v = std::stol(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size() || v < 0) {
        throw InvalidArgument("graph line " + std::to_string(line) + ": bad node id '" + tok + "'");
    }
    return v;
}

}  // namespace

InvocationGraph parse_graph(std::istream& in, int critical_threshold) {
    std::vector<Edge> edges;
    std::optional<std::vector<long>> critical_ids;
    long max_id = -1;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty()) continue;
        if (text.rfind("critical:", 0) == 0) {
            if (critical_ids) throw InvalidArgument("graph line " + std::to_string(line) + ": duplicate critical header");
            critical_ids.emplace();
            std::stringstream list(text.substr(9));
            std::string tok;
            while (std::getline(list, tok, ',')) {
                tok = trim(tok);
                if (tok.empty()) continue;
                const long id = parse_id(tok, line);
                critical_ids->push_back(id);
                max_id = std::max(max_id, id);
            }
            continue;
        }
        std::istringstream row(text);
        std::string s, d, c, extra;
        if (!(row >> s >> d >> c) || (row >> extra)) {
            throw InvalidArgument("graph line " + std::to_string(line) + ": expected 'src dst count'");
        }
        const long src = parse_id(s, line);
        const long dst = parse_id(d, line);
        double count = 0.0;
        try {
            std::size_t used = 0;
            count = std::stod(c, &used);
            if (used != c.size()) throw InvalidArgument("");
        } catch (const std::exception&) {
            throw InvalidArgument("graph line " + std::to_string(line) + ": bad count '" + c + "'");
        }
        if (!(count >= 0.0) || !std::isfinite(count)) {
            throw InvalidArgument("graph line " + std::to_string(line) + ": negative count");
        }
        if (src == dst && count != 0.0) {
            throw InvalidArgument("graph line " + std::to_string(line) + ": self-invocation");
        }
        edges.push_back({src, dst, count});
        max_id = std::max({max_id, src, dst});
    }
    if (max_id < 0) throw InvalidArgument("graph file defines no nodes");

    const auto n = static_cast<std::size_t>(max_id + 1);
    Matrix fq(n);
    for (const auto& e : edges) fq(static_cast<std::size_t>(e.src), static_cast<std::size_t>(e.dst)) += e.count;
    std::vector<bool> critical(n, false);
    if (critical_ids) {
        for (long id : *critical_ids) critical[static_cast<std::size_t>(id)] = true;
    } else {
        critical = classify_critical(in_invocations(fq), critical_threshold);
    }
    return build_wdg(fq, critical);
}

InvocationGraph load_graph(const std::string& path, int critical_threshold) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open graph file '" + path + "'");
    return parse_graph(in, critical_threshold);
}

void write_graph(std::ostream& out, const InvocationGraph& graph) {
    out << "critical:";
    bool first = true;
    for (std::size_t a = 0; a < graph.n; ++a) {
        if (!graph.critical[a]) continue;
        out << (first ? " " : ",") << a;
        first = false;
    }
    out << '\n';
    for (std::size_t a = 0; a < graph.n; ++a) {
        for (std::size_t b = 0; b < graph.n; ++b) {
            if (graph.fq(a, b) > 0.0) out << a << ' ' << b << ' ' << graph.fq(a, b) << '\n';
        }
    }
}

}  // namespace srehm
