#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "nepfw/feasible_sets.hpp"

namespace nepfw {

DagInstance::DagInstance(int node_count, int source, int sink, std::vector<Edge> edges)
    : node_count_(node_count), source_(source), sink_(sink), edges_(std::move(edges)) {
    if (node_count_ < 2) throw InvalidArgument("dag: need at least two nodes");
    auto in_range = [&](int v) { return v >= 0 && v < node_count_; };
    if (!in_range(source_) || !in_range(sink_) || source_ == sink_) {
        throw InvalidArgument("dag: source and sink must be distinct nodes in range");
    }
    const auto n = static_cast<std::size_t>(node_count_);
    out_.assign(n, {});
    std::vector<int> indegree(n, 0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& edge = edges_[e];
        if (!in_range(edge.from) || !in_range(edge.to)) {
            throw InvalidArgument("dag: edge " + std::to_string(e) + " has a node out of range");
        }
        if (edge.from == edge.to) {
            throw InvalidArgument("dag: edge " + std::to_string(e) + " is a self-loop");
        }
        out_[static_cast<std::size_t>(edge.from)].push_back(static_cast<int>(e));
        ++indegree[static_cast<std::size_t>(edge.to)];
    }

    // Kahn's algorithm with a min-heap so the order is canonical.
    std::vector<int> ready;
    for (int v = 0; v < node_count_; ++v) {
        if (indegree[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    }
    std::make_heap(ready.begin(), ready.end(), std::greater<>{});
    while (!ready.empty()) {
        std::pop_heap(ready.begin(), ready.end(), std::greater<>{});
        const int u = ready.back();
        ready.pop_back();
        topo_.push_back(u);
        for (int e : out_[static_cast<std::size_t>(u)]) {
            const int v = edges_[static_cast<std::size_t>(e)].to;
            if (--indegree[static_cast<std::size_t>(v)] == 0) {
                ready.push_back(v);
                std::push_heap(ready.begin(), ready.end(), std::greater<>{});
            }
        }
    }
    if (topo_.size() != n) throw InvalidArgument("dag: graph has a cycle");
    if (path_count() == 0.0) throw InvalidArgument("dag: no path from source to sink");
}

double DagInstance::path_count() const {
    std::vector<double> paths(static_cast<std::size_t>(node_count_), 0.0);
    paths[static_cast<std::size_t>(sink_)] = 1.0;
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
        if (*it == sink_) continue;
        double total = 0.0;
        for (int e : out_[static_cast<std::size_t>(*it)]) {
            total += paths[static_cast<std::size_t>(edges_[static_cast<std::size_t>(e)].to)];
        }
        paths[static_cast<std::size_t>(*it)] = total;
    }
    return paths[static_cast<std::size_t>(source_)];
}

std::size_t DagInstance::longest_path_edges() const {
    constexpr long kUnreachable = -1;
    std::vector<long> longest(static_cast<std::size_t>(node_count_), kUnreachable);
    longest[static_cast<std::size_t>(sink_)] = 0;
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
        if (*it == sink_) continue;
        long best = kUnreachable;
        for (int e : out_[static_cast<std::size_t>(*it)]) {
            const long tail = longest[static_cast<std::size_t>(edges_[static_cast<std::size_t>(e)].to)];
            if (tail != kUnreachable) best = std::max(best, tail + 1);
        }
        longest[static_cast<std::size_t>(*it)] = best;
    }
    return static_cast<std::size_t>(std::max(0L, longest[static_cast<std::size_t>(source_)]));
}

namespace {

bool skip_line(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

DagInstance DagInstance::parse(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t header_line = 0;
    int n = 0, s = 0, t = 0;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip_line(line)) continue;
        std::istringstream fields(line);
        std::string extra;
        if (header_line == 0) {
            if (!(fields >> n >> s >> t) || (fields >> extra)) {
                throw ParseError(line_no, "expected header \"n s t\"");
            }
            header_line = line_no;
            continue;
        }
        Edge edge{};
        if (!(fields >> edge.from >> edge.to) || (fields >> extra)) {
            throw ParseError(line_no, "expected edge \"u v\"");
        }
        if (edge.from < 0 || edge.from >= n || edge.to < 0 || edge.to >= n) {
            throw ParseError(line_no, "edge endpoint out of range [0, " + std::to_string(n) + ")");
        }
        edges.push_back(edge);
    }
    if (header_line == 0) throw ParseError(line_no == 0 ? 1 : line_no, "missing header line");
    try {
        return DagInstance(n, s, t, std::move(edges));
    } catch (const InvalidArgument& e) {
        throw ParseError(header_line, e.what());
    }
}

DagInstance DagInstance::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return parse(in);
}

void DagInstance::write(std::ostream& out) const {
    out << node_count_ << ' ' << source_ << ' ' << sink_ << '\n';
    for (const Edge& e : edges_) out << e.from << ' ' << e.to << '\n';
}

DagInstance DagInstance::layered(int layers, int width, double density, std::uint64_t seed) {
    if (layers < 1 || width < 1) throw InvalidArgument("layered dag: layers and width must be >= 1");
    if (!(density >= 0.0 && density <= 1.0)) throw InvalidArgument("layered dag: density in [0,1]");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution keep(density);
    std::uniform_int_distribution<int> pick(0, width - 1);

    const int source = 0;
    const int sink = layers * width + 1;
    auto node = [width](int layer, int j) { return 1 + layer * width + j; };

    std::vector<Edge> edges;
    for (int j = 0; j < width; ++j) edges.push_back({source, node(0, j)});
    for (int layer = 0; layer + 1 < layers; ++layer) {
        std::vector<std::vector<bool>> link(static_cast<std::size_t>(width),
                                            std::vector<bool>(static_cast<std::size_t>(width)));
        for (auto& row : link) {
            for (std::size_t k = 0; k < row.size(); ++k) row[k] = keep(rng);
        }
        for (int j = 0; j < width; ++j) {
            auto& row = link[static_cast<std::size_t>(j)];
            if (std::none_of(row.begin(), row.end(), [](bool b) { return b; })) {
                row[static_cast<std::size_t>(pick(rng))] = true;
            }
        }
        for (int k = 0; k < width; ++k) {
            bool has_in = false;
            for (int j = 0; j < width; ++j) has_in = has_in || link[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            if (!has_in) link[static_cast<std::size_t>(pick(rng))][static_cast<std::size_t>(k)] = true;
        }
        for (int j = 0; j < width; ++j) {
            for (int k = 0; k < width; ++k) {
                if (link[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]) {
                    edges.push_back({node(layer, j), node(layer + 1, k)});
                }
            }
        }
    }
    for (int j = 0; j < width; ++j) edges.push_back({node(layers - 1, j), sink});
    return DagInstance(sink + 1, source, sink, std::move(edges));
}

DagInstance DagInstance::diamond() {
    // s=0, a=1, b=2, t=3
    return DagInstance(4, 0, 3, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
}

}  // namespace nepfw
