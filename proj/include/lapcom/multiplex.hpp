#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lapcom/common.hpp"
#include "lapcom/linalg.hpp"

namespace lapcom {

enum class EdgeFamily { bernoulli_logit, poisson_log };

inline std::string family_name(EdgeFamily f) {
  return f == EdgeFamily::bernoulli_logit ? "binary" : "count";
}

inline EdgeFamily family_from_name(const std::string& s) {
  if (s == "binary") return EdgeFamily::bernoulli_logit;
  if (s == "count") return EdgeFamily::poisson_log;
  throw std::invalid_argument("unknown edge family: " + s);
}

/// One network layer: a square adjacency matrix of non-negative counts
/// (or 0/1 under the binary family) with zero diagonal; symmetric when
/// undirected. Immutable after validate().
struct Network {
  int n_nodes = 0;
  bool directed = false;
  EdgeFamily family = EdgeFamily::poisson_log;
  std::vector<long> weights;  // row-major n_nodes x n_nodes

  long at(int i, int j) const { return weights[static_cast<std::size_t>(i) * n_nodes + j]; }
  long& at(int i, int j) { return weights[static_cast<std::size_t>(i) * n_nodes + j]; }

  void validate() const {
    require(n_nodes > 0, "network: n_nodes must be positive");
    require(weights.size() == static_cast<std::size_t>(n_nodes) * n_nodes,
            "network: weight matrix shape mismatch");
    for (int i = 0; i < n_nodes; ++i) {
      require(at(i, i) == 0, "network: self-loop entry at node " + std::to_string(i + 1));
      for (int j = 0; j < n_nodes; ++j) {
        require(at(i, j) >= 0, "network: negative weight");
        if (!directed) require(at(i, j) == at(j, i), "network: asymmetric undirected matrix");
        if (family == EdgeFamily::bernoulli_logit)
          require(at(i, j) <= 1, "network: non-binary entry under binary family");
      }
    }
  }

  double density() const {
    long edges = 0, dyads = 0;
    for (int i = 0; i < n_nodes; ++i)
      for (int j = directed ? 0 : i + 1; j < n_nodes; ++j) {
        if (i == j) continue;
        ++dyads;
        if (at(i, j) > 0) ++edges;
      }
    return dyads == 0 ? 0.0 : static_cast<double>(edges) / static_cast<double>(dyads);
  }
};

/// Ordered collection of layers sharing node set, directedness and family.
struct Multiplex {
  std::vector<Network> networks;
  std::vector<std::string> labels;

  int n_networks() const { return static_cast<int>(networks.size()); }
  int n_nodes() const { return networks.empty() ? 0 : networks.front().n_nodes; }
  bool directed() const { return !networks.empty() && networks.front().directed; }
  EdgeFamily family() const {
    return networks.empty() ? EdgeFamily::poisson_log : networks.front().family;
  }

  void validate() const {
    require(!networks.empty(), "multiplex: needs at least one network");
    require(labels.size() == networks.size(), "multiplex: one label per network");
    for (const Network& net : networks) {
      net.validate();
      require(net.n_nodes == n_nodes(), "multiplex: layers must share the node set");
      require(net.directed == directed(), "multiplex: layers must share directedness");
      require(net.family == family(), "multiplex: layers must share the edge family");
    }
  }
};

/// Dyad index pairs entering the likelihood exactly once: ordered pairs for
/// directed networks, i < j otherwise.
inline std::vector<std::pair<int, int>> dyad_pairs(int n_nodes, bool directed) {
  std::vector<std::pair<int, int>> out;
  if (directed) {
    out.reserve(static_cast<std::size_t>(n_nodes) * (n_nodes - 1));
    for (int i = 0; i < n_nodes; ++i)
      for (int j = 0; j < n_nodes; ++j)
        if (i != j) out.emplace_back(i, j);
  } else {
    out.reserve(static_cast<std::size_t>(n_nodes) * (n_nodes - 1) / 2);
    for (int i = 0; i < n_nodes; ++i)
      for (int j = i + 1; j < n_nodes; ++j) out.emplace_back(i, j);
  }
  return out;
}

inline std::vector<std::pair<int, int>> dyad_pairs(const Network& net) {
  return dyad_pairs(net.n_nodes, net.directed);
}

/// Hop-count shortest paths on the binarized graph (edge iff weight > 0).
/// Pairs in different components get max finite distance + 1, which keeps
/// downstream MDS input finite.
inline Matrix geodesic_distance_matrix(const Network& net) {
  const int n = net.n_nodes;
  Matrix dist(n, n, -1.0);
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && net.at(i, j) > 0) adj[i].push_back(j);

  double max_finite = 0.0;
  for (int s = 0; s < n; ++s) {
    std::vector<int> hops(n, -1);
    std::deque<int> frontier{s};
    hops[s] = 0;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop_front();
      for (int v : adj[u])
        if (hops[v] < 0) {
          hops[v] = hops[u] + 1;
          frontier.push_back(v);
        }
    }
    for (int j = 0; j < n; ++j) {
      dist(s, j) = static_cast<double>(hops[j]);
      if (hops[j] > max_finite) max_finite = hops[j];
    }
  }
  const double unreachable = max_finite + 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (dist(i, j) < 0.0) dist(i, j) = unreachable;
  return dist;
}

// ---------------------------------------------------------------------------
// File formats.
//
// A multiplex on disk is a directory with a manifest `multiplex.json`
// recording N, M, directedness, family and labels, plus either a single
// edge-list CSV (header `layer,i,j,w`, 1-based indices) or one adjacency
// CSV per layer named `<label>.csv`.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  return out;
}

inline long parse_weight(const std::string& s) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("parse error: non-integer weight '" + s + "'");
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw std::runtime_error("parse error: non-integer weight '" + s + "'");
  if (v < 0) throw std::runtime_error("parse error: negative weight '" + s + "'");
  return v;
}

inline EdgeFamily infer_family(const std::vector<Network>& nets) {
  for (const Network& n : nets)
    for (long w : n.weights)
      if (w > 1) return EdgeFamily::poisson_log;
  return EdgeFamily::bernoulli_logit;
}

}  // namespace detail

/// Reads `layer,i,j,w` rows into M networks of N nodes each. Undirected
/// edges are mirrored; duplicate rows for the same dyad must agree.
inline std::vector<Network> read_edge_list(const std::filesystem::path& file, int n_nodes,
                                           int n_networks, bool directed) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open edge list: " + file.string());
  std::vector<Network> nets(n_networks);
  for (Network& n : nets) {
    n.n_nodes = n_nodes;
    n.directed = directed;
    n.weights.assign(static_cast<std::size_t>(n_nodes) * n_nodes, 0);
  }
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (first) {
      first = false;
      if (line.rfind("layer", 0) == 0) continue;  // header
    }
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 4) throw std::runtime_error("parse error: expected layer,i,j,w row");
    const long layer = detail::parse_weight(fields[0]);
    const long i = detail::parse_weight(fields[1]);
    const long j = detail::parse_weight(fields[2]);
    const long w = detail::parse_weight(fields[3]);
    if (layer < 1 || layer > n_networks) throw std::runtime_error("parse error: layer out of range");
    if (i < 1 || i > n_nodes || j < 1 || j > n_nodes)
      throw std::runtime_error("parse error: node index out of range");
    if (i == j) throw std::invalid_argument("validation error: self-loop edge in input");
    Network& net = nets[layer - 1];
    net.at(static_cast<int>(i - 1), static_cast<int>(j - 1)) = w;
    if (!directed) net.at(static_cast<int>(j - 1), static_cast<int>(i - 1)) = w;
  }
  return nets;
}

/// Reads one adjacency matrix; `stacked` files separate layers by blank lines.
inline std::vector<Network> read_adjacency_csv(const std::filesystem::path& file, int n_nodes,
                                               bool directed) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open adjacency file: " + file.string());
  std::vector<Network> nets;
  std::vector<long> rows;
  std::string line;
  auto flush_block = [&]() {
    if (rows.empty()) return;
    if (rows.size() != static_cast<std::size_t>(n_nodes) * n_nodes)
      throw std::runtime_error("parse error: adjacency block is not " + std::to_string(n_nodes) +
                               "x" + std::to_string(n_nodes));
    Network net;
    net.n_nodes = n_nodes;
    net.directed = directed;
    net.weights = std::move(rows);
    rows.clear();
    nets.push_back(std::move(net));
  };
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) {
      flush_block();
      continue;
    }
    for (const std::string& f : detail::split_csv_line(line)) rows.push_back(detail::parse_weight(f));
  }
  flush_block();
  return nets;
}

inline Multiplex load_multiplex(const std::filesystem::path& dir) {
  const auto manifest_path = std::filesystem::is_directory(dir) ? dir / "multiplex.json" : dir;
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open multiplex manifest: " + manifest_path.string());
  nlohmann::json manifest = nlohmann::json::parse(in);
  const auto base = manifest_path.parent_path();

  const int n_nodes = manifest.at("n_nodes").get<int>();
  const int n_networks = manifest.at("n_networks").get<int>();
  const bool directed = manifest.at("directed").get<bool>();
  std::vector<std::string> labels = manifest.at("labels").get<std::vector<std::string>>();
  require(static_cast<int>(labels.size()) == n_networks, "manifest: one label per network");
  const std::string format = manifest.at("format").get<std::string>();

  Multiplex mx;
  mx.labels = labels;
  if (format == "edge-list") {
    mx.networks = read_edge_list(base / manifest.at("edge_file").get<std::string>(), n_nodes,
                                 n_networks, directed);
  } else if (format == "adjacency-csv") {
    if (manifest.contains("stacked_file")) {
      mx.networks =
          read_adjacency_csv(base / manifest.at("stacked_file").get<std::string>(), n_nodes, directed);
      require(static_cast<int>(mx.networks.size()) == n_networks,
              "manifest: stacked file layer count mismatch");
    } else {
      for (const std::string& label : labels) {
        auto nets = read_adjacency_csv(base / (label + ".csv"), n_nodes, directed);
        require(nets.size() == 1, "adjacency file must hold exactly one matrix: " + label);
        mx.networks.push_back(std::move(nets.front()));
      }
    }
  } else {
    throw std::invalid_argument("unknown multiplex format: " + format);
  }

  const EdgeFamily inferred = detail::infer_family(mx.networks);
  EdgeFamily family = inferred;
  if (manifest.contains("family")) {
    family = family_from_name(manifest.at("family").get<std::string>());
    require(!(family == EdgeFamily::bernoulli_logit && inferred == EdgeFamily::poisson_log),
            "manifest: binary family declared but count weights present");
  }
  for (Network& n : mx.networks) n.family = family;
  mx.validate();
  return mx;
}

inline void save_multiplex(const Multiplex& mx, const std::filesystem::path& dir,
                           const std::string& format = "adjacency-csv") {
  mx.validate();
  std::filesystem::create_directories(dir);
  nlohmann::json manifest{{"n_nodes", mx.n_nodes()},
                          {"n_networks", mx.n_networks()},
                          {"directed", mx.directed()},
                          {"family", family_name(mx.family())},
                          {"labels", mx.labels},
                          {"format", format}};
  if (format == "adjacency-csv") {
    for (int m = 0; m < mx.n_networks(); ++m) {
      std::ofstream out(dir / (mx.labels[m] + ".csv"));
      const Network& net = mx.networks[m];
      for (int i = 0; i < net.n_nodes; ++i) {
        for (int j = 0; j < net.n_nodes; ++j) {
          if (j > 0) out << ',';
          out << net.at(i, j);
        }
        out << '\n';
      }
    }
  } else if (format == "edge-list") {
    manifest["edge_file"] = "edges.csv";
    std::ofstream out(dir / "edges.csv");
    out << "layer,i,j,w\n";
    for (int m = 0; m < mx.n_networks(); ++m) {
      const Network& net = mx.networks[m];
      for (int i = 0; i < net.n_nodes; ++i)
        for (int j = net.directed ? 0 : i + 1; j < net.n_nodes; ++j)
          if (i != j && net.at(i, j) != 0)
            out << (m + 1) << ',' << (i + 1) << ',' << (j + 1) << ',' << net.at(i, j) << '\n';
    }
  } else {
    throw std::invalid_argument("unknown multiplex format: " + format);
  }
  std::ofstream mout(dir / "multiplex.json");
  mout << manifest.dump(2) << '\n';
}

}  // namespace lapcom
