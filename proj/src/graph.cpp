#include "stkr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "stkr/rng.hpp"

namespace stkr {

std::string to_string(Mode mode) {
  return mode == Mode::transductive ? "transductive" : "inductive";
}

Mode mode_from_string(const std::string& s) {
  if (s == "transductive" || s == "t") return Mode::transductive;
  if (s == "inductive" || s == "i") return Mode::inductive;
  throw ValidationError("unknown mode: " + s);
}

namespace {

// Parses rows of two integers; '#' starts a comment, blank lines are skipped.
std::vector<std::pair<std::int64_t, std::int64_t>> parse_pair_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::vector<std::pair<std::int64_t, std::int64_t>> rows;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::int64_t a, b;
    if (!(ss >> a)) {
      std::string rest;
      if (ss.clear(), ss >> rest) throw ParseError("expected integer in " + path, lineno);
      continue;  // blank line
    }
    if (!(ss >> b)) throw ParseError("expected two integers in " + path, lineno);
    std::string trailing;
    if (ss >> trailing) throw ParseError("trailing tokens in " + path, lineno);
    if (a < 0 || b < 0) throw ParseError("negative id in " + path, lineno);
    rows.emplace_back(a, b);
  }
  return rows;
}

}  // namespace

GraphDataset make_dataset(std::int64_t num_nodes,
                          const std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
                          const std::vector<std::int32_t>& labels) {
  if (static_cast<std::int64_t>(labels.size()) != num_nodes)
    throw ValidationError("every node must carry a label");
  GraphDataset ds;
  ds.num_nodes = num_nodes;
  ds.labels = labels;
  int max_class = -1;
  for (std::int64_t i = 0; i < num_nodes; ++i) {
    if (labels[i] < 0) throw ValidationError("negative class id for node " + std::to_string(i));
    max_class = std::max(max_class, static_cast<int>(labels[i]));
  }
  ds.num_classes = max_class + 1;

  std::set<std::pair<std::int32_t, std::int32_t>> dedup;
  for (auto [a, b] : edges) {
    if (a == b) throw ValidationError("self-loop at node " + std::to_string(a));
    if (a >= num_nodes || b >= num_nodes || a < 0 || b < 0)
      throw ValidationError("edge endpoint out of range: (" + std::to_string(a) + ", " +
                            std::to_string(b) + ") with " + std::to_string(num_nodes) + " nodes");
    if (a > b) std::swap(a, b);
    dedup.emplace(a, b);
  }
  ds.edges.assign(dedup.begin(), dedup.end());
  return ds;
}

GraphDataset load_dataset(const std::string& edge_path, const std::string& label_path) {
  const auto edge_rows = parse_pair_file(edge_path);
  const auto label_rows = parse_pair_file(label_path);

  std::int64_t num_nodes = 0;
  for (const auto& [node, cls] : label_rows) num_nodes = std::max(num_nodes, node + 1);
  std::vector<std::int32_t> labels(num_nodes, -1);
  for (const auto& [node, cls] : label_rows) {
    if (labels[node] >= 0 && labels[node] != cls)
      throw ValidationError("conflicting labels for node " + std::to_string(node));
    labels[node] = static_cast<std::int32_t>(cls);
  }
  for (std::int64_t i = 0; i < num_nodes; ++i)
    if (labels[i] < 0) throw ValidationError("missing label for node " + std::to_string(i));

  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  edges.reserve(edge_rows.size());
  for (const auto& [a, b] : edge_rows)
    edges.emplace_back(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
  return make_dataset(num_nodes, edges, labels);
}

std::pair<std::int64_t, std::int64_t> default_split_sizes(const GraphDataset& ds) {
  // Planetoid citation graphs keep their conventional train/val sizes;
  // everything else uses 20 samples per class for both sets.
  if (ds.num_nodes == 2708 && ds.num_classes == 7) return {140, 500};    // Cora
  if (ds.num_nodes == 3327 && ds.num_classes == 6) return {120, 500};    // CiteSeer
  if (ds.num_nodes == 19717 && ds.num_classes == 3) return {60, 500};    // PubMed
  const std::int64_t s = 20LL * ds.num_classes;
  return {s, s};
}

SplitSpec make_split(const GraphDataset& ds, std::uint64_t seed, double p_test,
                     std::int64_t train_size, std::int64_t val_size, Mode mode) {
  if (p_test <= 0.0 || p_test > 0.5) throw ValidationError("p_test must be in (0, 0.5]");
  const std::int64_t N = ds.num_nodes;
  const auto test_size = static_cast<std::int64_t>(std::llround(p_test * static_cast<double>(N)));
  if (train_size < 0 || val_size < 0) throw ValidationError("split sizes must be nonnegative");
  if (train_size + val_size + test_size > N)
    throw ValidationError("train + val + test sizes exceed node count");

  Rng rng(seed);
  const auto perm = rng.permutation(N);

  SplitSpec split;
  split.seed = seed;
  split.mode = mode;
  split.p_test = p_test;
  std::int64_t pos = 0;
  auto take = [&](std::int64_t count) {
    std::vector<std::int32_t> ids(perm.begin() + pos, perm.begin() + pos + count);
    pos += count;
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  split.test_ids = take(test_size);
  split.train_ids = take(train_size);
  split.val_ids = take(val_size);
  split.other_ids = take(N - pos);
  return split;
}

VisibleGraph mask_visible(const GraphDataset& ds, const SplitSpec& split, bool hide_val) {
  const bool inductive = split.mode == Mode::inductive;
  std::vector<char> hidden(ds.num_nodes, 0);
  if (inductive) {
    for (auto id : split.test_ids) hidden[id] = 1;
    if (hide_val)
      for (auto id : split.val_ids) hidden[id] = 1;
  }

  VisibleGraph vg;
  vg.position_of.assign(ds.num_nodes, -1);
  vg.n = static_cast<std::int64_t>(split.train_ids.size());
  for (auto id : split.train_ids) {
    vg.visible_ids.push_back(id);
  }
  for (std::int32_t id = 0; id < ds.num_nodes; ++id) {
    if (hidden[id]) continue;
    const bool is_train = std::binary_search(split.train_ids.begin(), split.train_ids.end(), id);
    if (!is_train) vg.visible_ids.push_back(id);
  }
  vg.m = static_cast<std::int64_t>(vg.visible_ids.size()) - vg.n;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(vg.visible_ids.size()); ++i)
    vg.position_of[vg.visible_ids[i]] = i;

  const std::int64_t size = vg.n + vg.m;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(ds.edges.size() * 2);
  for (const auto& [a, b] : ds.edges) {
    const auto pa = vg.position_of[a];
    const auto pb = vg.position_of[b];
    if (pa < 0 || pb < 0) continue;
    trips.emplace_back(static_cast<int>(pa), static_cast<int>(pb), 1.0);
    trips.emplace_back(static_cast<int>(pb), static_cast<int>(pa), 1.0);
  }
  vg.adjacency.resize(size, size);
  vg.adjacency.setFromTriplets(trips.begin(), trips.end());
  vg.degree = vg.adjacency * Eigen::VectorXd::Ones(size);
  return vg;
}

std::string serialize_split(const SplitSpec& split) {
  std::ostringstream out;
  out << "seed = " << split.seed << "\n";
  out << "mode = " << to_string(split.mode) << "\n";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", split.p_test);
  out << "p_test = " << buf << "\n";
  auto emit = [&](const char* key, const std::vector<std::int32_t>& ids) {
    out << key << " =";
    for (auto id : ids) out << ' ' << id;
    out << "\n";
  };
  emit("train_ids", split.train_ids);
  emit("val_ids", split.val_ids);
  emit("test_ids", split.test_ids);
  emit("other_ids", split.other_ids);
  return out.str();
}

SplitSpec deserialize_split(const std::string& text) {
  SplitSpec split;
  std::istringstream in(text);
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    std::istringstream val(line.substr(eq + 1));
    if (key == "seed") {
      val >> split.seed;
    } else if (key == "mode") {
      std::string s;
      val >> s;
      split.mode = mode_from_string(s);
    } else if (key == "p_test") {
      val >> split.p_test;
    } else {
      std::vector<std::int32_t>* ids = nullptr;
      if (key == "train_ids") ids = &split.train_ids;
      else if (key == "val_ids") ids = &split.val_ids;
      else if (key == "test_ids") ids = &split.test_ids;
      else if (key == "other_ids") ids = &split.other_ids;
      else throw ParseError("unknown key: " + key, lineno);
      std::int32_t id;
      while (val >> id) ids->push_back(id);
    }
  }
  return split;
}

void save_split(const SplitSpec& split, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << serialize_split(split);
}

SplitSpec load_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_split(ss.str());
}

}  // namespace stkr
