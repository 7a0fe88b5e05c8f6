#include "netupd/topology.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace netupd {

std::size_t Topology::host_count() const {
  std::size_t n = 0;
  for (auto h : hosts) n += h;
  return n;
}

std::vector<std::vector<std::size_t>> Topology::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(size());
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  return adj;
}

bool Topology::connected() const {
  if (size() == 0) return true;
  auto adj = adjacency();
  std::vector<char> seen(size(), 0);
  std::vector<std::size_t> work{0};
  seen[0] = 1;
  std::size_t count = 0;
  while (!work.empty()) {
    auto v = work.back();
    work.pop_back();
    ++count;
    for (auto w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        work.push_back(w);
      }
  }
  return count == size();
}

void Topology::add_edge(std::size_t a, std::size_t b) {
  if (a == b) return;
  if (a > b) std::swap(a, b);
  auto e = std::make_pair(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) edges.insert(it, e);
}

Topology gen_fattree(unsigned k) {
  if (k < 2 || k % 2 != 0) throw TopologyError("fat-tree arity must be even and at least 2");
  const unsigned half = k / 2;
  Topology t;
  t.source = "fattree(" + std::to_string(k) + ")";
  std::vector<std::size_t> core, agg, edge;
  for (unsigned i = 0; i < half * half; ++i) {
    core.push_back(t.names.size());
    t.names.push_back("core" + std::to_string(i));
  }
  for (unsigned p = 0; p < k; ++p)
    for (unsigned i = 0; i < half; ++i) {
      agg.push_back(t.names.size());
      t.names.push_back("agg" + std::to_string(p) + "_" + std::to_string(i));
    }
  for (unsigned p = 0; p < k; ++p)
    for (unsigned i = 0; i < half; ++i) {
      edge.push_back(t.names.size());
      t.names.push_back("tor" + std::to_string(p) + "_" + std::to_string(i));
    }
  t.hosts.assign(t.names.size(), 0);
  for (auto e : edge) t.hosts[e] = half;
  for (unsigned p = 0; p < k; ++p)
    for (unsigned a = 0; a < half; ++a) {
      std::size_t ag = agg[p * half + a];
      for (unsigned c = 0; c < half; ++c) t.add_edge(ag, core[a * half + c]);
      for (unsigned e = 0; e < half; ++e) t.add_edge(ag, edge[p * half + e]);
    }
  return t;
}

Topology gen_smallworld(std::size_t n, std::size_t k, double p, std::uint64_t seed) {
  if (k < 2 || k % 2 != 0) throw TopologyError("small-world degree must be even and at least 2");
  if (n <= k) throw TopologyError("small-world needs more nodes than the degree");
  if (p < 0.0 || p > 1.0) throw TopologyError("rewiring probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<std::set<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 1; j <= k / 2; ++j) {
        std::size_t w = (i + j) % n;
        adj[i].insert(w);
        adj[w].insert(i);
      }
    for (std::size_t j = 1; j <= k / 2; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t w = (i + j) % n;
        if (!adj[i].count(w) || coin(rng) >= p) continue;
        if (adj[i].size() >= n - 1) continue;
        std::size_t x;
        do x = pick(rng);
        while (x == i || adj[i].count(x));
        adj[i].erase(w);
        adj[w].erase(i);
        adj[i].insert(x);
        adj[x].insert(i);
      }
    Topology t;
    t.source = "smallworld(" + std::to_string(n) + "," + std::to_string(k) + "," +
               std::to_string(p) + ")";
    for (std::size_t i = 0; i < n; ++i) t.names.push_back("n" + std::to_string(i));
    t.hosts.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (auto w : adj[i])
        if (i < w) t.edges.emplace_back(i, w);
    std::sort(t.edges.begin(), t.edges.end());
    if (t.connected()) return t;
  }
  throw TopologyError("could not generate a connected small-world graph");
}

namespace {

struct GmlToken {
  enum Kind { Key, Number, String, Open, Close } kind;
  std::string text;
  int line;
};

std::vector<GmlToken> gml_tokens(const std::string& s) {
  std::vector<GmlToken> out;
  int line = 1;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '[') {
      out.push_back({GmlToken::Open, "[", line});
      ++i;
    } else if (c == ']') {
      out.push_back({GmlToken::Close, "]", line});
      ++i;
    } else if (c == '"') {
      int start_line = line;
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '"') {
        if (s[j] == '\n') ++line;
        ++j;
      }
      if (j >= s.size())
        throw TopologyError("GML line " + std::to_string(start_line) + ": unterminated string");
      out.push_back({GmlToken::String, s.substr(i + 1, j - i - 1), start_line});
      i = j + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '.' ||
                              s[j] == '-' || s[j] == '+'))
        ++j;
      out.push_back({GmlToken::Number, s.substr(i, j - i), line});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({GmlToken::Key, s.substr(i, j - i), line});
      i = j;
    } else {
      throw TopologyError("GML line " + std::to_string(line) + ": unexpected character '" +
                          std::string(1, c) + "'");
    }
  }
  return out;
}

struct GmlNode {
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, GmlNode>> children;
  int line = 0;
};

GmlNode gml_block(const std::vector<GmlToken>& toks, std::size_t& pos, bool top) {
  GmlNode node;
  node.line = pos < toks.size() ? toks[pos].line : 0;
  while (pos < toks.size()) {
    const auto& t = toks[pos];
    if (t.kind == GmlToken::Close) {
      if (top) throw TopologyError("GML line " + std::to_string(t.line) + ": unmatched ']'");
      ++pos;
      return node;
    }
    if (t.kind != GmlToken::Key)
      throw TopologyError("GML line " + std::to_string(t.line) + ": expected a key, got '" +
                          t.text + "'");
    ++pos;
    if (pos >= toks.size())
      throw TopologyError("GML line " + std::to_string(t.line) + ": key '" + t.text +
                          "' has no value");
    const auto& v = toks[pos];
    if (v.kind == GmlToken::Open) {
      ++pos;
      auto child = gml_block(toks, pos, false);
      child.line = t.line;
      node.children.emplace_back(t.text, std::move(child));
    } else if (v.kind == GmlToken::Number || v.kind == GmlToken::String ||
               v.kind == GmlToken::Key) {
      node.values[t.text] = v.text;
      ++pos;
    } else {
      throw TopologyError("GML line " + std::to_string(v.line) + ": unexpected ']'");
    }
  }
  if (!top) throw TopologyError("GML: unterminated block");
  return node;
}

}  // namespace

GmlResult parse_gml(const std::string& text) {
  auto toks = gml_tokens(text);
  std::size_t pos = 0;
  auto root = gml_block(toks, pos, true);
  const GmlNode* graph = nullptr;
  for (const auto& [k, c] : root.children)
    if (k == "graph") graph = &c;
  if (!graph) throw TopologyError("GML: no graph block");

  GmlResult res;
  res.topo.source = "gml";
  std::map<std::string, std::size_t> index;
  std::vector<bool> flagged;
  for (const auto& [k, c] : graph->children) {
    if (k != "node") continue;
    auto it = c.values.find("id");
    if (it == c.values.end())
      throw TopologyError("GML line " + std::to_string(c.line) + ": node without id");
    if (index.count(it->second))
      throw TopologyError("GML line " + std::to_string(c.line) + ": duplicate node id " +
                          it->second);
    index[it->second] = res.topo.names.size();
    auto lab = c.values.find("label");
    res.topo.names.push_back(lab != c.values.end() ? lab->second : "node" + it->second);
    auto h = c.values.find("host");
    flagged.push_back(h != c.values.end() && h->second != "0");
  }
  for (const auto& [k, c] : graph->children) {
    if (k != "edge") continue;
    auto s = c.values.find("source");
    auto t = c.values.find("target");
    if (s == c.values.end() || t == c.values.end())
      throw TopologyError("GML line " + std::to_string(c.line) + ": edge needs source and target");
    if (!index.count(s->second) || !index.count(t->second))
      throw TopologyError("GML line " + std::to_string(c.line) + ": edge references unknown node");
    std::size_t a = index[s->second], b = index[t->second];
    if (a == b) {
      res.warnings.push_back("line " + std::to_string(c.line) + ": self-loop ignored");
      continue;
    }
    std::size_t before = res.topo.edges.size();
    res.topo.add_edge(a, b);
    if (res.topo.edges.size() == before)
      res.warnings.push_back("line " + std::to_string(c.line) + ": duplicate edge " + s->second +
                             "-" + t->second + " merged");
  }
  bool any_flag = std::any_of(flagged.begin(), flagged.end(), [](bool b) { return b; });
  auto adj = res.topo.adjacency();
  res.topo.hosts.assign(res.topo.size(), 0);
  for (std::size_t i = 0; i < res.topo.size(); ++i)
    res.topo.hosts[i] = any_flag ? (flagged[i] ? 1 : 0) : (adj[i].size() == 1 ? 1 : 0);
  return res;
}

Network to_network(const Topology& topo) {
  Network net;
  auto adj = topo.adjacency();
  std::vector<std::map<std::size_t, PortId>> port(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) {
    Switch s;
    s.id = static_cast<SwitchId>(i + 1);
    s.name = topo.names[i];
    net.switches.push_back(s);
    PortId p = 1;
    for (auto w : adj[i]) port[i][w] = p++;
  }
  for (auto [a, b] : topo.edges) {
    Location la = Location::at(static_cast<SwitchId>(a + 1), port[a][b]);
    Location lb = Location::at(static_cast<SwitchId>(b + 1), port[b][a]);
    net.links.push_back({la, lb, {}});
    net.links.push_back({lb, la, {}});
  }
  HostId h = 1;
  for (std::size_t i = 0; i < topo.size(); ++i) {
    PortId p = static_cast<PortId>(adj[i].size() + 1);
    for (std::uint32_t j = 0; j < (i < topo.hosts.size() ? topo.hosts[i] : 0); ++j, ++h, ++p) {
      net.hosts.push_back(h);
      Location lh = Location::host(h);
      Location ls = Location::at(static_cast<SwitchId>(i + 1), p);
      net.links.push_back({lh, ls, {}});
      net.links.push_back({ls, lh, {}});
    }
  }
  net.fields.names = {"dst"};
  net.fields.max_values = {static_cast<std::uint32_t>(net.hosts.size())};
  return net;
}

std::optional<PortId> port_toward(const Network& net, SwitchId from, SwitchId to) {
  for (const auto& l : net.links)
    if (!l.from.is_host() && !l.to.is_host() && l.from.id == from && l.to.id == to)
      return l.from.port;
  return std::nullopt;
}

std::optional<PortId> host_port(const Network& net, SwitchId sw, HostId h) {
  for (const auto& l : net.links)
    if (!l.from.is_host() && l.from.id == sw && l.to.is_host() && l.to.id == h)
      return l.from.port;
  return std::nullopt;
}

std::optional<SwitchId> host_switch(const Network& net, HostId h) {
  for (const auto& l : net.links)
    if (l.from.is_host() && l.from.id == h && !l.to.is_host()) return l.to.id;
  return std::nullopt;
}

std::vector<HostId> hosts_at(const Network& net, SwitchId sw) {
  std::vector<HostId> out;
  for (const auto& l : net.links)
    if (!l.from.is_host() && l.from.id == sw && l.to.is_host()) out.push_back(l.to.id);
  std::sort(out.begin(), out.end());
  return out;
}

void install_route(Network& net, const std::vector<SwitchId>& path, HostId dst,
                   std::uint32_t priority) {
  auto fi = net.fields.index_of("dst");
  if (!fi) throw NetworkError("network has no dst field");
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::optional<PortId> out =
        i + 1 < path.size() ? port_toward(net, path[i], path[i + 1]) : host_port(net, path[i], dst);
    if (!out)
      throw NetworkError("route step from switch " + std::to_string(path[i]) + " has no link");
    Switch* s = net.find_switch(path[i]);
    if (!s) throw NetworkError("unknown switch " + std::to_string(path[i]));
    Rule r;
    r.priority = priority;
    r.pattern.fields = {{*fi, dst}};
    r.actions = {Action::forward(*out)};
    std::vector<Rule> rules = s->table.rules();
    rules.push_back(r);
    s->table = Table(std::move(rules));
  }
}

void remove_route(Network& net, const std::vector<SwitchId>& switches, HostId dst) {
  auto fi = net.fields.index_of("dst");
  if (!fi) throw NetworkError("network has no dst field");
  for (SwitchId sw : switches) {
    Switch* s = net.find_switch(sw);
    if (!s) throw NetworkError("unknown switch " + std::to_string(sw));
    std::vector<Rule> keep;
    for (const auto& r : s->table.rules()) {
      bool hit = false;
      for (const auto& t : r.pattern.fields)
        if (t.field == *fi && t.value == dst) hit = true;
      if (!hit) keep.push_back(r);
    }
    s->table = Table(std::move(keep));
  }
}

}  // namespace netupd
