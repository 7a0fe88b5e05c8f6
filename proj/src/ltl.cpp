#include "netupd/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

namespace netupd::ltl {

std::string Atom::to_string() const {
  switch (kind) {
    case Kind::Switch:
      return "sw=" + std::to_string(sw);
    case Kind::Port:
      return "port=s" + std::to_string(sw) + ":p" + std::to_string(port);
    case Kind::Field:
      return "field " + field + "=" + std::to_string(value);
    case Kind::Dropped:
      return "drop";
    case Kind::Prop:
      return "prop=" + std::to_string(value);
  }
  return "?";
}

namespace {

std::string make_key(Op op, const Atom& a, const FormulaPtr& l, const FormulaPtr& r) {
  switch (op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return a.to_string();
    case Op::NegAtom: return "!" + a.to_string();
    case Op::And: return "(" + l->key() + " & " + r->key() + ")";
    case Op::Or: return "(" + l->key() + " | " + r->key() + ")";
    case Op::Next: return "X " + l->key();
    case Op::Until: return "(" + l->key() + " U " + r->key() + ")";
    case Op::Release: return "(" + l->key() + " R " + r->key() + ")";
  }
  return "?";
}

FormulaPtr make(Op op, Atom a = {}, FormulaPtr l = nullptr, FormulaPtr r = nullptr) {
  return std::make_shared<const Formula>(op, std::move(a), std::move(l), std::move(r));
}

}  // namespace

Formula::Formula(Op op, Atom atom, FormulaPtr lhs, FormulaPtr rhs)
    : op_(op), atom_(std::move(atom)), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {
  key_ = make_key(op_, atom_, lhs_, rhs_);
}

FormulaPtr tt() {
  static const FormulaPtr t = make(Op::True);
  return t;
}
FormulaPtr ff() {
  static const FormulaPtr f = make(Op::False);
  return f;
}
FormulaPtr atom(Atom a) { return make(Op::Atom, std::move(a)); }
FormulaPtr neg_atom(Atom a) { return make(Op::NegAtom, std::move(a)); }
FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return make(Op::And, {}, std::move(a), std::move(b)); }
FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return make(Op::Or, {}, std::move(a), std::move(b)); }
FormulaPtr next(FormulaPtr a) { return make(Op::Next, {}, std::move(a)); }
FormulaPtr until(FormulaPtr a, FormulaPtr b) { return make(Op::Until, {}, std::move(a), std::move(b)); }
FormulaPtr release(FormulaPtr a, FormulaPtr b) {
  return make(Op::Release, {}, std::move(a), std::move(b));
}
FormulaPtr eventually(FormulaPtr a) { return until(tt(), std::move(a)); }
FormulaPtr globally(FormulaPtr a) { return release(ff(), std::move(a)); }
FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return disj(negate(a), std::move(b)); }

FormulaPtr negate(const FormulaPtr& f) {
  switch (f->op()) {
    case Op::True: return ff();
    case Op::False: return tt();
    case Op::Atom: return neg_atom(f->atom());
    case Op::NegAtom: return atom(f->atom());
    case Op::And: return disj(negate(f->lhs()), negate(f->rhs()));
    case Op::Or: return conj(negate(f->lhs()), negate(f->rhs()));
    case Op::Next: return next(negate(f->arg()));
    case Op::Until: return release(negate(f->lhs()), negate(f->rhs()));
    case Op::Release: return until(negate(f->lhs()), negate(f->rhs()));
  }
  throw LtlError("bad formula");
}

FormulaPtr conj_all(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return tt();
  FormulaPtr acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = conj(fs[i], acc);
  return acc;
}

FormulaPtr disj_all(const std::vector<FormulaPtr>& fs) {
  if (fs.empty()) return ff();
  FormulaPtr acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = disj(fs[i], acc);
  return acc;
}

bool same(const FormulaPtr& a, const FormulaPtr& b) { return a->key() == b->key(); }
std::string to_string(const FormulaPtr& f) { return f->key(); }

std::size_t formula_size(const FormulaPtr& f) {
  if (!f) return 0;
  return 1 + formula_size(f->lhs()) + formula_size(f->rhs());
}

std::vector<Atom> atoms_of(const FormulaPtr& f) {
  std::set<Atom> out;
  std::function<void(const FormulaPtr&)> rec = [&](const FormulaPtr& g) {
    if (!g) return;
    if (g->op() == Op::Atom || g->op() == Op::NegAtom) out.insert(g->atom());
    rec(g->lhs());
    rec(g->rhs());
  };
  rec(f);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  Parser(const std::string& text, const Network* net) : s_(text), net_(net) {}

  FormulaPtr parse_all() {
    auto f = parse_implies();
    skip();
    if (pos_ != s_.size()) error("unexpected input");
    return f;
  }

 private:
  [[noreturn]] void error(const std::string& msg) {
    throw LtlError("LTL parse error at column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(const std::string& tok) {
    skip();
    if (s_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  // Keyword followed by a non-identifier character.
  bool eat_word(const std::string& w) {
    skip();
    if (s_.compare(pos_, w.size(), w) != 0) return false;
    std::size_t e = pos_ + w.size();
    if (e < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[e])) || s_[e] == '_'))
      return false;
    pos_ = e;
    return true;
  }
  std::uint32_t number() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) error("expected number");
    return static_cast<std::uint32_t>(std::stoul(s_.substr(start, pos_ - start)));
  }
  std::string ident() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_) error("expected identifier");
    return s_.substr(start, pos_ - start);
  }

  FormulaPtr parse_implies() {
    auto lhs = parse_or();
    if (eat("->")) return implies(lhs, parse_implies());
    return lhs;
  }
  FormulaPtr parse_or() {
    auto lhs = parse_and();
    while (eat("|")) lhs = disj(lhs, parse_and());
    return lhs;
  }
  FormulaPtr parse_and() {
    auto lhs = parse_binary_temporal();
    while (eat("&")) lhs = conj(lhs, parse_binary_temporal());
    return lhs;
  }
  FormulaPtr parse_binary_temporal() {
    auto lhs = parse_unary();
    if (eat_word("U")) return until(lhs, parse_binary_temporal());
    if (eat_word("R")) return release(lhs, parse_binary_temporal());
    return lhs;
  }
  FormulaPtr parse_unary() {
    if (eat("!")) return negate(parse_unary());
    if (eat_word("X")) return next(parse_unary());
    if (eat_word("F")) return eventually(parse_unary());
    if (eat_word("G")) return globally(parse_unary());
    if (eat("(")) {
      auto f = parse_implies();
      if (!eat(")")) error("expected ')'");
      return f;
    }
    return parse_atom();
  }
  FormulaPtr parse_atom() {
    if (eat_word("true")) return tt();
    if (eat_word("false")) return ff();
    if (eat_word("drop")) return atom(Atom::dropped());
    if (eat_word("prop")) {
      if (!eat("=")) error("expected '='");
      auto idx = number();
      if (idx >= 64) error("prop index must be below 64");
      return atom(Atom::prop(idx));
    }
    if (eat_word("sw")) {
      if (!eat("=")) error("expected '='");
      return atom(Atom::at_switch(number()));
    }
    if (eat_word("port")) {
      if (!eat("=")) error("expected '='");
      skip();
      if (eat("s")) {
        auto sw = number();
        if (!eat(":p")) error("expected ':p'");
        return atom(Atom::at_port(sw, number()));
      }
      auto id = number();
      if (!net_) error("numeric port id needs a network");
      auto ports = net_->global_ports();
      if (id >= ports.size()) error("port id out of range");
      return atom(Atom::at_port(ports[id].first, ports[id].second));
    }
    if (eat_word("field")) {
      auto name = ident();
      if (!eat("=")) error("expected '='");
      return atom(Atom::field_eq(name, number()));
    }
    error("expected formula");
  }

  const std::string& s_;
  const Network* net_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse(const std::string& text, const Network* net) {
  return Parser(text, net).parse_all();
}

// ---------------------------------------------------------------- closure

namespace {

bool is_canonical_side(const FormulaPtr& f, const FormulaPtr& neg) {
  switch (f->op()) {
    case Op::True: case Op::Atom: case Op::And: case Op::Until: return true;
    case Op::False: case Op::NegAtom: case Op::Or: case Op::Release: return false;
    case Op::Next: return f->key() < neg->key();
  }
  return true;
}

}  // namespace

ExtendedClosure::ExtendedClosure(const FormulaPtr& phi) : root_(phi) {
  intern(tt());
  intern(phi);
}

int ExtendedClosure::intern(const FormulaPtr& f) {
  if (auto hit = find(f)) return hit->first;
  FormulaPtr n = negate(f);
  FormulaPtr pos = is_canonical_side(f, n) ? f : n;
  FormulaPtr neg = is_canonical_side(f, n) ? n : f;
  Pair p{pos, neg};
  switch (pos->op()) {
    case Op::And:
    case Op::Until: {
      int l = intern(pos->lhs());
      int r = intern(pos->rhs());
      p.lhs = l;
      p.rhs = r;
      p.lhs_pol = find(pos->lhs())->second;
      p.rhs_pol = find(pos->rhs())->second;
      break;
    }
    case Op::Next: {
      p.lhs = intern(pos->arg());
      p.lhs_pol = find(pos->arg())->second;
      break;
    }
    default:
      break;
  }
  int id = static_cast<int>(pairs_.size());
  pairs_.push_back(p);
  auto ins = [&](const std::string& k, bool pol) {
    auto it = std::lower_bound(index_.begin(), index_.end(), k,
                               [](const auto& e, const std::string& key) { return e.first < key; });
    index_.insert(it, {k, {id, pol}});
  };
  ins(pos->key(), true);
  if (neg->key() != pos->key()) ins(neg->key(), false);
  return id;
}

std::optional<std::pair<int, bool>> ExtendedClosure::find(const FormulaPtr& f) const {
  auto it = std::lower_bound(index_.begin(), index_.end(), f->key(),
                             [](const auto& e, const std::string& key) { return e.first < key; });
  if (it == index_.end() || it->first != f->key()) return std::nullopt;
  return it->second;
}

bool ExtendedClosure::contains(Mcs m, const FormulaPtr& f) const {
  auto hit = find(f);
  if (!hit) throw LtlError("formula not in closure: " + f->key());
  return member(m, hit->first, hit->second);
}

std::vector<FormulaPtr> ExtendedClosure::formulas() const {
  std::vector<FormulaPtr> out;
  for (const auto& p : pairs_) {
    out.push_back(p.pos);
    out.push_back(p.neg);
  }
  return out;
}

std::vector<int> ExtendedClosure::free_pairs() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(pairs_.size()); ++i) {
    Op op = pairs_[i].pos->op();
    if (op == Op::Atom || op == Op::Next || op == Op::Until) out.push_back(i);
  }
  return out;
}

std::vector<int> ExtendedClosure::atom_pairs() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(pairs_.size()); ++i)
    if (pairs_[i].pos->op() == Op::Atom) out.push_back(i);
  return out;
}

std::vector<int> ExtendedClosure::temporal_pairs() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(pairs_.size()); ++i) {
    Op op = pairs_[i].pos->op();
    if (op == Op::Next || op == Op::Until) out.push_back(i);
  }
  return out;
}

ExtendedClosure ecl(const FormulaPtr& phi) { return ExtendedClosure(phi); }

std::vector<Mcs> max_consistent_sets(const ExtendedClosure& c) {
  const auto& pairs = c.pairs();
  if (pairs.size() > 64) throw LtlError("closure too large (more than 64 formula pairs)");
  auto free = c.free_pairs();
  if (free.size() > 24) throw LtlError("closure has too many independent formulas");
  std::vector<Mcs> out;
  out.reserve(std::size_t{1} << free.size());
  for (std::uint64_t choice = 0; choice < (std::uint64_t{1} << free.size()); ++choice) {
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < free.size(); ++j)
      if ((choice >> j) & 1u) bits |= std::uint64_t{1} << free[j];
    // Pairs are stored operands-first, so derived bits can be filled in order.
    bool consistent = true;
    for (std::size_t i = 0; i < pairs.size() && consistent; ++i) {
      const auto& p = pairs[i];
      Mcs m{bits};
      if (p.pos->op() == Op::True) {
        bits |= std::uint64_t{1} << i;
      } else if (p.pos->op() == Op::And) {
        if (c.member(m, p.lhs, p.lhs_pol) && c.member(m, p.rhs, p.rhs_pol))
          bits |= std::uint64_t{1} << i;
      } else if (p.pos->op() == Op::Until) {
        bool in = ((bits >> i) & 1u) != 0;
        bool lhs = c.member(m, p.lhs, p.lhs_pol), rhs = c.member(m, p.rhs, p.rhs_pol);
        if ((rhs && !in) || (in && !lhs && !rhs)) consistent = false;
      }
    }
    if (consistent) out.push_back(Mcs{bits});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool follows(const ExtendedClosure& c, Mcs m1, Mcs m2) {
  const auto& pairs = c.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    bool in1 = ((m1.bits >> i) & 1u) != 0;
    if (p.pos->op() == Op::Next) {
      if (in1 != c.member(m2, p.lhs, p.lhs_pol)) return false;
    } else if (p.pos->op() == Op::Until) {
      bool in2 = ((m2.bits >> i) & 1u) != 0;
      bool rhs = c.member(m1, p.rhs, p.rhs_pol);
      bool lhs = c.member(m1, p.lhs, p.lhs_pol);
      // The release member of the pair obeys the dual condition, which is
      // exactly the negation of this one.
      if (in1 != (rhs || (lhs && in2))) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- semantics

bool eval_atom(const Atom& a, const Position& p, const std::vector<TrafficClass>& classes,
               const FieldSchema& fields) {
  switch (a.kind) {
    case Atom::Kind::Switch:
      return p.sw == a.sw;
    case Atom::Kind::Port:
      return p.sw == a.sw && p.port == a.port;
    case Atom::Kind::Dropped:
      return p.dropped;
    case Atom::Kind::Prop:
      return ((p.props >> a.value) & 1u) != 0;
    case Atom::Kind::Field: {
      auto idx = fields.index_of(a.field);
      if (!idx) throw LtlError("unknown field '" + a.field + "'");
      if (p.cls >= classes.size()) throw LtlError("position has no traffic class");
      auto v = classes[p.cls].fixed_value(*idx);
      if (!v)
        throw LtlError("traffic class " + classes[p.cls].name + " cannot decide " + a.to_string());
      return *v == a.value;
    }
  }
  return false;
}

void check_decidable(const FormulaPtr& phi, const std::vector<TrafficClass>& classes,
                     const FieldSchema& fields) {
  for (const auto& a : atoms_of(phi)) {
    if (a.kind != Atom::Kind::Field) continue;
    auto idx = fields.index_of(a.field);
    if (!idx) throw LtlError("unknown field '" + a.field + "'");
    for (const auto& c : classes)
      if (!c.fixed_value(*idx))
        throw LtlError("traffic class " + c.name + " cannot decide " + a.to_string());
  }
}

bool eval_finite(const std::vector<Position>& trace, const FormulaPtr& phi,
                 const std::vector<TrafficClass>& classes, const FieldSchema& fields) {
  if (trace.empty()) throw LtlError("eval_finite on an empty trace");
  const std::size_t n = trace.size();
  std::map<const Formula*, std::vector<char>> memo;
  std::function<const std::vector<char>&(const FormulaPtr&)> val =
      [&](const FormulaPtr& f) -> const std::vector<char>& {
    auto it = memo.find(f.get());
    if (it != memo.end()) return it->second;
    std::vector<char> v(n, 0);
    switch (f->op()) {
      case Op::True: std::fill(v.begin(), v.end(), 1); break;
      case Op::False: break;
      case Op::Atom:
      case Op::NegAtom:
        for (std::size_t i = 0; i < n; ++i) {
          bool t = eval_atom(f->atom(), trace[i], classes, fields);
          v[i] = (f->op() == Op::Atom) == t;
        }
        break;
      case Op::And: {
        const auto& a = val(f->lhs());
        const auto& b = val(f->rhs());
        for (std::size_t i = 0; i < n; ++i) v[i] = a[i] && b[i];
        break;
      }
      case Op::Or: {
        const auto& a = val(f->lhs());
        const auto& b = val(f->rhs());
        for (std::size_t i = 0; i < n; ++i) v[i] = a[i] || b[i];
        break;
      }
      case Op::Next: {
        const auto& a = val(f->arg());
        for (std::size_t i = 0; i + 1 < n; ++i) v[i] = a[i + 1];
        v[n - 1] = a[n - 1];
        break;
      }
      case Op::Until: {
        const auto& a = val(f->lhs());
        const auto& b = val(f->rhs());
        v[n - 1] = b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) v[i] = b[i] || (a[i] && v[i + 1]);
        break;
      }
      case Op::Release: {
        const auto& a = val(f->lhs());
        const auto& b = val(f->rhs());
        v[n - 1] = b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) v[i] = b[i] && (a[i] || v[i + 1]);
        break;
      }
    }
    return memo.emplace(f.get(), std::move(v)).first->second;
  };
  return val(phi)[0] != 0;
}

// ---------------------------------------------------------------- properties

PropertyKind parse_property_kind(const std::string& s) {
  if (s == "reachability") return PropertyKind::Reachability;
  if (s == "waypoint") return PropertyKind::Waypoint;
  if (s == "service-chain" || s == "service_chain") return PropertyKind::ServiceChain;
  throw LtlError("unknown property kind '" + s + "'");
}

std::string to_string(PropertyKind k) {
  switch (k) {
    case PropertyKind::Reachability: return "reachability";
    case PropertyKind::Waypoint: return "waypoint";
    case PropertyKind::ServiceChain: return "service-chain";
  }
  return "?";
}

namespace {

FormulaPtr way(std::size_t i, const std::vector<FormulaPtr>& ws, const FormulaPtr& dst) {
  if (i == ws.size()) return eventually(dst);
  std::vector<FormulaPtr> avoid;
  for (std::size_t k = i + 1; k < ws.size(); ++k) avoid.push_back(negate(ws[k]));
  avoid.push_back(negate(dst));
  return until(conj_all(avoid), conj(ws[i], way(i + 1, ws, dst)));
}

}  // namespace

FormulaPtr build_property(PropertyKind kind, const FormulaPtr& src, const FormulaPtr& dst,
                          const std::vector<FormulaPtr>& waypoints, const FormulaPtr& guard) {
  FormulaPtr pre = guard ? conj(src, guard) : src;
  switch (kind) {
    case PropertyKind::Reachability:
      return implies(pre, eventually(dst));
    case PropertyKind::Waypoint: {
      if (waypoints.empty()) throw LtlError("waypoint property needs a waypoint");
      FormulaPtr w = disj_all(waypoints);
      return implies(pre, until(negate(dst), conj(w, eventually(dst))));
    }
    case PropertyKind::ServiceChain:
      if (waypoints.empty()) throw LtlError("service chain needs at least one waypoint");
      return implies(pre, way(0, waypoints, dst));
  }
  throw LtlError("bad property kind");
}

}  // namespace netupd::ltl
